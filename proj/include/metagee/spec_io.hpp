#pragma once

#include "metagee/submanifold.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace metagee {

/// Parses and validates a JSON spec; `origin` names the source in errors.
ImmersionSpec parse_spec(std::string_view json_text, const std::string& origin = "<string>");

/// Reads a spec file. Errors carry a JSON-pointer path (SpecError) or the
/// offending grid point (GeometryError).
ImmersionSpec load_spec(const std::filesystem::path& path);

} // namespace metagee
