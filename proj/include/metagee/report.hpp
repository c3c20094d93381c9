#pragma once

#include "metagee/identity.hpp"
#include "metagee/slant.hpp"
#include "metagee/submanifold.hpp"
#include "metagee/warped.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace metagee {

std::string_view version();

/// Names of the embedded fixtures, sorted. Builtin examples carry a
/// golden_ or metallic_ prefix; the rest are constructed test fixtures.
std::vector<std::string> fixture_names();
std::vector<std::string> builtin_names();
std::vector<std::string> constructed_names();
bool is_fixture(std::string_view name);
/// Raw JSON of an embedded fixture.
std::string_view fixture_text(std::string_view name);
/// Outcome the fixture is built to produce ("PASS" or "FAIL").
std::string expected_overall(std::string_view name);

ImmersionSpec load_fixture(std::string_view name);
/// Fixture with (p, q) and named constants replaced before validation.
ImmersionSpec load_fixture(std::string_view name, long p, long q,
                           const std::vector<std::pair<std::string, double>>& constants = {});
/// The twelve builtin examples, six in Golden and six in metallic form.
std::vector<ImmersionSpec> builtin_examples();

/// A path to a JSON file, or the name of an embedded fixture.
ImmersionSpec resolve_spec(const std::string& path_or_name);

struct RunOptions {
    double tol_scale = 1.0;
    /// Points per parameter; 0 keeps the spec's own grid.
    int grid = 0;
};

struct VerificationReport {
    std::string name;
    long p = 0;
    long q = 0;
    std::string version;
    int grid = 0;
    std::size_t point_count = 0;
    std::vector<std::string> parameter_names;
    std::vector<Eigen::VectorXd> points;
    Classification classification;
    std::optional<FactorTypes> factors;
    std::optional<ObstructionReport> obstruction;
    /// Applicable identities in catalog order.
    std::vector<IdentityResult> identities;
    /// Catalog tags skipped by structural gating, with the reason.
    std::vector<std::pair<std::string, std::string>> skipped;
    bool overall = false;
};

VerificationReport run_all(const ImmersionSpec& spec, const RunOptions& opts = {});

void write_text(std::ostream& os, const VerificationReport& r);
void write_json(std::ostream& os, const VerificationReport& r);
/// point index, parameter values, mean angle of each distribution.
void write_angle_csv(std::ostream& os, const ImmersionSpec& spec, const Classification& c, int points_per_param = 0);
void write_classification(std::ostream& os, const ImmersionSpec& spec, const Classification& c);
void write_identity(std::ostream& os, const IdentityResult& r);

} // namespace metagee
