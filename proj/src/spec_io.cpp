#include "metagee/spec_io.hpp"

#include "metagee/error.hpp"

#include <json.hpp>

#include <cctype>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace metagee {

namespace {

using json = nlohmann::ordered_json;

std::string escape_token(const std::string& key) {
    std::string out;
    for (char c : key) {
        if (c == '~') out += "~0";
        else if (c == '/') out += "~1";
        else out += c;
    }
    return out;
}

std::string child(const std::string& ptr, const std::string& key) { return ptr + "/" + escape_token(key); }
std::string child(const std::string& ptr, std::size_t i) { return ptr + "/" + std::to_string(i); }

const json& require(const json& obj, const std::string& ptr, const std::string& key) {
    auto it = obj.find(key);
    if (it == obj.end()) throw SpecError(child(ptr, key), "missing required key '" + key + "'");
    return *it;
}

const json& require_array(const json& obj, const std::string& ptr, const std::string& key) {
    const json& v = require(obj, ptr, key);
    if (!v.is_array()) throw SpecError(child(ptr, key), "expected an array");
    return v;
}

long require_positive_int(const json& obj, const std::string& ptr, const std::string& key) {
    const json& v = require(obj, ptr, key);
    if (!v.is_number_integer() || v.get<long>() < 1) {
        throw SpecError(child(ptr, key), "expected a positive integer");
    }
    return v.get<long>();
}

std::string require_string(const json& v, const std::string& ptr) {
    if (!v.is_string()) throw SpecError(ptr, "expected a string");
    return v.get<std::string>();
}

double require_number(const json& v, const std::string& ptr) {
    if (!v.is_number()) throw SpecError(ptr, "expected a number");
    return v.get<double>();
}

std::string number_text(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

bool is_function_name(const std::string& name) {
    for (Function f : {Function::Sin, Function::Cos, Function::Tan, Function::Sqrt, Function::Exp, Function::Ln}) {
        if (function_name(f) == name) return true;
    }
    return false;
}

void check_name(const std::string& name, const std::string& ptr) {
    bool ok = !name.empty() && std::isalpha(static_cast<unsigned char>(name[0]));
    for (char c : name) ok = ok && (std::isalnum(static_cast<unsigned char>(c)) || c == '_');
    if (!ok) throw SpecError(ptr, "'" + name + "' is not a valid identifier");
    if (is_reserved_name(name) || is_function_name(name)) {
        throw SpecError(ptr, "'" + name + "' is a reserved name");
    }
}

struct ExprParser {
    std::set<std::string> allowed;
    std::string allowed_text;

    Expr operator()(const json& v, const std::string& ptr) const {
        std::string text;
        if (v.is_number()) text = number_text(v.get<double>());
        else text = require_string(v, ptr);
        Expr e = [&] {
            try {
                return parse(text);
            } catch (const ParseError& err) {
                throw SpecError(ptr, err.what());
            }
        }();
        for (const auto& var : free_vars(e)) {
            if (!allowed.count(var)) {
                throw SpecError(ptr, "unknown identifier '" + var + "' (allowed: " + allowed_text + ")");
            }
        }
        return e;
    }
};

ExprParser parser_for(const std::vector<std::string>& names) {
    ExprParser p;
    for (const auto& n : names) {
        p.allowed.insert(n);
        p.allowed_text += (p.allowed_text.empty() ? "" : ", ") + n;
    }
    if (p.allowed_text.empty()) p.allowed_text = "none";
    return p;
}

std::vector<std::string> name_list(const json& arr, const std::string& ptr, const std::set<std::string>& known) {
    if (!arr.is_array()) throw SpecError(ptr, "expected an array of parameter names");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        std::string nm = require_string(arr[i], child(ptr, i));
        if (!known.count(nm)) throw SpecError(child(ptr, i), "'" + nm + "' is not a parameter");
        out.push_back(nm);
    }
    return out;
}

} // namespace

ImmersionSpec parse_spec(std::string_view json_text, const std::string& origin) {
    json doc;
    try {
        doc = json::parse(json_text.begin(), json_text.end());
    } catch (const json::parse_error& e) {
        throw SpecError("", origin + ": malformed JSON: " + e.what());
    }
    if (!doc.is_object()) throw SpecError("", "top level must be an object");
    static const std::set<std::string> known = {"name",          "p",      "q",    "ambient_dim", "structure",
                                                "parameters",    "constants", "immersion", "distributions",
                                                "warped",        "grid",   "description", "expected_overall"};
    for (const auto& [key, val] : doc.items()) {
        if (!known.count(key)) throw SpecError(child("", key), "unknown key '" + key + "'");
    }

    const std::string name = require_string(require(doc, "", "name"), "/name");
    const long p = require_positive_int(doc, "", "p");
    const long q = require_positive_int(doc, "", "q");
    MetallicParams params(p, q);

    const long n = require_positive_int(doc, "", "ambient_dim");
    const json& structure = require_array(doc, "", "structure");
    if (static_cast<long>(structure.size()) != n) {
        throw SpecError("/structure", "expected " + std::to_string(n) + " entries, got " +
                                          std::to_string(structure.size()));
    }
    std::vector<Axis> signs;
    for (std::size_t i = 0; i < structure.size(); ++i) {
        std::string s = require_string(structure[i], child("/structure", i));
        if (s == "sigma") signs.push_back(Axis::Sigma);
        else if (s == "sigbar") signs.push_back(Axis::Sigbar);
        else throw SpecError(child("/structure", i), "expected \"sigma\" or \"sigbar\", got \"" + s + "\"");
    }

    ImmersionSpec spec(name, params, AmbientStructure(params, signs));
    std::set<std::string> taken;

    const json& pars = require_array(doc, "", "parameters");
    if (pars.empty()) throw SpecError("/parameters", "at least one parameter is required");
    for (std::size_t i = 0; i < pars.size(); ++i) {
        const std::string ptr = child("/parameters", i);
        if (!pars[i].is_object()) throw SpecError(ptr, "expected an object");
        Parameter par;
        par.name = require_string(require(pars[i], ptr, "name"), ptr + "/name");
        check_name(par.name, ptr + "/name");
        if (!taken.insert(par.name).second) throw SpecError(ptr + "/name", "duplicate name '" + par.name + "'");
        const json& range = require_array(pars[i], ptr, "range");
        if (range.size() != 2) throw SpecError(ptr + "/range", "expected [lo, hi]");
        par.lo = require_number(range[0], ptr + "/range/0");
        par.hi = require_number(range[1], ptr + "/range/1");
        if (!(par.lo < par.hi)) throw SpecError(ptr + "/range", "expected lo < hi");
        spec.parameters.push_back(par);
    }

    if (auto it = doc.find("constants"); it != doc.end()) {
        if (!it->is_object()) throw SpecError("/constants", "expected an object");
        for (const auto& [key, val] : it->items()) {
            const std::string ptr = child("/constants", key);
            check_name(key, ptr);
            if (!taken.insert(key).second) throw SpecError(ptr, "duplicate name '" + key + "'");
            spec.constants.emplace_back(key, require_number(val, ptr));
        }
    }

    std::vector<std::string> scope;
    for (const auto& par : spec.parameters) scope.push_back(par.name);
    for (const auto& c : spec.constants) scope.push_back(c.first);
    const ExprParser expr = parser_for(scope);

    const json& imm = require_array(doc, "", "immersion");
    if (static_cast<long>(imm.size()) != n) {
        throw SpecError("/immersion", "expected " + std::to_string(n) + " components, got " +
                                          std::to_string(imm.size()));
    }
    for (std::size_t i = 0; i < imm.size(); ++i) spec.immersion.push_back(expr(imm[i], child("/immersion", i)));
    if (spec.k() > n) throw SpecError("/parameters", "more parameters than ambient dimensions");

    if (auto it = doc.find("distributions"); it != doc.end()) {
        if (!it->is_object()) throw SpecError("/distributions", "expected an object");
        for (const auto& [key, val] : it->items()) {
            const std::string ptr = child("/distributions", key);
            if (!val.is_array() || val.empty()) throw SpecError(ptr, "expected a non-empty array of vectors");
            Distribution d{key, {}};
            for (std::size_t j = 0; j < val.size(); ++j) {
                const std::string vptr = child(ptr, j);
                if (!val[j].is_array() || static_cast<int>(val[j].size()) != spec.k()) {
                    throw SpecError(vptr, "expected " + std::to_string(spec.k()) + " coefficients");
                }
                std::vector<Expr> v;
                for (std::size_t c = 0; c < val[j].size(); ++c) v.push_back(expr(val[j][c], child(vptr, c)));
                d.vectors.push_back(std::move(v));
            }
            spec.distributions.push_back(std::move(d));
        }
    }

    if (auto it = doc.find("warped"); it != doc.end()) {
        if (!it->is_object()) throw SpecError("/warped", "expected an object");
        std::set<std::string> pnames;
        for (const auto& par : spec.parameters) pnames.insert(par.name);
        WarpedDecl w;
        w.base = name_list(require(*it, "/warped", "base"), "/warped/base", pnames);
        w.fiber = name_list(require(*it, "/warped", "fiber"), "/warped/fiber", pnames);
        std::set<std::string> seen;
        for (const auto& nm : w.base) seen.insert(nm);
        for (const auto& nm : w.fiber) {
            if (!seen.insert(nm).second) throw SpecError("/warped/fiber", "'" + nm + "' appears in base and fiber");
        }
        if (seen.size() != pnames.size() || w.base.size() + w.fiber.size() != pnames.size()) {
            throw SpecError("/warped", "base and fiber must partition the parameters");
        }
        if (w.base.empty() || w.fiber.empty()) throw SpecError("/warped", "base and fiber must be non-empty");
        std::vector<std::string> wscope = w.base;
        for (const auto& c : spec.constants) wscope.push_back(c.first);
        const json& wf = require(*it, "/warped", "warping");
        w.warping = parser_for(wscope)(wf, "/warped/warping");
        w.warping_text = wf.is_string() ? wf.get<std::string>() : render(w.warping);
        spec.warped = std::move(w);
    }

    if (auto it = doc.find("grid"); it != doc.end()) {
        if (!it->is_object()) throw SpecError("/grid", "expected an object");
        spec.grid = static_cast<int>(require_positive_int(*it, "/grid", "points_per_param"));
    }

    // Rank of the immersion and of each distribution over the grid.
    for (const auto& u : grid_points(spec)) {
        PointFrame f = frame_at(spec, u);
        for (const auto& d : spec.distributions) subspace_projector(f, distribution_basis(spec, d, u));
    }
    return spec;
}

ImmersionSpec load_spec(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SpecError("", "cannot open spec file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_spec(ss.str(), path.string());
}

} // namespace metagee
