#include "metagee/report.hpp"

#include "metagee/error.hpp"
#include "metagee/spec_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <ostream>

namespace metagee {

namespace {

using json = nlohmann::ordered_json;

struct Embedded {
    const char* name;
    const char* text;
};

const Embedded kFixtures[] = {
#include "builtin_fixtures.inc"
};

bool is_builtin_name(std::string_view n) { return n.starts_with("golden_") || n.starts_with("metallic_"); }

std::string fmt(const char* spec, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, x);
    return buf;
}

} // namespace

std::string_view version() { return METAGEE_VERSION; }

std::vector<std::string> fixture_names() {
    std::vector<std::string> out;
    for (const auto& f : kFixtures) out.emplace_back(f.name);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::string> builtin_names() {
    std::vector<std::string> out;
    for (auto& n : fixture_names()) {
        if (is_builtin_name(n)) out.push_back(n);
    }
    return out;
}

std::vector<std::string> constructed_names() {
    std::vector<std::string> out;
    for (auto& n : fixture_names()) {
        if (!is_builtin_name(n)) out.push_back(n);
    }
    return out;
}

bool is_fixture(std::string_view name) {
    return std::any_of(std::begin(kFixtures), std::end(kFixtures), [&](const Embedded& f) { return name == f.name; });
}

std::string_view fixture_text(std::string_view name) {
    for (const auto& f : kFixtures) {
        if (name == f.name) return f.text;
    }
    throw Error("no embedded fixture named '" + std::string(name) + "'");
}

std::string expected_overall(std::string_view name) {
    json doc = json::parse(fixture_text(name));
    return doc.value("expected_overall", std::string("PASS"));
}

ImmersionSpec load_fixture(std::string_view name) { return parse_spec(fixture_text(name), std::string(name)); }

ImmersionSpec load_fixture(std::string_view name, long p, long q,
                           const std::vector<std::pair<std::string, double>>& constants) {
    json doc = json::parse(fixture_text(name));
    doc["p"] = p;
    doc["q"] = q;
    for (const auto& [k, v] : constants) {
        if (!doc.contains("constants") || !doc["constants"].contains(k)) {
            throw Error("fixture '" + std::string(name) + "' has no constant '" + k + "'");
        }
        doc["constants"][k] = v;
    }
    return parse_spec(doc.dump(), std::string(name));
}

std::vector<ImmersionSpec> builtin_examples() {
    std::vector<ImmersionSpec> out;
    for (const auto& n : builtin_names()) out.push_back(load_fixture(n));
    return out;
}

ImmersionSpec resolve_spec(const std::string& path_or_name) {
    if (std::filesystem::exists(path_or_name)) return load_spec(path_or_name);
    std::string stem = path_or_name;
    if (stem.ends_with(".json")) stem.resize(stem.size() - 5);
    if (is_fixture(stem)) return load_fixture(stem);
    throw SpecError("", "no such spec file or builtin fixture: " + path_or_name);
}

VerificationReport run_all(const ImmersionSpec& spec, const RunOptions& opts) {
    VerificationReport r;
    r.name = spec.name;
    r.p = spec.params.p();
    r.q = spec.params.q();
    r.version = std::string(version());
    for (const auto& par : spec.parameters) r.parameter_names.push_back(par.name);

    CatalogContext ctx(spec, opts.tol_scale, opts.grid);
    r.grid = ctx.grid;
    r.points = ctx.points;
    r.point_count = ctx.points.size();
    r.classification = ctx.classification;
    r.factors = ctx.factors;

    std::vector<std::string> tags;
    for (const auto& t : identity_tags()) {
        if (auto why = unmet_requirement(ctx, t)) r.skipped.emplace_back(t, *why);
        else tags.push_back(t);
    }
    r.identities = check_identities(ctx, tags);
    if (ctx.factors && ctx.classification.label != Label::Unclassified) r.obstruction = obstruction_report(ctx);

    r.overall = r.classification.label != Label::Unclassified &&
                std::all_of(r.identities.begin(), r.identities.end(), [](const IdentityResult& i) { return i.pass; }) &&
                !(r.obstruction && r.obstruction->contradiction);
    return r;
}

namespace {

std::string angle_line(const AngleReport& a) {
    std::string s = "  " + a.distribution + ": theta = " + fmt("%.12f", a.mean) + " rad (" +
                    fmt("%.6f", a.mean * 180.0 / M_PI) + " deg), cos = " + fmt("%.12f", std::cos(a.mean)) +
                    ", max dev " + fmt("%.3e", a.max_dev) + ", " + (a.constant ? "CONSTANT" : "NON-CONSTANT") + ", " +
                    std::string(dist_type_name(a.type));
    return s;
}

json angle_json(const AngleReport& a) {
    return json{{"dist", a.distribution},
                {"mean_rad", a.mean},
                {"max_dev", a.max_dev},
                {"constant", a.constant},
                {"type", dist_type_name(a.type)}};
}

json identity_json(const IdentityResult& i) {
    json j{{"id", i.id},
           {"anchor", i.anchor},
           {"class", class_name(i.cls)},
           {"residual", i.residual},
           {"tol", i.tol},
           {"pass", i.pass}};
    if (i.cls == NumericClass::FiniteDifference) {
        j["residual_half_step"] = i.residual_half;
        j["convergence_guard"] = i.guard_ok;
    }
    if (!i.note.empty()) j["note"] = i.note;
    return j;
}

} // namespace

void write_identity(std::ostream& os, const IdentityResult& i) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "  %-9s %-12s residual %.3e  tol %.1e  %s", i.id.c_str(),
                  std::string(class_name(i.cls)).c_str(), i.residual, i.tol, i.pass ? "PASS" : "FAIL");
    os << buf << "  " << i.anchor;
    if (i.cls == NumericClass::FiniteDifference) {
        os << "  [h/2 residual " << fmt("%.3e", i.residual_half) << (i.guard_ok ? "" : ", guard FAILED") << "]";
    }
    if (!i.note.empty()) os << "  (" << i.note << ")";
    os << '\n';
}

void write_classification(std::ostream& os, const ImmersionSpec& spec, const Classification& c) {
    os << "spec: " << spec.name << " (p=" << spec.params.p() << ", q=" << spec.params.q() << ", k=" << spec.k()
       << ", n=" << spec.n() << ")\n";
    os << "classification: " << label_name(c.label) << '\n';
    for (const auto& a : c.angles) os << angle_line(a) << '\n';
    if (!c.diagnostics.empty()) os << "  diagnostics: " << c.diagnostics << '\n';
}

void write_text(std::ostream& os, const VerificationReport& r) {
    os << "metagee " << r.version << '\n';
    os << "spec: " << r.name << " (p=" << r.p << ", q=" << r.q << ")\n";
    os << "grid: " << r.grid << " points per parameter, " << r.point_count << " points\n";
    os << "classification: " << label_name(r.classification.label) << '\n';
    for (const auto& a : r.classification.angles) os << angle_line(a) << '\n';
    if (!r.classification.diagnostics.empty()) os << "  diagnostics: " << r.classification.diagnostics << '\n';
    if (r.factors) {
        os << "warped factors: base " << dist_type_name(r.factors->base.type) << ", fiber "
           << dist_type_name(r.factors->fiber.type) << '\n';
    }
    if (r.obstruction) {
        os << "warped verdict: " << r.obstruction->verdict << '\n';
        if (r.obstruction->hypothesis_matches) os << "  theorem: " << r.obstruction->theorem << '\n';
    }
    os << "identities:\n";
    for (const auto& i : r.identities) write_identity(os, i);
    if (!r.skipped.empty()) {
        os << "not applicable:\n";
        for (const auto& [t, why] : r.skipped) os << "  " << t << ": " << why << '\n';
    }
    os << "overall: " << (r.overall ? "PASS" : "FAIL") << '\n';
}

void write_json(std::ostream& os, const VerificationReport& r) {
    json j;
    j["name"] = r.name;
    j["p"] = r.p;
    j["q"] = r.q;
    j["version"] = r.version;
    j["grid"] = {{"points_per_param", r.grid}, {"points", r.point_count}};
    j["classification"] = label_name(r.classification.label);
    if (!r.classification.diagnostics.empty()) j["diagnostics"] = r.classification.diagnostics;
    j["angles"] = json::array();
    for (const auto& a : r.classification.angles) j["angles"].push_back(angle_json(a));
    if (r.factors) {
        json w{{"base", dist_type_name(r.factors->base.type)}, {"fiber", dist_type_name(r.factors->fiber.type)}};
        if (r.obstruction) {
            w["verdict"] = r.obstruction->verdict;
            w["theorem_applies"] = r.obstruction->hypothesis_matches;
            w["max_abs_X_ln_f"] = r.obstruction->max_dlnf;
            w["contradiction"] = r.obstruction->contradiction;
        }
        j["warped"] = w;
    }
    j["identities"] = json::array();
    for (const auto& i : r.identities) j["identities"].push_back(identity_json(i));
    j["not_applicable"] = json::array();
    for (const auto& [t, why] : r.skipped) j["not_applicable"].push_back({{"id", t}, {"reason", why}});
    j["overall"] = r.overall ? "PASS" : "FAIL";
    os << j.dump(2) << '\n';
}

void write_angle_csv(std::ostream& os, const ImmersionSpec& spec, const Classification& c, int points_per_param) {
    os << "point";
    for (const auto& par : spec.parameters) os << ',' << par.name;
    for (const auto& a : c.angles) os << ",theta_" << a.distribution;
    os << '\n';
    const auto pts = grid_points(spec, points_per_param);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        os << i;
        for (Eigen::Index j = 0; j < pts[i].size(); ++j) os << ',' << fmt("%.17g", pts[i][j]);
        for (const auto& a : c.angles) os << ',' << (i < a.per_point.size() ? fmt("%.17g", a.per_point[i]) : "");
        os << '\n';
    }
}

} // namespace metagee
