// metagee command line: verify, classify, angles, identity, examples.
#include "metagee/error.hpp"
#include "metagee/report.hpp"
#include "metagee/warped.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

int verify(const std::string& spec_arg, double tol_scale, int grid, bool as_json) {
    const auto spec = metagee::resolve_spec(spec_arg);
    const auto report = metagee::run_all(spec, {tol_scale, grid});
    if (as_json) metagee::write_json(std::cout, report);
    else metagee::write_text(std::cout, report);
    return report.overall ? kPass : kFail;
}

int classify(const std::string& spec_arg) {
    const auto spec = metagee::resolve_spec(spec_arg);
    const auto c = metagee::classify(spec);
    metagee::write_classification(std::cout, spec, c);
    return c.label == metagee::Label::Unclassified ? kFail : kPass;
}

int angles(const std::string& spec_arg, const std::string& csv_path) {
    const auto spec = metagee::resolve_spec(spec_arg);
    const auto c = metagee::classify(spec);
    if (csv_path == "-") {
        metagee::write_angle_csv(std::cout, spec, c);
    } else {
        std::ofstream out(csv_path);
        if (!out) {
            std::cerr << "error: cannot write " << csv_path << '\n';
            return kUsage;
        }
        metagee::write_angle_csv(out, spec, c);
        std::cout << "wrote " << csv_path << " (" << c.angles.size() << " distributions)\n";
    }
    return kPass;
}

int identity(const std::string& spec_arg, const std::string& tag, double tol_scale) {
    if (!metagee::is_identity_tag(tag)) {
        std::cerr << "error: unknown identity tag '" << tag << "'; known tags:";
        for (const auto& t : metagee::identity_tags()) std::cerr << ' ' << t;
        std::cerr << '\n';
        return kUsage;
    }
    const auto spec = metagee::resolve_spec(spec_arg);
    const auto r = metagee::check_identity(spec, tag, tol_scale);
    metagee::write_identity(std::cout, r);
    return r.pass ? kPass : kFail;
}

int examples(bool list, const std::string& run) {
    if (list || run.empty()) {
        for (const auto& n : metagee::builtin_names()) std::cout << n << "  (builtin)\n";
        for (const auto& n : metagee::constructed_names()) {
            std::cout << n << "  (constructed, expected " << metagee::expected_overall(n) << ")\n";
        }
        return kPass;
    }
    std::vector<std::string> names;
    if (run == "all") names = metagee::fixture_names();
    else names.push_back(run);
    bool all_as_expected = true;
    for (const auto& n : names) {
        if (!metagee::is_fixture(n)) {
            std::cerr << "error: no builtin example named '" << n << "'\n";
            return kUsage;
        }
        const auto report = metagee::run_all(metagee::load_fixture(n));
        const std::string got = report.overall ? "PASS" : "FAIL";
        const std::string want = metagee::expected_overall(n);
        if (names.size() == 1) {
            metagee::write_text(std::cout, report);
            return report.overall ? kPass : kFail;
        }
        int failing = 0;
        for (const auto& i : report.identities) failing += i.pass ? 0 : 1;
        std::printf("%-34s %-15s %2zu identities, %d failing  overall %s (expected %s)%s\n", n.c_str(),
                    std::string(metagee::label_name(report.classification.label)).c_str(), report.identities.size(),
                    failing, got.c_str(), want.c_str(), got == want ? "" : "  UNEXPECTED");
        all_as_expected = all_as_expected && got == want;
    }
    return all_as_expected ? kPass : kFail;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Metallic submanifold geometry checker"};
    app.set_version_flag("--version", std::string(metagee::version()));
    app.require_subcommand(1);

    std::string spec_arg, csv_path, tag, run;
    double tol_scale = 1.0;
    int grid = 0;
    bool as_json = false, list = false;

    auto* v = app.add_subcommand("verify", "Run the full verification pipeline");
    v->add_option("spec", spec_arg, "Spec file or builtin fixture name")->required();
    v->add_option("--tol-scale", tol_scale, "Multiply every tolerance")->check(CLI::PositiveNumber);
    v->add_option("--grid", grid, "Grid points per parameter")->check(CLI::PositiveNumber);
    v->add_flag("--json", as_json, "Emit JSON");

    auto* c = app.add_subcommand("classify", "Slant classification of the declared distributions");
    c->add_option("spec", spec_arg, "Spec file or builtin fixture name")->required();

    auto* a = app.add_subcommand("angles", "Angle table over the grid as CSV");
    a->add_option("spec", spec_arg, "Spec file or builtin fixture name")->required();
    a->add_option("--csv", csv_path, "Output path, '-' for stdout")->required();

    auto* i = app.add_subcommand("identity", "Check one identity");
    i->add_option("spec", spec_arg, "Spec file or builtin fixture name")->required();
    i->add_option("--id", tag, "Identity tag, e.g. ID_E17i")->required();
    i->add_option("--tol-scale", tol_scale, "Multiply the tolerance")->check(CLI::PositiveNumber);

    auto* e = app.add_subcommand("examples", "List or run the builtin examples");
    auto* list_opt = e->add_flag("--list", list, "List fixture names");
    e->add_option("--run", run, "'all' or a fixture name")->excludes(list_opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& s) {
        return app.exit(s);
    } catch (const CLI::ParseError& err) {
        app.exit(err);
        return kUsage;
    }

    try {
        if (*v) return verify(spec_arg, tol_scale, grid, as_json);
        if (*c) return classify(spec_arg);
        if (*a) return angles(spec_arg, csv_path);
        if (*i) return identity(spec_arg, tag, tol_scale);
        return examples(list, run);
    } catch (const metagee::NotApplicable& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kUsage;
    } catch (const metagee::SpecError& err) {
        std::cerr << "spec error: " << err.what() << '\n';
        return kUsage;
    } catch (const metagee::ParseError& err) {
        std::cerr << "spec error: " << err.what() << '\n';
        return kUsage;
    } catch (const metagee::Error& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kUsage;
    }
}
