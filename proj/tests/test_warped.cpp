#include "helpers.hpp"

#include "metagee/error.hpp"
#include "metagee/warped.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace metagee;

namespace {

const std::vector<std::string> kWarpedBuiltins = {
    "golden_r5_semiinvariant", "metallic_r5_semiinvariant", "golden_r4_semislant", "metallic_r4_semislant",
    "golden_r8_semislant",     "metallic_r8_semislant",     "golden_r5_hemislant", "metallic_r5_hemislant",
    "golden_r7_hemislant",     "metallic_r7_hemislant"};

bool has(const std::vector<std::string>& v, const std::string& x) { return std::find(v.begin(), v.end(), x) != v.end(); }

} // namespace

TEST_SUITE("warped") {

TEST_CASE("catalog") {
    CHECK(identity_tags().size() == 36);
    CHECK(identity_tags().front() == "ID_E7i");
    CHECK(identity_tags().back() == "ID_HS");
    CHECK(is_identity_tag("ID_P3"));
    CHECK_FALSE(is_identity_tag("ID_E99"));
    CHECK(identity_anchor("ID_E17i") == "(nabla_X T)Y = A_{NY}X + t h(X,Y)");
}

TEST_CASE("warping jet") {
    auto spec = load_fixture("golden_r8_semislant");
    Eigen::Vector4d u(1.2, 0.8, 0.5, 0.5);
    WarpingJet w = warping_at(spec, u);
    const double r2 = 1.2 * 1.2 + 0.8 * 0.8;
    CHECK(w.f == doctest::Approx(std::sqrt(r2)));
    CHECK((w.dlnf - Eigen::Vector4d(1.2 / r2, 0.8 / r2, 0, 0)).norm() <= 1e-14);
    CHECK_THROWS_AS(warping_at(load_fixture("golden_r4_bislant"), Eigen::Vector2d(1, 1)), Error);
}

TEST_CASE("fiber metric scales with f squared") {
    // G_FF / f^2 sampled at two base points.
    auto spec = load_fixture("metallic_r5_semiinvariant");
    auto ratio = [&](double f) {
        Eigen::Vector3d u(f, 0.6, 0.9);
        return (frame_at(spec, u).G.bottomRightCorner(2, 2) / (f * f)).eval();
    };
    CHECK(testing_helpers::max_abs(ratio(0.7) - ratio(1.8)) <= 1e-12);
}

TEST_CASE("warped metric holds on the builtin examples") {
    for (const auto& name : kWarpedBuiltins) {
        CAPTURE(name);
        auto r = verify_warped_metric(load_fixture(name));
        CHECK(r.pass);
        CHECK(r.residual <= 1e-9);
    }
    auto bad = verify_warped_metric(load_fixture("counter_mt_x_mperp"));
    CHECK_FALSE(bad.pass);
    CHECK(bad.residual > 1);
    CHECK_THROWS_AS(verify_warped_metric(load_fixture("golden_r4_bislant")), NotApplicable);
}

TEST_CASE("tolerance scale widens the bound") {
    auto spec = load_fixture("golden_r5_semiinvariant");
    CHECK(check_identity(spec, "ID_WM", 1.0).tol == doctest::Approx(1e-9));
    CHECK(check_identity(spec, "ID_WM", 10.0).tol == doctest::Approx(1e-8));
    CHECK(check_identity(spec, "ID_E17i", 3.0).tol == doctest::Approx(6e-5));
}

TEST_CASE("structural gating") {
    CatalogContext bislant(load_fixture("golden_r4_bislant"));
    auto tags = applicable_tags(bislant);
    CHECK(has(tags, "ID_E24"));
    CHECK_FALSE(has(tags, "ID_E21"));
    CHECK_FALSE(has(tags, "ID_WM"));
    try {
        check_identity(bislant, "ID_P3");
        FAIL("expected NotApplicable");
    } catch (const NotApplicable& e) {
        CHECK(std::string(e.what()).rfind("identity not applicable: ", 0) == 0);
    }

    CatalogContext semislant(load_fixture("golden_r4_semislant"));
    CHECK(has(applicable_tags(semislant), "ID_E32"));
    CHECK_FALSE(has(applicable_tags(semislant), "ID_HS"));
    CatalogContext hemi(load_fixture("metallic_r7_hemislant"));
    CHECK(has(applicable_tags(hemi), "ID_HS"));
    CatalogContext slant(load_fixture("slant_cylinder"));
    CHECK(has(applicable_tags(slant), "ID_E23ii"));
}

TEST_CASE("lemma identities on the builtin examples") {
    for (const auto& name : kWarpedBuiltins) {
        CAPTURE(name);
        CatalogContext ctx(load_fixture(name));
        for (auto& r : check_identities(ctx, {"ID_L1A", "ID_L1B", "ID_L1C", "ID_W1a", "ID_W1b", "ID_W3"})) {
            CAPTURE(r.id);
            CHECK(r.pass);
            CHECK(r.residual <= 2e-5);
        }
        for (const auto& tag : applicable_tags(ctx)) {
            CAPTURE(tag);
            CHECK(check_identity(ctx, tag).pass);
        }
    }
}

TEST_CASE("semi-slant warped identity holds in both factor orders") {
    for (const char* name : {"golden_r4_semislant", "metallic_r8_semislant"}) {
        auto r = check_identity(load_fixture(name), "ID_E32");
        CHECK(r.pass);
        CHECK(r.residual <= 2e-5);
    }
}

TEST_CASE("invariant warped product: T X (ln f) is an eigenvalue multiple") {
    auto spec = load_fixture("invariant_warped_p3");
    auto r = check_identity(spec, "ID_P3");
    CHECK(r.pass);
    CHECK(r.tol == doctest::Approx(1e-6));
    // e_x is a sigma eigenvector and f = x, so the ratio is sigma exactly.
    CatalogContext ctx(spec);
    for (const auto& u : ctx.points) {
        PointGeometry g = geometry_at(spec, u);
        WarpingJet w = warping_at(spec, u);
        CHECK(w.dlnf.dot(g.dec.Tmat.col(0)) / w.dlnf[0] == doctest::Approx(spec.params.sigma()).epsilon(1e-12));
    }
}

TEST_CASE("anti-invariant and mixed warped identities") {
    CHECK(check_identity(load_fixture("anti_invariant_warped_p4"), "ID_P4").pass);
    CHECK(check_identity(load_fixture("metallic_r5_semiinvariant"), "ID_P2").pass);
    CHECK(check_identity(load_fixture("golden_r5_hemislant"), "ID_HS").pass);
}

TEST_CASE("obstruction: invariant base with anti-invariant fiber") {
    auto counter = obstruction_report(load_fixture("counter_mt_x_mperp"));
    CHECK(counter.hypothesis_matches);
    CHECK_FALSE(counter.f_constant);
    CHECK(counter.contradiction);
    CHECK(counter.verdict.rfind("contradiction", 0) == 0);
    bool wm_failed = false;
    for (const auto& c : counter.checks) wm_failed = wm_failed || (c.id == "ID_WM" && !c.pass);
    CHECK(wm_failed);

    auto trivial = obstruction_report(load_fixture("trivial_mt_x_mperp"));
    CHECK(trivial.hypothesis_matches);
    CHECK(trivial.f_constant);
    CHECK_FALSE(trivial.contradiction);
    CHECK(trivial.verdict == "constant warping forced");
    auto p1 = check_identity(load_fixture("trivial_mt_x_mperp"), "ID_P1");
    CHECK(p1.pass);
    CHECK(p1.residual <= 1e-8);
}

TEST_CASE("obstruction: allowed products witness non-constant warping") {
    for (const char* name : {"golden_r5_semiinvariant", "metallic_r4_semislant", "golden_r7_hemislant"}) {
        auto r = obstruction_report(load_fixture(name));
        CHECK_FALSE(r.hypothesis_matches);
        CHECK_FALSE(r.contradiction);
        CHECK(r.max_dlnf > 0.1);
        CHECK(r.verdict.rfind("proper warped product exists", 0) == 0);
    }
}

}
