#include "helpers.hpp"

#include "metagee/error.hpp"
#include "metagee/slant.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>

using namespace metagee;

namespace {

// cos of the angle between J e1 and e1 for e1 = (cos t, sigma/sqrt(q) sin t, 0, 0).
double bislant_cos1(long p, long q, double t) {
    MetallicParams pq(p, q);
    const double s = pq.sigma(), sb = pq.sigbar();
    Eigen::Vector4d e(std::cos(t), s / std::sqrt(double(q)) * std::sin(t), 0, 0);
    Eigen::Vector4d Je(s * e[0], sb * e[1], 0, 0);
    return std::abs(Je.dot(e)) / (Je.norm() * e.norm());
}

ImmersionSpec bislant(long p, long q, double t) { return load_fixture("golden_r4_bislant", p, q, {{"t", t}}); }

} // namespace

TEST_SUITE("slant") {

TEST_CASE("golden bi-slant angles") {
    auto spec = bislant(1, 1, 0.7);
    auto d2 = angle_report(spec, "D2");
    CHECK(std::abs(d2.mean - std::acos(1 / std::sqrt(6.0))) <= 1e-9);
    CHECK(d2.constant);
    CHECK(d2.type == DistType::ProperSlant);
    auto d1 = angle_report(spec, "D1");
    CHECK(std::abs(std::cos(d1.mean) - bislant_cos1(1, 1, 0.7)) <= 1e-9);
    CHECK(angle_report(bislant(1, 1, 0.0), "D1").mean <= 1e-9);
    CHECK(std::abs(angle_report(bislant(1, 1, M_PI / 4), "D1").mean - M_PI / 2) <= 1e-9);
}

TEST_CASE("metallic bi-slant closed form") {
    for (auto [p, q] : {std::pair{1L, 1L}, {2L, 1L}, {1L, 2L}, {3L, 2L}}) {
        for (double t : {0.3, 0.7, 1.2}) {
            auto r = angle_report(bislant(p, q, t), "D1");
            const double formula = 2 * std::sqrt(double(q)) * std::cos(2 * t) /
                                   std::sqrt(p * p * std::pow(std::sin(2 * t), 2) + 4 * q);
            CHECK(std::abs(std::cos(r.mean) - std::abs(formula)) <= 1e-9);
            CHECK(std::abs(std::cos(r.mean) - bislant_cos1(p, q, t)) <= 1e-9);
        }
    }
}

TEST_CASE("hemi-slant angle of the seven dimensional example") {
    for (auto [p, q] : {std::pair{1L, 1L}, {2L, 1L}, {3L, 2L}}) {
        auto spec = load_fixture("golden_r7_hemislant", p, q);
        const double s = MetallicParams(p, q).sigma();
        // Z = d/df: |Z|^2 = 3 + s^2/q, |JZ|^2 = s^2 + p^2 + 3q, <JZ,Z> = p.
        const double expect = p * std::sqrt(double(q)) / std::sqrt((s * s + 3 * q) * (s * s + p * p + 3 * q));
        auto r = angle_report(spec, "D1");
        CHECK(std::abs(std::cos(r.mean) - expect) <= 1e-9);
        CHECK(r.type == DistType::ProperSlant);
        CHECK(angle_report(spec, "D2").type == DistType::AntiInvariant);
    }
}

TEST_CASE("slant cylinder") {
    auto spec = load_fixture("slant_cylinder");
    const MetallicParams& pq = spec.params;
    const double s = pq.sigma(), sb = pq.sigbar();
    auto r = angle_report(spec, "D");
    CHECK(std::abs(std::cos(r.mean) - pq.p() / std::sqrt(2 * (s * s + sb * sb))) <= 1e-9);
    CHECK(classify(spec).label == Label::ProperSlant);
}

TEST_CASE("cosines never exceed one") {
    for (const auto& name : fixture_names()) {
        auto spec = load_fixture(name);
        for (const auto& d : spec.distributions) {
            auto r = angle_report(spec, d.name);
            CHECK(r.max_cos_raw <= 1 + 1e-12);
            for (double th : r.samples) {
                CHECK(th >= 0);
                CHECK(th <= M_PI / 2 + 1e-12);
            }
        }
    }
}

TEST_CASE("classification of every fixture") {
    const std::vector<std::pair<std::string, Label>> table = {
        {"golden_r4_bislant", Label::BiSlant},          {"metallic_r4_bislant", Label::BiSlant},
        {"golden_r5_semiinvariant", Label::SemiInvariant}, {"metallic_r5_semiinvariant", Label::SemiInvariant},
        {"golden_r4_semislant", Label::SemiSlant},      {"metallic_r4_semislant", Label::SemiSlant},
        {"golden_r8_semislant", Label::SemiSlant},      {"metallic_r8_semislant", Label::SemiSlant},
        {"golden_r5_hemislant", Label::HemiSlant},      {"metallic_r5_hemislant", Label::HemiSlant},
        {"golden_r7_hemislant", Label::HemiSlant},      {"metallic_r7_hemislant", Label::HemiSlant},
        {"invariant_warped_p3", Label::Invariant},      {"anti_invariant_warped_p4", Label::AntiInvariant},
        {"nonslant_patch", Label::Unclassified},        {"slant_cylinder", Label::ProperSlant},
    };
    for (const auto& [name, label] : table) {
        CAPTURE(name);
        CHECK(classify(load_fixture(name)).label == label);
    }
}

TEST_CASE("non-constant angle is reported") {
    auto c = classify(load_fixture("nonslant_patch"));
    REQUIRE(c.angles.size() == 1);
    CHECK_FALSE(c.angles[0].constant);
    CHECK(c.angles[0].type == DistType::NonSlant);
    CHECK(c.diagnostics.find("not slant") != std::string::npos);
}

TEST_CASE("non-orthogonal distributions are not classified") {
    auto spec = parse_spec(R"json({
      "name": "skew", "p": 1, "q": 1, "ambient_dim": 4,
      "structure": ["sigma", "sigbar", "sigma", "sigbar"],
      "parameters": [{"name": "u", "range": [0, 1]}, {"name": "v", "range": [0, 1]}],
      "immersion": ["u", "v", "u", "v"],
      "distributions": {"D1": [[1, 0]], "D2": [[1, 1]]}})json");
    auto c = classify(spec);
    CHECK(c.label == Label::Unclassified);
    CHECK(c.diagnostics.find("not orthogonal") != std::string::npos);
}

TEST_CASE("bi-slant with equal angles is one slant distribution") {
    auto spec = parse_spec(R"json({
      "name": "equal", "p": 1, "q": 1, "ambient_dim": 4,
      "structure": ["sigma", "sigbar", "sigma", "sigbar"],
      "parameters": [{"name": "u", "range": [0, 1]}, {"name": "v", "range": [0, 1]}],
      "immersion": ["u", "u", "v", "v"],
      "distributions": {"D1": [[1, 0]], "D2": [[0, 1]]}})json");
    CHECK(classify(spec).label == Label::ProperSlant);
}

TEST_CASE("sampling seed") {
    unsetenv("METAGEE_SEED");
    CHECK(sampling_seed("") == 0xcbf29ce484222325ULL);
    CHECK(sampling_seed("a") == 0xaf63dc4c8601ec8cULL);
    auto spec = load_fixture("golden_r4_bislant");
    auto first = angle_report(spec, "D2").samples;
    CHECK(first == angle_report(spec, "D2").samples);
    setenv("METAGEE_SEED", "0x2a", 1);
    CHECK(sampling_seed("anything") == 42);
    auto reseeded = angle_report(load_fixture("golden_r5_semiinvariant"), "D2").samples;
    unsetenv("METAGEE_SEED");
    CHECK(reseeded != angle_report(load_fixture("golden_r5_semiinvariant"), "D2").samples);
}

TEST_CASE("slant identities on a proper slant surface") {
    auto spec = load_fixture("slant_cylinder");
    const double th = angle_report(spec, "D").mean;
    const double c2 = std::cos(th) * std::cos(th);
    for (const auto& u : grid_points(spec, 3)) {
        PointGeometry g = geometry_at(spec, u);
        Eigen::MatrixXd I = Eigen::MatrixXd::Identity(2, 2);
        CHECK(slant_TT_residual(spec, g, I, c2) <= 1e-9);
        CHECK(slant_NN_residual(spec, g, I, c2) <= 1e-9);
        CHECK(slant_T2_residual(spec, g, I, c2) <= 1e-9);
        CHECK(slant_T2_residual(spec, g, I, c2 * 0.9) > 1e-3);
        CHECK(slant_covT2_residual(spec, make_stencil(spec, u), c2) <= 2e-5);
    }
}

}
