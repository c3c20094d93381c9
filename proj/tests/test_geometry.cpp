#include "helpers.hpp"

#include "metagee/error.hpp"
#include "metagee/geometry.hpp"

#include <doctest.h>

#include <cmath>

using namespace metagee;
using testing_helpers::max_abs;

namespace {

ImmersionSpec sphere() {
    return parse_spec(R"json({
      "name": "sphere", "p": 1, "q": 1, "ambient_dim": 3,
      "structure": ["sigma", "sigma", "sigbar"],
      "parameters": [{"name": "th", "range": [0.3, 2.8]}, {"name": "ph", "range": [0, 6]}],
      "immersion": ["sin(th)*cos(ph)", "sin(th)*sin(ph)", "cos(th)"]})json");
}

// Christoffel symbols from finite differences of the metric alone.
Eigen::VectorXd gamma_from_metric(const ImmersionSpec& spec, const Eigen::VectorXd& u, int a, int b) {
    const int k = spec.k();
    const double h = 1e-5;
    std::vector<Eigen::MatrixXd> dG;
    for (int c = 0; c < k; ++c) {
        Eigen::VectorXd up = u, dn = u;
        up[c] += h;
        dn[c] -= h;
        dG.push_back((frame_at(spec, up).G - frame_at(spec, dn).G) / (2 * h));
    }
    Eigen::VectorXd low(k);
    for (int d = 0; d < k; ++d) low[d] = 0.5 * (dG[a](b, d) + dG[b](a, d) - dG[d](a, b));
    return frame_at(spec, u).Ginv * low;
}

} // namespace

TEST_SUITE("geometry") {

TEST_CASE("round sphere: h(X,Y) = -g(X,Y) x") {
    auto spec = sphere();
    Eigen::Vector2d u(1.1, 0.4);
    PointFrame f = frame_at(spec, u);
    Eigen::Vector3d x(std::sin(1.1) * std::cos(0.4), std::sin(1.1) * std::sin(0.4), std::cos(1.1));
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            Eigen::VectorXd h = sff(f, Eigen::Vector2d::Unit(a), Eigen::Vector2d::Unit(b));
            CHECK((h + f.G(a, b) * x).norm() <= 1e-12);
        }
    }
    // A_x is minus the identity.
    for (int a = 0; a < 2; ++a) {
        Eigen::VectorXd A = shape_apply(f, x, Eigen::Vector2d::Unit(a));
        CHECK((A + f.E.col(a)).norm() <= 1e-12);
    }
}

TEST_CASE("Christoffel symbols agree with the metric route") {
    for (const char* name : {"golden_r5_semiinvariant", "metallic_r8_semislant", "golden_r7_hemislant"}) {
        auto spec = load_fixture(name);
        for (const auto& u : grid_points(spec, 2)) {
            PointFrame f = frame_at(spec, u);
            ConnectionData c = connection_at(spec, f);
            for (int a = 0; a < spec.k(); ++a) {
                for (int b = 0; b < spec.k(); ++b) {
                    CHECK((c.gamma(a, b) - gamma_from_metric(spec, u, a, b)).norm() <= 1e-7);
                    CHECK((f.E * c.gamma(a, b) - levi_civita(f, a, b)).norm() <= 1e-12);
                }
            }
            auto cc = connection_consistency(f, c);
            CHECK(cc.gauss_split <= 1e-10);
            CHECK(cc.metric_compat <= 1e-10);
        }
    }
}

TEST_CASE("shape operator is self-adjoint and dual to h") {
    auto spec = load_fixture("metallic_r7_hemislant");
    PointFrame f = frame_at(spec, Eigen::Vector2d(1.2, 0.5));
    ConnectionData c = connection_at(spec, f);
    for (int i = 0; i < f.Q_nor.cols(); ++i) {
        Eigen::VectorXd V = f.Q_nor.col(i);
        Eigen::MatrixXd A = shape_operator(c, f, Eigen::VectorXd::Unit(f.Q_nor.cols(), i));
        CHECK(max_abs(f.G * A - (f.G * A).transpose()) <= 1e-12);
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                Eigen::VectorXd ea = Eigen::Vector2d::Unit(a), eb = Eigen::Vector2d::Unit(b);
                double lhs = shape_apply(f, V, ea).dot(f.E * eb);
                CHECK(lhs == doctest::Approx(sff(f, ea, eb).dot(V)).epsilon(1e-12));
                CHECK((f.E * (A * ea) - shape_apply(f, V, ea)).norm() <= 1e-12);
            }
        }
    }
}

TEST_CASE("normal connection") {
    auto spec = sphere();
    Eigen::Vector2d u(1.0, 1.0);
    // The position vector is normal with nabla-perp zero.
    NormalField pos = [&](const Eigen::VectorXd& v) {
        return Eigen::Vector3d(std::sin(v[0]) * std::cos(v[1]), std::sin(v[0]) * std::sin(v[1]), std::cos(v[0]))
            .eval();
    };
    CHECK(max_abs(normal_connection(spec, u, pos)) <= 1e-9);
    NormalField tangent = [&](const Eigen::VectorXd& v) { return frame_at(spec, v).E.col(0).eval(); };
    CHECK_THROWS_WITH_AS(normal_connection(spec, u, tangent), "field leaves normal bundle", GeometryError);
}

TEST_CASE("stencils refuse points near the boundary") {
    auto spec = load_fixture("golden_r4_bislant");
    CHECK_THROWS_AS(make_stencil(spec, Eigen::Vector2d(0.5 + 1e-5, 1.0)), GeometryError);
    CHECK_NOTHROW(make_stencil(spec, Eigen::Vector2d(1.0, 1.0)));
}

TEST_CASE("covariant derivative identities by finite differences") {
    for (const char* name : {"golden_r4_bislant", "metallic_r5_hemislant", "metallic_r8_semislant", "slant_cylinder"}) {
        auto spec = load_fixture(name);
        for (const auto& u : grid_points(spec, 2)) {
            ConnectionResiduals r = connection_residuals(make_stencil(spec, u));
            CHECK(r.def_T <= 2e-5);
            CHECK(r.def_N <= 2e-5);
            CHECK(r.def_t <= 2e-5);
            CHECK(r.def_n <= 2e-5);
            CHECK(r.sym_covT <= 2e-5);
            CHECK(r.covT <= 2e-5);
            CHECK(r.covN <= 2e-5);
            CHECK(r.covt <= 2e-5);
            CHECK(r.covn <= 2e-5);
            CHECK(r.mixed <= 2e-5);
        }
    }
}

TEST_CASE("covariant derivative of T is not identically zero") {
    auto spec = load_fixture("metallic_r5_hemislant");
    Stencil s = make_stencil(spec, Eigen::Vector2d(1.2, 0.7));
    double biggest = 0;
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) biggest = std::max(biggest, covder_T(s, a, b).first.norm() + covder_T(s, a, b).second.norm());
    }
    CHECK(biggest > 1e-2);
}

}
