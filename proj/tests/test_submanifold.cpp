#include "helpers.hpp"

#include "metagee/error.hpp"
#include "metagee/submanifold.hpp"

#include <doctest.h>

#include <cmath>

using namespace metagee;
using testing_helpers::max_abs;

namespace {

const char* kDegenerate = R"json({
  "name": "degenerate", "p": 1, "q": 1, "ambient_dim": 3,
  "structure": ["sigma", "sigbar", "sigma"],
  "parameters": [{"name": "u", "range": [0, 1]}, {"name": "v", "range": [0, 1]}],
  "immersion": ["u + v", "u + v", "0"]
})json";

} // namespace

TEST_SUITE("submanifold") {

TEST_CASE("grid points are cell centres, first parameter slowest") {
    auto spec = load_fixture("golden_r5_semiinvariant");
    auto pts = grid_points(spec, 3);
    REQUIRE(pts.size() == 27);
    CHECK(pts[0][0] == doctest::Approx(0.5 + 1.5 / 6));
    CHECK(pts[0][1] == doctest::Approx(0.2 + 1.1 / 6));
    CHECK(pts[1][0] == pts[0][0]);
    CHECK(pts[1][2] > pts[0][2]);
    CHECK(pts[9][0] > pts[8][0]);
    CHECK(grid_points(spec).size() == 125);
}

TEST_CASE("jacobian matches the hand derivative") {
    auto spec = load_fixture("metallic_r5_semiinvariant");
    const double f = 1.3, a = 0.6, b = 0.9;
    PointFrame fr = frame_at(spec, Eigen::Vector3d(f, a, b));
    const double c = std::sqrt(3 * spec.params.sigma() / 2);
    Eigen::MatrixXd E(5, 3);
    E << std::sin(a), f * std::cos(a), 0, std::cos(a), -f * std::sin(a), 0, std::sin(b), 0, f * std::cos(b),
        std::cos(b), 0, -f * std::sin(b), c, 0, 0;
    CHECK(max_abs(fr.E - E) <= 1e-14);
    // d^2/df dalpha of the first component is cos(alpha).
    CHECK(fr.hess(0, 1)[0] == doctest::Approx(std::cos(a)));
    CHECK(fr.hess(1, 1)[0] == doctest::Approx(-f * std::sin(a)));
    CHECK(max_abs(fr.G - E.transpose() * E) <= 1e-13);
}

TEST_CASE("frames are orthonormal and projectors consistent") {
    for (const auto& name : builtin_names()) {
        auto spec = load_fixture(name);
        for (const auto& u : grid_points(spec, 2)) {
            PointFrame f = frame_at(spec, u);
            const int n = f.n(), k = f.k();
            Eigen::MatrixXd Q(n, n);
            Q << f.Q_tan, f.Q_nor;
            CHECK(max_abs(Q.transpose() * Q - Eigen::MatrixXd::Identity(n, n)) <= 1e-12);
            CHECK(max_abs(f.P_tan - testing_helpers::qr_projector(f.E)) <= 1e-12);
            CHECK(max_abs(f.P_tan * f.P_tan - f.P_tan) <= 1e-12);
            CHECK(max_abs(f.P_nor * f.E) <= 1e-12);
            CHECK(max_abs(f.G * f.Ginv - Eigen::MatrixXd::Identity(k, k)) <= 1e-10);
        }
    }
}

TEST_CASE("normal completion starts from the smallest axis") {
    auto spec = load_fixture("golden_r4_bislant");
    PointFrame f = frame_at(spec, Eigen::Vector2d(1.0, 1.0));
    // The first normal vector is the normalised component of e_1 off the tangent plane.
    Eigen::VectorXd e1 = Eigen::VectorXd::Unit(4, 0);
    Eigen::VectorXd r = e1 - f.P_tan * e1;
    CHECK(std::abs(std::abs(f.Q_nor.col(0).dot(r.normalized())) - 1.0) <= 1e-12);
}

TEST_CASE("degenerate immersion names the point") {
    auto spec = parse_spec(R"json({
      "name": "ok", "p": 1, "q": 1, "ambient_dim": 3,
      "structure": ["sigma", "sigbar", "sigma"],
      "parameters": [{"name": "u", "range": [0, 1]}, {"name": "v", "range": [0, 1]}],
      "immersion": ["u", "v", "u*v"]})json");
    CHECK_NOTHROW(frame_at(spec, Eigen::Vector2d(0.5, 0.5)));
    try {
        parse_spec(kDegenerate);
        FAIL("expected GeometryError");
    } catch (const GeometryError& e) {
        CHECK(std::string(e.what()).find("degenerate immersion at u=(") != std::string::npos);
    }
}

TEST_CASE("decomposition reconstructs J and satisfies the algebraic identities") {
    for (const auto& name : fixture_names()) {
        auto spec = load_fixture(name);
        const Eigen::MatrixXd J = spec.ambient.matrix();
        for (const auto& u : grid_points(spec, 2)) {
            PointFrame f = frame_at(spec, u);
            Decomposition d = decompose(spec, f);
            CHECK(max_abs(J * f.E - f.E * d.Tmat - d.Nvec) <= 1e-10);
            const Eigen::MatrixXd P = testing_helpers::qr_projector(f.E);
            const Eigen::MatrixXd Pn = Eigen::MatrixXd::Identity(f.n(), f.n()) - P;
            CHECK(max_abs(d.T_amb - P * J * P) <= 1e-10);
            CHECK(max_abs(d.N_amb - Pn * J * P) <= 1e-10);
            CHECK(max_abs(d.t_amb - P * J * Pn) <= 1e-10);
            CHECK(max_abs(d.n_amb - Pn * J * Pn) <= 1e-10);
            auto r = decomposition_residuals(spec, f, d);
            CHECK(r.reconstruction <= 1e-10);
            CHECK(r.sym_T <= 1e-10);
            CHECK(r.sym_n <= 1e-10);
            CHECK(r.adjoint_Nt <= 1e-10);
            CHECK(r.T_square <= 1e-9);
            CHECK(r.N_split <= 1e-9);
            CHECK(r.n_square <= 1e-9);
            CHECK(r.t_split <= 1e-9);
        }
    }
}

TEST_CASE("subspace projection") {
    auto spec = load_fixture("golden_r8_semislant");
    Eigen::Vector4d u(1.1, 0.7, 0.5, 0.8);
    PointFrame f = frame_at(spec, u);
    Eigen::MatrixXd D = coordinate_basis(4, {0, 1});
    CHECK(D.rows() == 4);
    CHECK(D.cols() == 2);
    Eigen::VectorXd inside = f.E * Eigen::Vector4d(0.3, -2, 0, 0);
    CHECK((project_subspace(f, D, inside) - inside).norm() <= 1e-12);
    Eigen::VectorXd across = f.E * Eigen::Vector4d(0, 0, 1, 0);
    CHECK(project_subspace(f, D, across).norm() <= 1e-12);
    CHECK(max_abs(distribution_basis(spec, spec.distribution("D1"), u) - D) == 0.0);
    CHECK_THROWS_AS(subspace_projector(f, Eigen::MatrixXd::Zero(4, 1)), GeometryError);
}

}
