#pragma once

#include "metagee/ambient.hpp"
#include "metagee/exprlang.hpp"

#include <Eigen/Core>

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace metagee {

struct Parameter {
    std::string name;
    double lo = 0.0;
    double hi = 0.0;
};

/// A distribution given by coefficient vectors over the coordinate frame.
struct Distribution {
    std::string name;
    std::vector<std::vector<Expr>> vectors;
};

struct WarpedDecl {
    std::vector<std::string> base;
    std::vector<std::string> fiber;
    Expr warping = Expr::literal(1);
    std::string warping_text;
};

/// Parametric immersion U in R^k -> R^n with its ambient structure.
struct ImmersionSpec {
    ImmersionSpec(std::string name, MetallicParams params, AmbientStructure ambient);

    std::string name;
    MetallicParams params;
    AmbientStructure ambient;
    std::vector<Parameter> parameters;
    std::vector<std::pair<std::string, double>> constants;
    std::vector<Expr> immersion;
    std::vector<Distribution> distributions;
    std::optional<WarpedDecl> warped;
    int grid = 5;

    [[nodiscard]] int k() const noexcept { return static_cast<int>(parameters.size()); }
    [[nodiscard]] int n() const noexcept { return ambient.n(); }

    [[nodiscard]] EvalPoint eval_point(const Eigen::VectorXd& u) const;
    [[nodiscard]] int parameter_index(std::string_view name) const;
    [[nodiscard]] std::vector<int> parameter_indices(const std::vector<std::string>& names) const;
    [[nodiscard]] const Distribution& distribution(std::string_view name) const;
};

/// Geometric state at one parameter point.
struct PointFrame {
    Eigen::VectorXd u;
    /// n x k Jacobian, columns e_a = di/du_a.
    Eigen::MatrixXd E;
    /// H[a*k + b] = d^2 i / du_a du_b, an ambient vector.
    std::vector<Eigen::VectorXd> H;
    Eigen::MatrixXd G;
    Eigen::MatrixXd Ginv;
    Eigen::MatrixXd Q_tan;
    Eigen::MatrixXd Q_nor;
    Eigen::MatrixXd P_tan;
    Eigen::MatrixXd P_nor;

    [[nodiscard]] int k() const noexcept { return static_cast<int>(E.cols()); }
    [[nodiscard]] int n() const noexcept { return static_cast<int>(E.rows()); }
    [[nodiscard]] const Eigen::VectorXd& hess(int a, int b) const { return H[static_cast<std::size_t>(a * k() + b)]; }
    /// Coordinates of a tangent ambient vector in the frame e_a.
    [[nodiscard]] Eigen::VectorXd coords(const Eigen::VectorXd& v) const { return Ginv * (E.transpose() * v); }
};

/// T, N, t, n at a point, in coordinate and in ambient form.
struct Decomposition {
    /// k x k: J e_a = E Tmat[:,a] + Nvec[:,a].
    Eigen::MatrixXd Tmat;
    /// n x k normal parts of J e_a.
    Eigen::MatrixXd Nvec;
    /// k x (n-k): t(nu_alpha) = E tmat[:,alpha] for the columns nu of Q_nor.
    Eigen::MatrixXd tmat;
    /// (n-k) x (n-k) matrix of n on Q_nor.
    Eigen::MatrixXd nmat;
    /// n x n operators P_tan J P_tan, P_nor J P_tan, P_tan J P_nor, P_nor J P_nor.
    Eigen::MatrixXd T_amb;
    Eigen::MatrixXd N_amb;
    Eigen::MatrixXd t_amb;
    Eigen::MatrixXd n_amb;
};

PointFrame frame_at(const ImmersionSpec& spec, const Eigen::VectorXd& u);
Decomposition decompose(const ImmersionSpec& spec, const PointFrame& f);

/// Orthogonal projection of v onto span(E D), D given as k x m coordinates.
Eigen::VectorXd project_subspace(const PointFrame& f, const Eigen::MatrixXd& D, const Eigen::VectorXd& v);
/// Ambient projector onto span(E D).
Eigen::MatrixXd subspace_projector(const PointFrame& f, const Eigen::MatrixXd& D);

/// k x m coefficient matrix of a distribution at u.
Eigen::MatrixXd distribution_basis(const ImmersionSpec& spec, const Distribution& D, const Eigen::VectorXd& u);
/// Coordinate vectors of the named parameters as a k x m matrix.
Eigen::MatrixXd coordinate_basis(int k, const std::vector<int>& indices);

/// Interior sample points (i + 1/2)/N of each range, first parameter slowest.
std::vector<Eigen::VectorXd> grid_points(const ImmersionSpec& spec, int points_per_param = 0);

/// Max residuals of the pointwise algebraic identities relating T, N, t, n.
struct DecompositionResiduals {
    double reconstruction = 0.0;
    double sym_T = 0.0;       // g(TX,Y) = g(X,TY)
    double sym_n = 0.0;       // g(nU,V) = g(U,nV)
    double adjoint_Nt = 0.0;  // g(NX,V) = g(X,tV)
    double T_square = 0.0;    // T^2 = pT + q - tN
    double N_split = 0.0;     // pN = NT + nN
    double n_square = 0.0;    // n^2 = pn + q - Nt
    double t_split = 0.0;     // pt = Tt + tn
};

DecompositionResiduals decomposition_residuals(const ImmersionSpec& spec, const PointFrame& f,
                                               const Decomposition& d);

} // namespace metagee
