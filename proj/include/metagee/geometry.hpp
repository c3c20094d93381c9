#pragma once

#include "metagee/identity.hpp"
#include "metagee/submanifold.hpp"

#include <Eigen/Core>

#include <functional>
#include <utility>
#include <vector>

namespace metagee {

/// Christoffel symbols and second fundamental form at a point.
struct ConnectionData {
    int k = 0;
    /// Gamma[a*k + b] holds Gamma^c_ab for c = 0..k-1.
    std::vector<Eigen::VectorXd> Gamma;
    /// hten[a*k + b] holds h(e_a, e_b) in the Q_nor basis.
    std::vector<Eigen::VectorXd> hten;

    [[nodiscard]] const Eigen::VectorXd& gamma(int a, int b) const { return Gamma[static_cast<std::size_t>(a * k + b)]; }
    [[nodiscard]] const Eigen::VectorXd& h(int a, int b) const { return hten[static_cast<std::size_t>(a * k + b)]; }
};

ConnectionData connection_at(const ImmersionSpec& spec, const PointFrame& f);

/// A_V in the coordinate frame, V given in Q_nor coordinates.
Eigen::MatrixXd shape_operator(const ConnectionData& c, const PointFrame& f, const Eigen::VectorXd& V);

// Ambient-valued helpers. Tangent arguments are frame coordinates unless
// the name says otherwise.

/// h(x, y) as an ambient normal vector.
Eigen::VectorXd sff(const PointFrame& f, const Eigen::VectorXd& x, const Eigen::VectorXd& y);
/// nabla_{e_a} e_b as an ambient tangent vector.
Eigen::VectorXd levi_civita(const PointFrame& f, int a, int b);
/// A_V x for an ambient normal V.
Eigen::VectorXd shape_apply(const PointFrame& f, const Eigen::VectorXd& V, const Eigen::VectorXd& x);

using NormalField = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// n x k matrix whose column a is nabla-perp_{e_a} V, by central differences.
Eigen::MatrixXd normal_connection(const ImmersionSpec& spec, const Eigen::VectorXd& u, const NormalField& V,
                                  double h = kFdStep);

/// Frame and decomposition together.
struct PointGeometry {
    PointFrame frame;
    Decomposition dec;
};

PointGeometry geometry_at(const ImmersionSpec& spec, const Eigen::VectorXd& u);

/// Geometry at u and at u +- h along every coordinate.
struct Stencil {
    double h = kFdStep;
    PointGeometry center;
    std::vector<PointGeometry> plus;
    std::vector<PointGeometry> minus;

    /// Central difference of an ambient quantity along coordinate a.
    template <class F>
    [[nodiscard]] auto diff(int a, F&& quantity) const {
        const auto& up = plus[static_cast<std::size_t>(a)];
        const auto& dn = minus[static_cast<std::size_t>(a)];
        return ((quantity(up) - quantity(dn)) / (2.0 * h)).eval();
    }
};

/// Throws GeometryError when u is closer than 2h to a range boundary.
Stencil make_stencil(const ImmersionSpec& spec, const Eigen::VectorXd& u, double h = kFdStep);

/// (nabla_{e_a} T) e_b and (nablabar_{e_a} N) e_b from their definitions.
std::pair<Eigen::VectorXd, Eigen::VectorXd> covder_T(const Stencil& s, int a, int b);
std::pair<Eigen::VectorXd, Eigen::VectorXd> covder_T(const ImmersionSpec& spec, const Eigen::VectorXd& u, int a,
                                                     int b);
/// (nabla_{e_a} t) V and (nablabar_{e_a} n) V for the normal field V = P_nor axis_i.
std::pair<Eigen::VectorXd, Eigen::VectorXd> covder_t(const Stencil& s, int a, int i);

/// Per-point maxima of the covariant-derivative identities.
struct ConnectionResiduals {
    double def_T = 0.0;    // both routes to (nabla T)Y agree
    double def_N = 0.0;
    double def_t = 0.0;
    double def_n = 0.0;
    double sym_covT = 0.0; // g((nabla_X T)Y, Z) = g(Y, (nabla_X T)Z)
    double covT = 0.0;     // (nabla_X T)Y = A_{NY}X + t h(X,Y)
    double covN = 0.0;     // (nablabar_X N)Y = n h(X,Y) - h(X,TY)
    double covt = 0.0;     // (nabla_X t)V = A_{nV}X - T A_V X
    double covn = 0.0;     // (nablabar_X n)V = -h(X,tV) - N A_V X
    double mixed = 0.0;    // g((nablabar_X N)Y, V) = g((nabla_X t)V, Y)

    void merge(const ConnectionResiduals& o);
};

ConnectionResiduals connection_residuals(const Stencil& s);

/// Hessian split E Gamma_ab + Q_nor h_ab = H_ab and metric compatibility of
/// Gamma against analytic metric derivatives, per point.
struct ConnectionConsistency {
    double gauss_split = 0.0;
    double metric_compat = 0.0;
};
ConnectionConsistency connection_consistency(const PointFrame& f, const ConnectionData& c);

/// dG_ab/du_c from the immersion jets: <H_ac, e_b> + <e_a, H_bc>.
Eigen::MatrixXd metric_derivative(const PointFrame& f, int c);

} // namespace metagee
