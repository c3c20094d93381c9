#pragma once

#include "metagee/geometry.hpp"
#include "metagee/submanifold.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace metagee {

enum class DistType { Invariant, AntiInvariant, ProperSlant, NonSlant };
std::string_view dist_type_name(DistType t);

/// Angle between J(E X) and span(E D), or the tangent space when D is null.
struct AngleSample {
    double theta = 0.0;
    /// Unclamped |proj v| / |v|; must lie in [0, 1 + 1e-12].
    double cos_raw = 0.0;
};

AngleSample angle_sample(const PointFrame& f, const Decomposition& d, const Eigen::VectorXd& X,
                         const Eigen::MatrixXd* D = nullptr);
double slant_angle_vector(const PointFrame& f, const Decomposition& d, const Eigen::VectorXd& X,
                          const Eigen::MatrixXd* D = nullptr);

struct AngleReport {
    std::string distribution;
    std::vector<double> samples;
    /// Mean angle at each grid point, in grid order.
    std::vector<double> per_point;
    double mean = 0.0;
    double max_dev = 0.0;
    double max_cos_raw = 0.0;
    bool constant = false;
    /// max |P_tan J X| / |J X| over basis vectors: zero for anti-invariant.
    double tangent_ratio = 0.0;
    /// max |J X - P_D J X| / |J X| over basis vectors: zero for invariant.
    double escape_ratio = 0.0;
    DistType type = DistType::NonSlant;
};

/// Seed for the pseudo-random combinations: FNV-1a of the spec name, or
/// the METAGEE_SEED environment variable when set.
std::uint64_t sampling_seed(const std::string& spec_name);

using BasisAt = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

/// Samples over the grid: each basis vector plus 8 random unit combinations.
AngleReport subspace_report(const ImmersionSpec& spec, const std::string& name, const BasisAt& basis,
                            int points_per_param = 0);
AngleReport angle_report(const ImmersionSpec& spec, std::string_view distribution, int points_per_param = 0);
/// Type of the subspace spanned by the named coordinate directions.
AngleReport coordinate_report(const ImmersionSpec& spec, const std::vector<std::string>& names,
                              int points_per_param = 0);

enum class Label {
    Invariant,
    AntiInvariant,
    ProperSlant,
    SemiInvariant,
    SemiSlant,
    HemiSlant,
    BiSlant,
    Unclassified
};
std::string_view label_name(Label l);

struct Classification {
    Label label = Label::Unclassified;
    std::vector<AngleReport> angles;
    /// max |g(E d1, E d2)| over unit basis vectors of the two distributions.
    double orthogonality = 0.0;
    /// max |g(J E d1, E d2)| over unit basis vectors.
    double cross_J = 0.0;
    double min_span_sv = 0.0;
    std::string diagnostics;
};

Classification classify(const ImmersionSpec& spec, int points_per_param = 0);

/// Pointwise slant-identity residuals over the basis vectors of D (k x m).
/// g(TX,TY) - c2 [p g(X,TY) + q g(X,Y)]
double slant_TT_residual(const ImmersionSpec& spec, const PointGeometry& g, const Eigen::MatrixXd& D, double cos2);
/// g(NX,NY) - (1 - c2) [p g(X,TY) + q g(X,Y)]
double slant_NN_residual(const ImmersionSpec& spec, const PointGeometry& g, const Eigen::MatrixXd& D, double cos2);
/// |T^2 X - c2 (p T X + q X)|
double slant_T2_residual(const ImmersionSpec& spec, const PointGeometry& g, const Eigen::MatrixXd& D, double cos2);
/// |(nabla_X T^2) Y - p c2 (nabla_X T) Y| over coordinate fields.
double slant_covT2_residual(const ImmersionSpec& spec, const Stencil& s, double cos2);

} // namespace metagee
