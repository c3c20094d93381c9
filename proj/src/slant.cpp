#include "metagee/slant.hpp"

#include "metagee/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>

namespace metagee {

std::string_view dist_type_name(DistType t) {
    switch (t) {
    case DistType::Invariant: return "invariant";
    case DistType::AntiInvariant: return "anti-invariant";
    case DistType::ProperSlant: return "proper slant";
    case DistType::NonSlant: return "not slant";
    }
    return "?";
}

std::string_view label_name(Label l) {
    switch (l) {
    case Label::Invariant: return "INVARIANT";
    case Label::AntiInvariant: return "ANTI-INVARIANT";
    case Label::ProperSlant: return "PROPER-SLANT";
    case Label::SemiInvariant: return "SEMI-INVARIANT";
    case Label::SemiSlant: return "SEMI-SLANT";
    case Label::HemiSlant: return "HEMI-SLANT";
    case Label::BiSlant: return "BI-SLANT";
    case Label::Unclassified: return "UNCLASSIFIED";
    }
    return "?";
}

AngleSample angle_sample(const PointFrame& f, const Decomposition& d, const Eigen::VectorXd& X,
                         const Eigen::MatrixXd* D) {
    Eigen::VectorXd tangential = f.E * (d.Tmat * X);
    Eigen::VectorXd v = tangential + d.Nvec * X;
    const double nv = v.norm();
    if (X.norm() == 0.0 || nv == 0.0) throw Error("slant angle of a zero vector");
    Eigen::VectorXd pv = D ? project_subspace(f, *D, v) : tangential;
    // atan2 keeps full precision near 0 and pi/2, where acos does not.
    AngleSample s;
    s.theta = std::atan2((v - pv).norm(), pv.norm());
    s.cos_raw = pv.norm() / nv;
    return s;
}

double slant_angle_vector(const PointFrame& f, const Decomposition& d, const Eigen::VectorXd& X,
                          const Eigen::MatrixXd* D) {
    return angle_sample(f, d, X, D).theta;
}

std::uint64_t sampling_seed(const std::string& spec_name) {
    if (const char* env = std::getenv("METAGEE_SEED"); env && *env) {
        return std::strtoull(env, nullptr, 0);
    }
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : spec_name) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

namespace {

// Mapped by hand so the stream is identical across standard libraries.
double uniform_pm1(std::mt19937_64& rng) {
    double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return 2.0 * u - 1.0;
}

constexpr int kRandomCombos = 8;

} // namespace

AngleReport subspace_report(const ImmersionSpec& spec, const std::string& name, const BasisAt& basis,
                            int points_per_param) {
    AngleReport rep;
    rep.distribution = name;
    std::mt19937_64 rng(sampling_seed(spec.name));
    for (const auto& u : grid_points(spec, points_per_param)) {
        PointGeometry g = geometry_at(spec, u);
        Eigen::MatrixXd D = basis(u);
        Eigen::MatrixXd PD = subspace_projector(g.frame, D);
        double point_sum = 0.0;
        int point_count = 0;
        auto take = [&](const Eigen::VectorXd& X) {
            AngleSample s = angle_sample(g.frame, g.dec, X, &D);
            rep.samples.push_back(s.theta);
            rep.max_cos_raw = std::max(rep.max_cos_raw, s.cos_raw);
            point_sum += s.theta;
            ++point_count;
        };
        for (Eigen::Index j = 0; j < D.cols(); ++j) {
            Eigen::VectorXd X = D.col(j);
            take(X);
            Eigen::VectorXd v = apply_J(spec.ambient, g.frame.E * X);
            const double nv = v.norm();
            rep.tangent_ratio = std::max(rep.tangent_ratio, (g.frame.P_tan * v).norm() / nv);
            rep.escape_ratio = std::max(rep.escape_ratio, (v - PD * v).norm() / nv);
        }
        for (int r = 0; r < kRandomCombos; ++r) {
            Eigen::VectorXd c(D.cols());
            for (Eigen::Index j = 0; j < c.size(); ++j) c[j] = uniform_pm1(rng);
            if (c.norm() < 1e-6) continue;
            Eigen::VectorXd X = D * (c / c.norm());
            if ((g.frame.E * X).norm() < 1e-12) continue;
            take(X);
        }
        rep.per_point.push_back(point_sum / std::max(1, point_count));
    }
    if (rep.samples.empty()) throw Error("no angle samples for " + name);

    double sum = 0.0;
    for (double t : rep.samples) sum += t;
    rep.mean = sum / static_cast<double>(rep.samples.size());
    for (double t : rep.samples) rep.max_dev = std::max(rep.max_dev, std::abs(t - rep.mean));
    rep.constant = rep.max_dev <= kAngleTol;

    // Ties at 0 and pi/2 go to the degenerate label.
    if (!rep.constant) {
        rep.type = DistType::NonSlant;
    } else if (rep.mean <= kAngleTol) {
        rep.type = DistType::Invariant;
    } else if (rep.tangent_ratio <= 1e-9 || std::abs(rep.mean - std::numbers::pi / 2) <= kAngleTol) {
        rep.type = DistType::AntiInvariant;
    } else {
        rep.type = DistType::ProperSlant;
    }
    return rep;
}

AngleReport angle_report(const ImmersionSpec& spec, std::string_view distribution, int points_per_param) {
    const Distribution& D = spec.distribution(distribution);
    return subspace_report(
        spec, D.name, [&](const Eigen::VectorXd& u) { return distribution_basis(spec, D, u); }, points_per_param);
}

AngleReport coordinate_report(const ImmersionSpec& spec, const std::vector<std::string>& names, int points_per_param) {
    Eigen::MatrixXd B = coordinate_basis(spec.k(), spec.parameter_indices(names));
    std::string label;
    for (const auto& n : names) label += (label.empty() ? "" : ",") + n;
    return subspace_report(spec, label, [B](const Eigen::VectorXd&) { return B; }, points_per_param);
}

namespace {

Label pair_label(DistType a, DistType b) {
    if (a == DistType::NonSlant || b == DistType::NonSlant) return Label::Unclassified;
    auto has = [&](DistType t) { return a == t || b == t; };
    if (a == b) {
        switch (a) {
        case DistType::Invariant: return Label::Invariant;
        case DistType::AntiInvariant: return Label::AntiInvariant;
        default: return Label::BiSlant;
        }
    }
    if (has(DistType::Invariant) && has(DistType::AntiInvariant)) return Label::SemiInvariant;
    if (has(DistType::Invariant)) return Label::SemiSlant;
    return Label::HemiSlant;
}

Label single_label(DistType t) {
    switch (t) {
    case DistType::Invariant: return Label::Invariant;
    case DistType::AntiInvariant: return Label::AntiInvariant;
    case DistType::ProperSlant: return Label::ProperSlant;
    default: return Label::Unclassified;
    }
}

} // namespace

Classification classify(const ImmersionSpec& spec, int points_per_param) {
    Classification c;
    if (spec.distributions.empty() || spec.distributions.size() > 2) {
        c.diagnostics = "expected one or two distributions, found " + std::to_string(spec.distributions.size());
        return c;
    }
    for (const auto& D : spec.distributions) c.angles.push_back(angle_report(spec, D.name, points_per_param));

    // Spanning, orthogonality and J D1 perp D2 over the grid.
    c.min_span_sv = std::numeric_limits<double>::infinity();
    for (const auto& u : grid_points(spec, points_per_param)) {
        PointFrame f = frame_at(spec, u);
        std::vector<Eigen::MatrixXd> B;
        for (const auto& D : spec.distributions) {
            Eigen::MatrixXd A = f.E * distribution_basis(spec, D, u);
            for (Eigen::Index j = 0; j < A.cols(); ++j) A.col(j).normalize();
            B.push_back(A);
        }
        Eigen::MatrixXd all(spec.n(), 0);
        for (const auto& A : B) {
            Eigen::MatrixXd tmp(spec.n(), all.cols() + A.cols());
            tmp << all, A;
            all = tmp;
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(all);
        double smallest = all.cols() >= spec.k() ? svd.singularValues()(spec.k() - 1) : 0.0;
        c.min_span_sv = std::min(c.min_span_sv, smallest);
        if (B.size() == 2) {
            c.orthogonality = std::max(c.orthogonality, (B[0].transpose() * B[1]).cwiseAbs().maxCoeff());
            Eigen::MatrixXd JB0 = spec.ambient.diagonal().asDiagonal() * B[0];
            c.cross_J = std::max(c.cross_J, (JB0.transpose() * B[1]).cwiseAbs().maxCoeff());
        }
    }

    if (c.min_span_sv <= 1e-8) {
        c.diagnostics = "distributions do not span the tangent space";
        return c;
    }
    if (c.orthogonality > 1e-9) {
        c.diagnostics = "distributions are not orthogonal (max |g| = " + std::to_string(c.orthogonality) + ")";
        return c;
    }
    if (c.cross_J > 1e-9) {
        c.diagnostics = "J D1 is not orthogonal to D2 (max |g(JX,Y)| = " + std::to_string(c.cross_J) + ")";
        return c;
    }

    if (c.angles.size() == 1) {
        c.label = single_label(c.angles[0].type);
    } else {
        const auto& a = c.angles[0];
        const auto& b = c.angles[1];
        c.label = pair_label(a.type, b.type);
        // Equal angles with vanishing cross terms merge into one slant submanifold.
        if (c.label == Label::BiSlant && std::abs(a.mean - b.mean) <= kAngleTol) c.label = Label::ProperSlant;
    }
    if (c.label == Label::Unclassified) {
        for (const auto& a : c.angles) {
            if (a.type == DistType::NonSlant) {
                c.diagnostics += a.distribution + " is not slant (angle spread " + std::to_string(a.max_dev) + " rad); ";
            }
        }
    }
    return c;
}

namespace {

struct SlantForms {
    Eigen::MatrixXd X;   // n x m ambient basis of D
    Eigen::MatrixXd TX;
    Eigen::MatrixXd NX;
};

SlantForms slant_forms(const PointGeometry& g, const Eigen::MatrixXd& D) {
    SlantForms s;
    s.X = g.frame.E * D;
    s.TX = g.frame.E * (g.dec.Tmat * D);
    s.NX = g.dec.Nvec * D;
    return s;
}

} // namespace

double slant_TT_residual(const ImmersionSpec& spec, const PointGeometry& g, const Eigen::MatrixXd& D, double cos2) {
    const double p = static_cast<double>(spec.params.p());
    const double q = static_cast<double>(spec.params.q());
    SlantForms s = slant_forms(g, D);
    Eigen::MatrixXd lhs = s.TX.transpose() * s.TX;
    Eigen::MatrixXd rhs = cos2 * (p * s.X.transpose() * s.TX + q * s.X.transpose() * s.X);
    return (lhs - rhs).cwiseAbs().maxCoeff();
}

double slant_NN_residual(const ImmersionSpec& spec, const PointGeometry& g, const Eigen::MatrixXd& D, double cos2) {
    const double p = static_cast<double>(spec.params.p());
    const double q = static_cast<double>(spec.params.q());
    SlantForms s = slant_forms(g, D);
    Eigen::MatrixXd lhs = s.NX.transpose() * s.NX;
    Eigen::MatrixXd rhs = (1.0 - cos2) * (p * s.X.transpose() * s.TX + q * s.X.transpose() * s.X);
    return (lhs - rhs).cwiseAbs().maxCoeff();
}

double slant_T2_residual(const ImmersionSpec& spec, const PointGeometry& g, const Eigen::MatrixXd& D, double cos2) {
    const double p = static_cast<double>(spec.params.p());
    const double q = static_cast<double>(spec.params.q());
    const Eigen::MatrixXd& T = g.dec.Tmat;
    Eigen::MatrixXd diff = g.frame.E * ((T * T - cos2 * (p * T + q * Eigen::MatrixXd::Identity(T.rows(), T.cols()))) * D);
    double r = 0.0;
    for (Eigen::Index j = 0; j < diff.cols(); ++j) r = std::max(r, diff.col(j).norm());
    return r;
}

double slant_covT2_residual(const ImmersionSpec& spec, const Stencil& s, double cos2) {
    const double p = static_cast<double>(spec.params.p());
    const PointFrame& f = s.center.frame;
    const Eigen::MatrixXd T2 = s.center.dec.T_amb * s.center.dec.T_amb;
    double r = 0.0;
    for (int a = 0; a < f.k(); ++a) {
        for (int b = 0; b < f.k(); ++b) {
            Eigen::VectorXd d = s.diff(a, [b](const PointGeometry& g) {
                return (g.dec.T_amb * (g.dec.T_amb * g.frame.E.col(b))).eval();
            });
            Eigen::VectorXd covT2 = f.P_tan * d - T2 * levi_civita(f, a, b);
            Eigen::VectorXd covT = covder_T(s, a, b).first;
            r = std::max(r, (covT2 - p * cos2 * covT).norm());
        }
    }
    return r;
}

} // namespace metagee
