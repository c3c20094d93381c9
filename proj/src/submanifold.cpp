#include "metagee/submanifold.hpp"

#include "metagee/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <sstream>

namespace metagee {

ImmersionSpec::ImmersionSpec(std::string name_, MetallicParams params_, AmbientStructure ambient_)
    : name(std::move(name_)), params(params_), ambient(std::move(ambient_)) {}

EvalPoint ImmersionSpec::eval_point(const Eigen::VectorXd& u) const {
    std::vector<std::string> names;
    names.reserve(parameters.size());
    for (const auto& p : parameters) names.push_back(p.name);
    EvalPoint pt(std::move(names), u);
    for (const auto& [n, v] : constants) pt.bind_constant(n, v);
    return pt;
}

int ImmersionSpec::parameter_index(std::string_view nm) const {
    for (std::size_t i = 0; i < parameters.size(); ++i) {
        if (parameters[i].name == nm) return static_cast<int>(i);
    }
    return -1;
}

std::vector<int> ImmersionSpec::parameter_indices(const std::vector<std::string>& names) const {
    std::vector<int> out;
    for (const auto& nm : names) {
        int i = parameter_index(nm);
        if (i < 0) throw Error("unknown parameter '" + nm + "'");
        out.push_back(i);
    }
    return out;
}

const Distribution& ImmersionSpec::distribution(std::string_view nm) const {
    for (const auto& d : distributions) {
        if (d.name == nm) return d;
    }
    throw Error("distribution '" + std::string(nm) + "' is not declared in " + name);
}

namespace {

std::string point_text(const Eigen::VectorXd& u) {
    std::ostringstream os;
    os.precision(6);
    os << '(';
    for (Eigen::Index i = 0; i < u.size(); ++i) os << (i ? ", " : "") << u[i];
    os << ')';
    return os.str();
}

// Gram-Schmidt with one reorthogonalisation pass.
bool orthogonalise_into(Eigen::MatrixXd& Q, int& used, Eigen::VectorXd v, double threshold) {
    for (int pass = 0; pass < 2; ++pass) {
        for (int j = 0; j < used; ++j) v -= Q.col(j).dot(v) * Q.col(j);
    }
    double nv = v.norm();
    if (nv <= threshold) return false;
    Q.col(used++) = v / nv;
    return true;
}

} // namespace

PointFrame frame_at(const ImmersionSpec& spec, const Eigen::VectorXd& u) {
    const int k = spec.k();
    const int n = spec.n();
    if (u.size() != k) throw Error("frame_at: point has " + std::to_string(u.size()) + " coordinates, expected " + std::to_string(k));

    EvalPoint pt = spec.eval_point(u);
    PointFrame f;
    f.u = u;
    f.E.resize(n, k);
    f.H.assign(static_cast<std::size_t>(k * k), Eigen::VectorXd::Zero(n));
    for (int i = 0; i < n; ++i) {
        Jet2 j = eval_jet2(spec.immersion[static_cast<std::size_t>(i)], pt, spec.params);
        f.E.row(i) = j.grad.transpose();
        for (int a = 0; a < k; ++a) {
            for (int b = 0; b < k; ++b) f.H[static_cast<std::size_t>(a * k + b)][i] = j.hess(a, b);
        }
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(f.E);
    if (svd.singularValues()(k - 1) <= 1e-8) {
        throw GeometryError("degenerate immersion at u=" + point_text(u) +
                            " (smallest singular value " + std::to_string(svd.singularValues()(k - 1)) + ")");
    }

    f.G = f.E.transpose() * f.E;
    f.G = 0.5 * (f.G + f.G.transpose());
    f.Ginv = f.G.llt().solve(Eigen::MatrixXd::Identity(k, k));

    Eigen::MatrixXd Q(n, n);
    int used = 0;
    for (int a = 0; a < k; ++a) {
        if (!orthogonalise_into(Q, used, f.E.col(a), 1e-8 * std::max(1.0, f.E.col(a).norm()))) {
            throw GeometryError("degenerate immersion at u=" + point_text(u));
        }
    }
    for (int i = 0; i < n && used < n; ++i) {
        orthogonalise_into(Q, used, Eigen::VectorXd::Unit(n, i), 1e-8);
    }
    if (used != n) throw GeometryError("could not complete a normal frame at u=" + point_text(u));
    f.Q_tan = Q.leftCols(k);
    f.Q_nor = Q.rightCols(n - k);
    f.P_tan = f.Q_tan * f.Q_tan.transpose();
    f.P_nor = Eigen::MatrixXd::Identity(n, n) - f.P_tan;
    return f;
}

Decomposition decompose(const ImmersionSpec& spec, const PointFrame& f) {
    const Eigen::VectorXd& jd = spec.ambient.diagonal();
    Decomposition d;
    Eigen::MatrixXd JE = jd.asDiagonal() * f.E;
    d.Tmat = f.Ginv * (f.E.transpose() * JE);
    d.Nvec = JE - f.E * d.Tmat;
    Eigen::MatrixXd JQ = jd.asDiagonal() * f.Q_nor;
    d.tmat = f.Ginv * (f.E.transpose() * JQ);
    d.nmat = f.Q_nor.transpose() * JQ;

    Eigen::MatrixXd J = jd.asDiagonal();
    d.T_amb = f.P_tan * J * f.P_tan;
    d.N_amb = f.P_nor * J * f.P_tan;
    d.t_amb = f.P_tan * J * f.P_nor;
    d.n_amb = f.P_nor * J * f.P_nor;
    return d;
}

Eigen::MatrixXd subspace_projector(const PointFrame& f, const Eigen::MatrixXd& D) {
    Eigen::MatrixXd B = f.E * D;
    Eigen::MatrixXd BtB = B.transpose() * B;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(BtB);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(B);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(sv.size() - 1) <= 1e-10 * std::max(1.0, sv(0))) {
        throw GeometryError("degenerate subspace basis");
    }
    return B * ldlt.solve(B.transpose());
}

Eigen::VectorXd project_subspace(const PointFrame& f, const Eigen::MatrixXd& D, const Eigen::VectorXd& v) {
    return subspace_projector(f, D) * v;
}

Eigen::MatrixXd distribution_basis(const ImmersionSpec& spec, const Distribution& D, const Eigen::VectorXd& u) {
    EvalPoint pt = spec.eval_point(u);
    Eigen::MatrixXd B(spec.k(), static_cast<Eigen::Index>(D.vectors.size()));
    for (std::size_t j = 0; j < D.vectors.size(); ++j) {
        for (int a = 0; a < spec.k(); ++a) {
            B(a, static_cast<Eigen::Index>(j)) = eval_value(D.vectors[j][static_cast<std::size_t>(a)], pt, spec.params);
        }
    }
    return B;
}

Eigen::MatrixXd coordinate_basis(int k, const std::vector<int>& indices) {
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(k, static_cast<Eigen::Index>(indices.size()));
    for (std::size_t j = 0; j < indices.size(); ++j) B(indices[j], static_cast<Eigen::Index>(j)) = 1.0;
    return B;
}

std::vector<Eigen::VectorXd> grid_points(const ImmersionSpec& spec, int points_per_param) {
    const int N = points_per_param > 0 ? points_per_param : spec.grid;
    const int k = spec.k();
    std::size_t total = 1;
    for (int a = 0; a < k; ++a) total *= static_cast<std::size_t>(N);
    std::vector<Eigen::VectorXd> out;
    out.reserve(total);
    std::vector<int> idx(static_cast<std::size_t>(k), 0);
    for (std::size_t c = 0; c < total; ++c) {
        Eigen::VectorXd u(k);
        for (int a = 0; a < k; ++a) {
            const auto& p = spec.parameters[static_cast<std::size_t>(a)];
            u[a] = p.lo + (idx[static_cast<std::size_t>(a)] + 0.5) / N * (p.hi - p.lo);
        }
        out.push_back(std::move(u));
        for (int a = k - 1; a >= 0; --a) {
            if (++idx[static_cast<std::size_t>(a)] < N) break;
            idx[static_cast<std::size_t>(a)] = 0;
        }
    }
    return out;
}

namespace {

double max_col_norm(const Eigen::MatrixXd& M) {
    double r = 0.0;
    for (Eigen::Index j = 0; j < M.cols(); ++j) r = std::max(r, M.col(j).norm());
    return r;
}

} // namespace

DecompositionResiduals decomposition_residuals(const ImmersionSpec& spec, const PointFrame& f,
                                               const Decomposition& d) {
    const double p = static_cast<double>(spec.params.p());
    const double q = static_cast<double>(spec.params.q());
    const int n = f.n();
    const Eigen::MatrixXd J = spec.ambient.diagonal().asDiagonal();
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);

    DecompositionResiduals r;
    r.reconstruction = max_col_norm(J * f.E - f.E * d.Tmat - d.Nvec);

    Eigen::MatrixXd GT = f.G * d.Tmat;
    r.sym_T = (GT - GT.transpose()).cwiseAbs().maxCoeff();
    if (d.nmat.size() > 0) {
        r.sym_n = (d.nmat - d.nmat.transpose()).cwiseAbs().maxCoeff();
        Eigen::MatrixXd lhs = (f.Q_nor.transpose() * d.Nvec).transpose();
        r.adjoint_Nt = (lhs - f.G * d.tmat).cwiseAbs().maxCoeff();
    }

    const auto& T = d.T_amb;
    const auto& N = d.N_amb;
    const auto& t = d.t_amb;
    const auto& nn = d.n_amb;
    r.T_square = max_col_norm((T * T - p * T - q * I + t * N) * f.E);
    r.N_split = max_col_norm((p * N - N * T - nn * N) * f.E);
    if (f.Q_nor.cols() > 0) {
        r.n_square = max_col_norm((nn * nn - p * nn - q * I + N * t) * f.Q_nor);
        r.t_split = max_col_norm((p * t - T * t - t * nn) * f.Q_nor);
    }
    return r;
}

} // namespace metagee
