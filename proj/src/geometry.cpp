#include "metagee/geometry.hpp"

#include "metagee/error.hpp"

#include <algorithm>

namespace metagee {

ConnectionData connection_at(const ImmersionSpec& /*spec*/, const PointFrame& f) {
    const int k = f.k();
    ConnectionData c;
    c.k = k;
    c.Gamma.reserve(static_cast<std::size_t>(k * k));
    c.hten.reserve(static_cast<std::size_t>(k * k));
    for (int a = 0; a < k; ++a) {
        for (int b = 0; b < k; ++b) {
            const Eigen::VectorXd& H = f.hess(a, b);
            c.Gamma.push_back(f.Ginv * (f.E.transpose() * H));
            c.hten.push_back(f.Q_nor.transpose() * H);
        }
    }
    return c;
}

Eigen::MatrixXd shape_operator(const ConnectionData& c, const PointFrame& f, const Eigen::VectorXd& V) {
    const int k = f.k();
    Eigen::MatrixXd M(k, k);
    for (int a = 0; a < k; ++a) {
        for (int b = 0; b < k; ++b) M(a, b) = c.h(a, b).dot(V);
    }
    return f.Ginv * M;
}

Eigen::VectorXd sff(const PointFrame& f, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(f.n());
    for (int a = 0; a < f.k(); ++a) {
        if (x[a] == 0.0) continue;
        for (int b = 0; b < f.k(); ++b) {
            if (y[b] != 0.0) acc += x[a] * y[b] * f.hess(a, b);
        }
    }
    return f.P_nor * acc;
}

Eigen::VectorXd levi_civita(const PointFrame& f, int a, int b) { return f.P_tan * f.hess(a, b); }

Eigen::VectorXd shape_apply(const PointFrame& f, const Eigen::VectorXd& V, const Eigen::VectorXd& x) {
    const int k = f.k();
    // <h(e_a, e_b), V> only sees the normal part of H.
    Eigen::VectorXd Vn = f.P_nor * V;
    Eigen::MatrixXd M(k, k);
    for (int a = 0; a < k; ++a) {
        for (int b = 0; b < k; ++b) M(a, b) = f.hess(a, b).dot(Vn);
    }
    return f.E * (f.Ginv * (M * x));
}

Eigen::MatrixXd normal_connection(const ImmersionSpec& spec, const Eigen::VectorXd& u, const NormalField& V,
                                  double h) {
    auto checked = [&](const Eigen::VectorXd& at) {
        PointFrame f = frame_at(spec, at);
        Eigen::VectorXd v = V(at);
        if ((f.P_tan * v).norm() > 1e-8 * std::max(1.0, v.norm())) {
            throw GeometryError("field leaves normal bundle");
        }
        return std::make_pair(std::move(f), std::move(v));
    };
    auto [f0, v0] = checked(u);
    Eigen::MatrixXd out(spec.n(), spec.k());
    for (int a = 0; a < spec.k(); ++a) {
        Eigen::VectorXd up = u, dn = u;
        up[a] += h;
        dn[a] -= h;
        auto vp = checked(up).second;
        auto vm = checked(dn).second;
        out.col(a) = f0.P_nor * ((vp - vm) / (2.0 * h));
    }
    return out;
}

PointGeometry geometry_at(const ImmersionSpec& spec, const Eigen::VectorXd& u) {
    PointGeometry g{frame_at(spec, u), {}};
    g.dec = decompose(spec, g.frame);
    return g;
}

Stencil make_stencil(const ImmersionSpec& spec, const Eigen::VectorXd& u, double h) {
    Stencil s;
    s.h = h;
    for (int a = 0; a < spec.k(); ++a) {
        const auto& p = spec.parameters[static_cast<std::size_t>(a)];
        if (u[a] - 2.0 * h < p.lo || u[a] + 2.0 * h > p.hi) {
            throw GeometryError("boundary too close: parameter '" + p.name + "' at " + std::to_string(u[a]) +
                                " is within 2h of [" + std::to_string(p.lo) + ", " + std::to_string(p.hi) + "]");
        }
    }
    s.center = geometry_at(spec, u);
    for (int a = 0; a < spec.k(); ++a) {
        Eigen::VectorXd up = u, dn = u;
        up[a] += h;
        dn[a] -= h;
        s.plus.push_back(geometry_at(spec, up));
        s.minus.push_back(geometry_at(spec, dn));
    }
    return s;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> covder_T(const Stencil& s, int a, int b) {
    const PointFrame& f = s.center.frame;
    const Decomposition& d = s.center.dec;
    Eigen::VectorXd dTY = s.diff(a, [b](const PointGeometry& g) { return (g.dec.T_amb * g.frame.E.col(b)).eval(); });
    Eigen::VectorXd dNY = s.diff(a, [b](const PointGeometry& g) { return (g.dec.N_amb * g.frame.E.col(b)).eval(); });
    Eigen::VectorXd nab = levi_civita(f, a, b);
    Eigen::VectorXd covT = f.P_tan * dTY - d.T_amb * nab;
    Eigen::VectorXd covN = f.P_nor * dNY - d.N_amb * nab;
    return {covT, covN};
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> covder_T(const ImmersionSpec& spec, const Eigen::VectorXd& u, int a,
                                                     int b) {
    return covder_T(make_stencil(spec, u), a, b);
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> covder_t(const Stencil& s, int a, int i) {
    const PointFrame& f = s.center.frame;
    const Decomposition& d = s.center.dec;
    Eigen::VectorXd dV = s.diff(a, [i](const PointGeometry& g) { return g.frame.P_nor.col(i).eval(); });
    // t P_nor = t and n P_nor = n, so tV and nV are columns of t and n.
    Eigen::VectorXd dtV = s.diff(a, [i](const PointGeometry& g) { return g.dec.t_amb.col(i).eval(); });
    Eigen::VectorXd dnV = s.diff(a, [i](const PointGeometry& g) { return g.dec.n_amb.col(i).eval(); });
    Eigen::VectorXd perpV = f.P_nor * dV;
    Eigen::VectorXd covt = f.P_tan * dtV - d.t_amb * perpV;
    Eigen::VectorXd covn = f.P_nor * dnV - d.n_amb * perpV;
    return {covt, covn};
}

void ConnectionResiduals::merge(const ConnectionResiduals& o) {
    def_T = std::max(def_T, o.def_T);
    def_N = std::max(def_N, o.def_N);
    def_t = std::max(def_t, o.def_t);
    def_n = std::max(def_n, o.def_n);
    sym_covT = std::max(sym_covT, o.sym_covT);
    covT = std::max(covT, o.covT);
    covN = std::max(covN, o.covN);
    covt = std::max(covt, o.covt);
    covn = std::max(covn, o.covn);
    mixed = std::max(mixed, o.mixed);
}

ConnectionResiduals connection_residuals(const Stencil& s) {
    const PointFrame& f = s.center.frame;
    const Decomposition& d = s.center.dec;
    const int k = f.k();
    const int n = f.n();
    ConnectionResiduals r;

    std::vector<Eigen::VectorXd> covT(static_cast<std::size_t>(k * k));
    std::vector<Eigen::VectorXd> covN(static_cast<std::size_t>(k * k));
    for (int a = 0; a < k; ++a) {
        Eigen::MatrixXd dT = s.diff(a, [](const PointGeometry& g) { return g.dec.T_amb; });
        Eigen::MatrixXd dN = s.diff(a, [](const PointGeometry& g) { return g.dec.N_amb; });
        Eigen::VectorXd ea = Eigen::VectorXd::Unit(k, a);
        for (int b = 0; b < k; ++b) {
            auto [cT, cN] = covder_T(s, a, b);
            const Eigen::VectorXd Y = f.E.col(b);
            r.def_T = std::max(r.def_T, (cT - f.P_tan * dT * Y).norm());
            r.def_N = std::max(r.def_N, (cN - f.P_nor * dN * Y).norm());

            Eigen::VectorXd eb = Eigen::VectorXd::Unit(k, b);
            Eigen::VectorXd hab = sff(f, ea, eb);
            Eigen::VectorXd rhsT = shape_apply(f, d.Nvec.col(b), ea) + d.t_amb * hab;
            Eigen::VectorXd rhsN = d.n_amb * hab - sff(f, ea, d.Tmat.col(b));
            r.covT = std::max(r.covT, (cT - rhsT).norm());
            r.covN = std::max(r.covN, (cN - rhsN).norm());
            covT[static_cast<std::size_t>(a * k + b)] = std::move(cT);
            covN[static_cast<std::size_t>(a * k + b)] = std::move(cN);
        }
        for (int b = 0; b < k; ++b) {
            for (int c = 0; c < k; ++c) {
                double lhs = covT[static_cast<std::size_t>(a * k + b)].dot(f.E.col(c));
                double rhs = f.E.col(b).dot(covT[static_cast<std::size_t>(a * k + c)]);
                r.sym_covT = std::max(r.sym_covT, std::abs(lhs - rhs));
            }
        }

        Eigen::MatrixXd dt = s.diff(a, [](const PointGeometry& g) { return g.dec.t_amb; });
        Eigen::MatrixXd dn = s.diff(a, [](const PointGeometry& g) { return g.dec.n_amb; });
        for (int i = 0; i < n; ++i) {
            const Eigen::VectorXd V = f.P_nor.col(i);
            if (V.norm() < 1e-12) continue;
            auto [ct, cn] = covder_t(s, a, i);
            r.def_t = std::max(r.def_t, (ct - f.P_tan * dt * V).norm());
            r.def_n = std::max(r.def_n, (cn - f.P_nor * dn * V).norm());

            Eigen::VectorXd AV = shape_apply(f, V, ea);
            Eigen::VectorXd rhst = shape_apply(f, d.n_amb * V, ea) - d.T_amb * AV;
            Eigen::VectorXd rhsn = -sff(f, ea, f.coords(d.t_amb * V)) - d.N_amb * AV;
            r.covt = std::max(r.covt, (ct - rhst).norm());
            r.covn = std::max(r.covn, (cn - rhsn).norm());
            for (int b = 0; b < k; ++b) {
                double lhs = covN[static_cast<std::size_t>(a * k + b)].dot(V);
                double rhs = ct.dot(f.E.col(b));
                r.mixed = std::max(r.mixed, std::abs(lhs - rhs));
            }
        }
    }
    return r;
}

Eigen::MatrixXd metric_derivative(const PointFrame& f, int c) {
    const int k = f.k();
    Eigen::MatrixXd dG(k, k);
    for (int a = 0; a < k; ++a) {
        for (int b = 0; b < k; ++b) dG(a, b) = f.hess(a, c).dot(f.E.col(b)) + f.E.col(a).dot(f.hess(b, c));
    }
    return dG;
}

ConnectionConsistency connection_consistency(const PointFrame& f, const ConnectionData& c) {
    const int k = f.k();
    ConnectionConsistency r;
    for (int a = 0; a < k; ++a) {
        for (int b = 0; b < k; ++b) {
            Eigen::VectorXd split = f.E * c.gamma(a, b) + f.Q_nor * c.h(a, b) - f.hess(a, b);
            r.gauss_split = std::max(r.gauss_split, split.norm());
        }
    }
    for (int cc = 0; cc < k; ++cc) {
        Eigen::MatrixXd dG = metric_derivative(f, cc);
        for (int a = 0; a < k; ++a) {
            for (int b = 0; b < k; ++b) {
                double rhs = f.G.col(b).dot(c.gamma(cc, a)) + f.G.col(a).dot(c.gamma(cc, b));
                r.metric_compat = std::max(r.metric_compat, std::abs(dG(a, b) - rhs));
            }
        }
    }
    return r;
}

} // namespace metagee
