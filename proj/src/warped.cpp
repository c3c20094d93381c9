#include "metagee/warped.hpp"

#include "metagee/error.hpp"
#include "metagee/geometry.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>

namespace metagee {

WarpingJet warping_at(const ImmersionSpec& spec, const Eigen::VectorXd& u) {
    if (!spec.warped) throw Error("spec '" + spec.name + "' has no warped declaration");
    Jet2 j = eval_jet2(spec.warped->warping, spec.eval_point(u), spec.params);
    if (!(j.value > 0.0)) {
        throw GeometryError("warping function " + spec.warped->warping_text + " is not positive (" +
                            std::to_string(j.value) + ")");
    }
    return {j.value, j.grad / j.value};
}

CatalogContext::CatalogContext(const ImmersionSpec& s, double tol_scale, int points_per_param)
    : spec(s), scale(tol_scale), grid(points_per_param > 0 ? points_per_param : s.grid) {
    points = grid_points(spec, grid);
    classification = classify(spec, grid);
    if (spec.warped) {
        base = spec.parameter_indices(spec.warped->base);
        fiber = spec.parameter_indices(spec.warped->fiber);
        factors = FactorTypes{coordinate_report(spec, spec.warped->base, grid),
                              coordinate_report(spec, spec.warped->fiber, grid)};
    }
}

namespace {

struct TagInfo {
    std::string_view tag;
    std::string_view anchor;
};

constexpr std::array<TagInfo, 36> kCatalog{{
    {"ID_E7i", "g(TX,Y) = g(X,TY)"},
    {"ID_E7ii", "g(nU,V) = g(U,nV)"},
    {"ID_E8", "g(NX,V) = g(X,tV)"},
    {"ID_E9i", "T^2 X = pTX + qX - tNX"},
    {"ID_E9ii", "pNX = NTX + nNX"},
    {"ID_E10i", "n^2 V = pnV + qV - NtV"},
    {"ID_E10ii", "ptV = TtV + tnV"},
    {"ID_E13i", "(nabla_X T)Y = nabla_X TY - T(nabla_X Y)"},
    {"ID_E13ii", "(nablabar_X N)Y = nablaperp_X NY - N(nabla_X Y)"},
    {"ID_E14i", "(nabla_X t)V = nabla_X tV - t(nablaperp_X V)"},
    {"ID_E14ii", "(nablabar_X n)V = nablaperp_X nV - n(nablaperp_X V)"},
    {"ID_E16", "g((nabla_X T)Y,Z) = g(Y,(nabla_X T)Z)"},
    {"ID_E17i", "(nabla_X T)Y = A_{NY}X + t h(X,Y)"},
    {"ID_E17ii", "(nablabar_X N)Y = n h(X,Y) - h(X,TY)"},
    {"ID_E18i", "(nabla_X t)V = A_{nV}X - T A_V X"},
    {"ID_E18ii", "(nablabar_X n)V = -h(X,tV) - N A_V X"},
    {"ID_E19", "g((nablabar_X N)Y,V) = g((nabla_X t)V,Y)"},
    {"ID_E21", "g(TX,TY) = cos^2(theta)[p g(X,TY) + q g(X,Y)]"},
    {"ID_E22", "g(NX,NY) = sin^2(theta)[p g(X,TY) + q g(X,Y)]"},
    {"ID_E23i", "T^2 = cos^2(theta)(pT + qI)"},
    {"ID_E23ii", "nabla(T^2) = p cos^2(theta) nabla T"},
    {"ID_E24", "g(TP2X,TP2Y) = cos^2(theta)[p g(TP2X,P2Y) + q g(P2X,P2Y)]"},
    {"ID_E25", "g(NX,NY) = sin^2(theta)[p g(TP2X,P2Y) + q g(P2X,P2Y)]"},
    {"ID_WM", "g = g1 + f^2 g2"},
    {"ID_L1A", "nabla_X Y in L(M1)"},
    {"ID_L1B", "nabla_X Z = nabla_Z X = X(ln f) Z"},
    {"ID_L1C", "nabla_Z W = nabla^{M2}_Z W - (grad f / f) g(Z,W)"},
    {"ID_W1a", "g(h(X,Y),NZ) = -g(h(X,Z),NY)"},
    {"ID_W1b", "g(h(X,Z),NW) = 0"},
    {"ID_W3", "g(h(Z,W),NX) = TX(ln f) g(Z,W) - X(ln f) g(Z,TW)"},
    {"ID_E32", "h(TX,Z) = X(ln f) NZ + n h(X,Z)"},
    {"ID_P1", "TX(ln f) = -(q/p) X(ln f)"},
    {"ID_P2", "q X(ln f) Z = -(T - pI) A_{NX} Z - t nablaperp_Z NX"},
    {"ID_P3", "TX(ln f) = sigma X(ln f) or sigbar X(ln f)"},
    {"ID_P4", "q X(ln f) Z = t nablaperp_Z NX - p t h(X,Z)"},
    {"ID_HS", "X(ln f) TZ = A_{NZ}X - A_{NX}Z"},
}};

const TagInfo* find_tag(std::string_view tag) {
    for (const auto& t : kCatalog) {
        if (t.tag == tag) return &t;
    }
    return nullptr;
}

bool starts_with_any(std::string_view tag, std::initializer_list<std::string_view> set) {
    return std::find(set.begin(), set.end(), tag) != set.end();
}

const std::initializer_list<std::string_view> kDecomposition = {"ID_E7i", "ID_E7ii", "ID_E8", "ID_E9i",
                                                                "ID_E9ii", "ID_E10i", "ID_E10ii"};
const std::initializer_list<std::string_view> kConnection = {"ID_E13i", "ID_E13ii", "ID_E14i", "ID_E14ii", "ID_E16",
                                                             "ID_E17i", "ID_E17ii", "ID_E18i", "ID_E18ii", "ID_E19"};

DistType base_type(const CatalogContext& c) { return c.factors->base.type; }
DistType fiber_type(const CatalogContext& c) { return c.factors->fiber.type; }

bool factors_are(const CatalogContext& c, DistType b, DistType f) {
    return c.factors && base_type(c) == b && fiber_type(c) == f;
}

std::string factor_text(const CatalogContext& c) {
    return std::string(dist_type_name(base_type(c))) + " x " + std::string(dist_type_name(fiber_type(c)));
}

bool is_proper_slant_label(Label l) { return l == Label::ProperSlant; }
bool has_slant_distribution(const Classification& c) {
    return c.label == Label::SemiSlant || c.label == Label::HemiSlant || c.label == Label::BiSlant;
}

IdentityResult blank(std::string_view tag) {
    IdentityResult r;
    r.id = std::string(tag);
    r.anchor = std::string(identity_anchor(tag));
    return r;
}

// --- decomposition family ---------------------------------------------------

void run_decomposition(const CatalogContext& ctx, std::map<std::string, IdentityResult>& out,
                       const std::vector<std::string>& want) {
    DecompositionResiduals acc;
    for (const auto& u : ctx.points) {
        PointFrame f = frame_at(ctx.spec, u);
        DecompositionResiduals r = decomposition_residuals(ctx.spec, f, decompose(ctx.spec, f));
        acc.reconstruction = std::max(acc.reconstruction, r.reconstruction);
        acc.sym_T = std::max(acc.sym_T, r.sym_T);
        acc.sym_n = std::max(acc.sym_n, r.sym_n);
        acc.adjoint_Nt = std::max(acc.adjoint_Nt, r.adjoint_Nt);
        acc.T_square = std::max(acc.T_square, r.T_square);
        acc.N_split = std::max(acc.N_split, r.N_split);
        acc.n_square = std::max(acc.n_square, r.n_square);
        acc.t_split = std::max(acc.t_split, r.t_split);
    }
    const std::map<std::string_view, std::pair<double, NumericClass>> values = {
        {"ID_E7i", {acc.sym_T, NumericClass::Algebraic}},
        {"ID_E7ii", {acc.sym_n, NumericClass::Algebraic}},
        {"ID_E8", {acc.adjoint_Nt, NumericClass::Algebraic}},
        {"ID_E9i", {acc.T_square, NumericClass::LinearSolve}},
        {"ID_E9ii", {acc.N_split, NumericClass::LinearSolve}},
        {"ID_E10i", {acc.n_square, NumericClass::LinearSolve}},
        {"ID_E10ii", {acc.t_split, NumericClass::LinearSolve}},
    };
    for (const auto& tag : want) {
        auto it = values.find(tag);
        if (it == values.end()) continue;
        IdentityResult r = blank(tag);
        r.cls = it->second.second;
        r.residual = it->second.first;
        settle(r, ctx.scale);
        out[tag] = r;
    }
}

// --- connection family ------------------------------------------------------

void run_connection(const CatalogContext& ctx, std::map<std::string, IdentityResult>& out,
                    const std::vector<std::string>& want) {
    ConnectionResiduals full, half;
    for (const auto& u : ctx.points) {
        full.merge(connection_residuals(make_stencil(ctx.spec, u, kFdStep)));
        half.merge(connection_residuals(make_stencil(ctx.spec, u, kFdStep / 2)));
    }
    using Field = double ConnectionResiduals::*;
    const std::map<std::string_view, Field> fields = {
        {"ID_E13i", &ConnectionResiduals::def_T},   {"ID_E13ii", &ConnectionResiduals::def_N},
        {"ID_E14i", &ConnectionResiduals::def_t},   {"ID_E14ii", &ConnectionResiduals::def_n},
        {"ID_E16", &ConnectionResiduals::sym_covT}, {"ID_E17i", &ConnectionResiduals::covT},
        {"ID_E17ii", &ConnectionResiduals::covN},   {"ID_E18i", &ConnectionResiduals::covt},
        {"ID_E18ii", &ConnectionResiduals::covn},   {"ID_E19", &ConnectionResiduals::mixed},
    };
    for (const auto& tag : want) {
        auto it = fields.find(tag);
        if (it == fields.end()) continue;
        IdentityResult r = blank(tag);
        settle_fd(r, full.*(it->second), half.*(it->second), ctx.scale);
        out[tag] = r;
    }
}

// --- slant family -----------------------------------------------------------

struct SlantTarget {
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> basis;
    double cos2;
};

std::vector<SlantTarget> slant_targets(const CatalogContext& ctx, bool whole) {
    std::vector<SlantTarget> out;
    const auto& c = ctx.classification;
    if (whole) {
        const double th = c.angles.front().mean;
        const int k = ctx.spec.k();
        out.push_back({[k](const Eigen::VectorXd&) { return Eigen::MatrixXd::Identity(k, k).eval(); },
                       std::cos(th) * std::cos(th)});
        return out;
    }
    for (std::size_t i = 0; i < c.angles.size(); ++i) {
        if (c.angles[i].type != DistType::ProperSlant) continue;
        const Distribution* D = &ctx.spec.distributions[i];
        const ImmersionSpec* spec = &ctx.spec;
        const double th = c.angles[i].mean;
        out.push_back({[spec, D](const Eigen::VectorXd& u) { return distribution_basis(*spec, *D, u); },
                       std::cos(th) * std::cos(th)});
    }
    return out;
}

IdentityResult run_slant(const CatalogContext& ctx, std::string_view tag) {
    IdentityResult r = blank(tag);
    const bool whole = tag == "ID_E21" || tag == "ID_E22" || tag == "ID_E23i" || tag == "ID_E23ii";
    auto targets = slant_targets(ctx, whole);
    if (tag == "ID_E23ii") {
        const double cos2 = targets.front().cos2;
        double full = 0.0, half = 0.0;
        for (const auto& u : ctx.points) {
            full = std::max(full, slant_covT2_residual(ctx.spec, make_stencil(ctx.spec, u, kFdStep), cos2));
            half = std::max(half, slant_covT2_residual(ctx.spec, make_stencil(ctx.spec, u, kFdStep / 2), cos2));
        }
        settle_fd(r, full, half, ctx.scale);
        return r;
    }
    r.cls = NumericClass::LinearSolve;
    for (const auto& u : ctx.points) {
        PointGeometry g = geometry_at(ctx.spec, u);
        for (const auto& t : targets) {
            Eigen::MatrixXd D = t.basis(u);
            double v = 0.0;
            if (tag == "ID_E21" || tag == "ID_E24") v = slant_TT_residual(ctx.spec, g, D, t.cos2);
            else if (tag == "ID_E22" || tag == "ID_E25") v = slant_NN_residual(ctx.spec, g, D, t.cos2);
            else v = slant_T2_residual(ctx.spec, g, D, t.cos2);
            r.residual = std::max(r.residual, v);
        }
    }
    settle(r, ctx.scale);
    return r;
}

// --- warped family ----------------------------------------------------------

double dot_h_N(const PointFrame& f, const Decomposition& d, int a, int b, int c) {
    return sff(f, Eigen::VectorXd::Unit(f.k(), a), Eigen::VectorXd::Unit(f.k(), b)).dot(d.Nvec.col(c));
}

IdentityResult run_warped_metric(const CatalogContext& ctx) {
    IdentityResult r = blank("ID_WM");
    r.cls = NumericClass::LinearSolve;
    const auto& B = ctx.base;
    const auto& F = ctx.fiber;
    double cross = 0.0, base_dep = 0.0, fiber_dep = 0.0;
    for (const auto& u : ctx.points) {
        PointFrame f = frame_at(ctx.spec, u);
        WarpingJet w = warping_at(ctx.spec, u);
        for (int a : B) {
            for (int c : F) cross = std::max(cross, std::abs(f.G(a, c)));
        }
        // Base block must not depend on fiber coordinates.
        for (int c : F) {
            Eigen::MatrixXd dG = metric_derivative(f, c);
            for (int a : B) {
                for (int b : B) base_dep = std::max(base_dep, std::abs(dG(a, b)));
            }
        }
        // G_FF / f^2 must not depend on base coordinates.
        for (int a : B) {
            Eigen::MatrixXd dG = metric_derivative(f, a);
            for (int c : F) {
                for (int e : F) {
                    double d = (dG(c, e) - 2.0 * w.dlnf[a] * f.G(c, e)) / (w.f * w.f);
                    fiber_dep = std::max(fiber_dep, std::abs(d));
                }
            }
        }
    }
    r.residual = std::max({cross, base_dep, fiber_dep});
    settle(r, ctx.scale);
    char buf[160];
    std::snprintf(buf, sizeof buf, "cross block %.3g, base block variation %.3g, fiber block variation %.3g", cross,
                  base_dep, fiber_dep);
    r.note = buf;
    return r;
}

IdentityResult run_lemma(const CatalogContext& ctx, std::string_view tag) {
    IdentityResult r = blank(tag);
    r.cls = NumericClass::LinearSolve;
    const auto& B = ctx.base;
    const auto& F = ctx.fiber;
    const int k = ctx.spec.k();
    for (const auto& u : ctx.points) {
        PointFrame f = frame_at(ctx.spec, u);
        WarpingJet w = warping_at(ctx.spec, u);
        if (tag == "ID_L1A") {
            Eigen::MatrixXd PB = subspace_projector(f, coordinate_basis(k, B));
            for (int a : B) {
                for (int b : B) {
                    Eigen::VectorXd v = levi_civita(f, a, b);
                    r.residual = std::max(r.residual, (v - PB * v).norm());
                }
            }
        } else if (tag == "ID_L1B") {
            for (int a : B) {
                for (int c : F) {
                    Eigen::VectorXd expect = w.dlnf[a] * f.E.col(c);
                    r.residual = std::max(r.residual, (levi_civita(f, a, c) - expect).norm());
                    r.residual = std::max(r.residual, (levi_civita(f, c, a) - expect).norm());
                }
            }
        } else {
            // Fiber Levi-Civita from the fiber block; scaling by f^2 is constant along the fiber.
            const int m = static_cast<int>(F.size());
            Eigen::MatrixXd GF(m, m);
            for (int i = 0; i < m; ++i) {
                for (int j = 0; j < m; ++j) GF(i, j) = f.G(F[i], F[j]);
            }
            Eigen::MatrixXd GFinv = GF.inverse();
            std::vector<Eigen::MatrixXd> dG;
            for (int c : F) dG.push_back(metric_derivative(f, c));
            Eigen::VectorXd grad_ln = f.E * (f.Ginv * w.dlnf);
            for (int i = 0; i < m; ++i) {
                for (int j = 0; j < m; ++j) {
                    Eigen::VectorXd low(m);
                    for (int l = 0; l < m; ++l) {
                        low[l] = 0.5 * (dG[i](F[l], F[j]) + dG[j](F[l], F[i]) - dG[l](F[i], F[j]));
                    }
                    Eigen::VectorXd gam = GFinv * low;
                    Eigen::VectorXd fiber_nabla = Eigen::VectorXd::Zero(f.n());
                    for (int l = 0; l < m; ++l) fiber_nabla += gam[l] * f.E.col(F[l]);
                    Eigen::VectorXd expect = fiber_nabla - grad_ln * f.G(F[i], F[j]);
                    r.residual = std::max(r.residual, (levi_civita(f, F[i], F[j]) - expect).norm());
                }
            }
        }
    }
    settle(r, ctx.scale);
    return r;
}

IdentityResult run_bislant_lemma(const CatalogContext& ctx, std::string_view tag) {
    IdentityResult r = blank(tag);
    r.cls = NumericClass::LinearSolve;
    const auto& B = ctx.base;
    const auto& F = ctx.fiber;
    for (const auto& u : ctx.points) {
        PointGeometry g = geometry_at(ctx.spec, u);
        const PointFrame& f = g.frame;
        const Decomposition& d = g.dec;
        if (tag == "ID_W1a") {
            for (int a : B) {
                for (int b : B) {
                    for (int c : F) {
                        double v = dot_h_N(f, d, a, b, c) + dot_h_N(f, d, a, c, b);
                        r.residual = std::max(r.residual, std::abs(v));
                    }
                }
            }
        } else if (tag == "ID_W1b") {
            for (int a : B) {
                for (int c : F) {
                    for (int e : F) r.residual = std::max(r.residual, std::abs(dot_h_N(f, d, a, c, e)));
                }
            }
        } else {
            WarpingJet w = warping_at(ctx.spec, u);
            Eigen::MatrixXd GT = f.G * d.Tmat;
            for (int a : B) {
                const double TX_lnf = w.dlnf.dot(d.Tmat.col(a));
                for (int c : F) {
                    for (int e : F) {
                        double rhs = TX_lnf * f.G(c, e) - w.dlnf[a] * GT(c, e);
                        r.residual = std::max(r.residual, std::abs(dot_h_N(f, d, c, e, a) - rhs));
                    }
                }
            }
        }
    }
    settle(r, ctx.scale);
    return r;
}

// Indices of the invariant factor and of the proper slant factor.
std::pair<std::vector<int>, std::vector<int>> invariant_and_slant(const CatalogContext& ctx, bool& invariant_is_base) {
    invariant_is_base = base_type(ctx) == DistType::Invariant;
    return invariant_is_base ? std::make_pair(ctx.base, ctx.fiber) : std::make_pair(ctx.fiber, ctx.base);
}

IdentityResult run_e32(const CatalogContext& ctx) {
    IdentityResult r = blank("ID_E32");
    r.cls = NumericClass::LinearSolve;
    bool inv_base = true;
    auto [I, S] = invariant_and_slant(ctx, inv_base);
    const int k = ctx.spec.k();
    for (const auto& u : ctx.points) {
        PointGeometry g = geometry_at(ctx.spec, u);
        const PointFrame& f = g.frame;
        const Decomposition& d = g.dec;
        WarpingJet w = warping_at(ctx.spec, u);
        for (int x : I) {
            Eigen::VectorXd ex = Eigen::VectorXd::Unit(k, x);
            for (int z : S) {
                Eigen::VectorXd ez = Eigen::VectorXd::Unit(k, z);
                // nabla_Z X from the warped connection, for either ordering of the factors.
                Eigen::VectorXd nabla_ZX = inv_base ? Eigen::VectorXd(w.dlnf[x] * ez) : Eigen::VectorXd(w.dlnf[z] * ex);
                Eigen::VectorXd lhs = sff(f, d.Tmat.col(x), ez);
                Eigen::VectorXd rhs = d.Nvec * nabla_ZX + d.n_amb * sff(f, ex, ez);
                r.residual = std::max(r.residual, (lhs - rhs).norm());
            }
        }
    }
    settle(r, ctx.scale);
    if (!inv_base) r.note = "invariant factor is the fiber; nabla_Z X = Z(ln f) X";
    return r;
}

IdentityResult run_p1_p3(const CatalogContext& ctx, std::string_view tag) {
    IdentityResult r = blank(tag);
    r.cls = NumericClass::LinearSolve;
    const double p = static_cast<double>(ctx.spec.params.p());
    const double q = static_cast<double>(ctx.spec.params.q());
    const double s = ctx.spec.params.sigma();
    const double sb = ctx.spec.params.sigbar();
    double max_side = 0.0;
    int used = 0;
    for (const auto& u : ctx.points) {
        PointGeometry g = geometry_at(ctx.spec, u);
        WarpingJet w = warping_at(ctx.spec, u);
        for (int a : ctx.base) {
            const double X_lnf = w.dlnf[a];
            const double TX_lnf = w.dlnf.dot(g.dec.Tmat.col(a));
            if (tag == "ID_P1") {
                r.residual = std::max(r.residual, std::abs(TX_lnf + (q / p) * X_lnf));
                max_side = std::max({max_side, std::abs(TX_lnf), std::abs((q / p) * X_lnf)});
            } else if (std::abs(X_lnf) > 1e-3) {
                const double ratio = TX_lnf / X_lnf;
                r.residual = std::max(r.residual, std::min(std::abs(ratio - s), std::abs(ratio - sb)));
                ++used;
            }
        }
    }
    if (tag == "ID_P3") {
        r.tol = 1e-6 * ctx.scale;
        r.pass = r.residual <= r.tol;
        r.note = std::to_string(used) + " samples with |X(ln f)| > 1e-3";
        if (used == 0) {
            r.pass = false;
            r.note = "no sample with |X(ln f)| > 1e-3";
        }
        return r;
    }
    settle(r, ctx.scale);
    char buf[96];
    std::snprintf(buf, sizeof buf, "max |side| %.3g", max_side);
    r.note = buf;
    return r;
}

// nablaperp_{e_c} N e_a by central differences of the field N e_a.
double p2_p4_residual(const CatalogContext& ctx, const Stencil& st, bool p2) {
    const double p = static_cast<double>(ctx.spec.params.p());
    const double q = static_cast<double>(ctx.spec.params.q());
    const PointFrame& f = st.center.frame;
    const Decomposition& d = st.center.dec;
    WarpingJet w = warping_at(ctx.spec, f.u);
    const int k = f.k();
    double res = 0.0;
    for (int a : ctx.base) {
        for (int c : ctx.fiber) {
            Eigen::VectorXd dNX = st.diff(c, [a](const PointGeometry& g) { return g.dec.Nvec.col(a).eval(); });
            Eigen::VectorXd perp = f.P_nor * dNX;
            Eigen::VectorXd Z = f.E.col(c);
            Eigen::VectorXd ez = Eigen::VectorXd::Unit(k, c);
            Eigen::VectorXd v;
            if (p2) {
                Eigen::VectorXd A = shape_apply(f, d.Nvec.col(a), ez);
                v = q * w.dlnf[a] * Z + (d.T_amb * A - p * A) + d.t_amb * perp;
            } else {
                Eigen::VectorXd h = sff(f, Eigen::VectorXd::Unit(k, a), ez);
                v = q * w.dlnf[a] * Z - (d.t_amb * perp - p * (d.t_amb * h));
            }
            res = std::max(res, v.norm());
        }
    }
    return res;
}

IdentityResult run_p2_p4(const CatalogContext& ctx, std::string_view tag) {
    IdentityResult r = blank(tag);
    const bool p2 = tag == "ID_P2";
    double full = 0.0, half = 0.0;
    for (const auto& u : ctx.points) {
        full = std::max(full, p2_p4_residual(ctx, make_stencil(ctx.spec, u, kFdStep), p2));
        half = std::max(half, p2_p4_residual(ctx, make_stencil(ctx.spec, u, kFdStep / 2), p2));
    }
    settle_fd(r, full, half, ctx.scale);
    return r;
}

IdentityResult run_hs(const CatalogContext& ctx) {
    IdentityResult r = blank("ID_HS");
    r.cls = NumericClass::LinearSolve;
    const bool anti_base = base_type(ctx) == DistType::AntiInvariant;
    const auto& Xs = anti_base ? ctx.base : ctx.fiber;
    const auto& Zs = anti_base ? ctx.fiber : ctx.base;
    const int k = ctx.spec.k();
    for (const auto& u : ctx.points) {
        PointGeometry g = geometry_at(ctx.spec, u);
        const PointFrame& f = g.frame;
        const Decomposition& d = g.dec;
        WarpingJet w = warping_at(ctx.spec, u);
        for (int x : Xs) {
            for (int z : Zs) {
                Eigen::VectorXd ex = Eigen::VectorXd::Unit(k, x);
                Eigen::VectorXd ez = Eigen::VectorXd::Unit(k, z);
                Eigen::VectorXd rhs = shape_apply(f, d.Nvec.col(z), ex) - shape_apply(f, d.Nvec.col(x), ez);
                // With the slant factor as base the roles of the log-derivative swap.
                Eigen::VectorXd lhs = anti_base ? Eigen::VectorXd(w.dlnf[x] * (f.E * d.Tmat.col(z)))
                                                : Eigen::VectorXd(w.dlnf.dot(d.Tmat.col(z)) * f.E.col(x));
                r.residual = std::max(r.residual, (lhs - rhs).norm());
            }
        }
    }
    settle(r, ctx.scale);
    if (!anti_base) r.note = "slant factor is the base; checked TZ(ln f) X = A_{NZ}X - A_{NX}Z";
    return r;
}

} // namespace

const std::vector<std::string>& identity_tags() {
    static const std::vector<std::string> tags = [] {
        std::vector<std::string> v;
        for (const auto& t : kCatalog) v.emplace_back(t.tag);
        return v;
    }();
    return tags;
}

bool is_identity_tag(std::string_view tag) { return find_tag(tag) != nullptr; }

std::string_view identity_anchor(std::string_view tag) {
    const TagInfo* t = find_tag(tag);
    return t ? t->anchor : std::string_view{};
}

std::optional<std::string> unmet_requirement(const CatalogContext& ctx, std::string_view tag) {
    if (!is_identity_tag(tag)) return "unknown identity tag";
    if (starts_with_any(tag, kDecomposition) || starts_with_any(tag, kConnection)) return std::nullopt;
    const Label label = ctx.classification.label;
    if (tag == "ID_E21" || tag == "ID_E22" || tag == "ID_E23i" || tag == "ID_E23ii") {
        if (!is_proper_slant_label(label)) return "needs a proper slant submanifold, classified " + std::string(label_name(label));
        return std::nullopt;
    }
    if (tag == "ID_E24" || tag == "ID_E25") {
        if (!has_slant_distribution(ctx.classification)) {
            return "needs a semi-slant, hemi-slant or bi-slant submanifold, classified " + std::string(label_name(label));
        }
        return std::nullopt;
    }
    if (!ctx.factors) return "needs a warped declaration";
    if (tag == "ID_WM" || tag == "ID_L1A" || tag == "ID_L1B" || tag == "ID_L1C" || tag == "ID_W1a" ||
        tag == "ID_W1b" || tag == "ID_W3") {
        return std::nullopt;
    }
    const DistType b = base_type(ctx);
    const DistType f = fiber_type(ctx);
    auto need = [&](std::string_view what) { return "needs " + std::string(what) + ", factors are " + factor_text(ctx); };
    if (tag == "ID_E32") {
        bool ok = (b == DistType::Invariant && f == DistType::ProperSlant) ||
                  (b == DistType::ProperSlant && f == DistType::Invariant);
        return ok ? std::nullopt : std::optional<std::string>(need("an invariant and a proper slant factor"));
    }
    if (tag == "ID_P1") {
        return factors_are(ctx, DistType::Invariant, DistType::AntiInvariant)
                   ? std::nullopt
                   : std::optional<std::string>(need("invariant base and anti-invariant fiber"));
    }
    if (tag == "ID_P2") {
        return factors_are(ctx, DistType::AntiInvariant, DistType::Invariant)
                   ? std::nullopt
                   : std::optional<std::string>(need("anti-invariant base and invariant fiber"));
    }
    if (tag == "ID_P3") {
        return factors_are(ctx, DistType::Invariant, DistType::Invariant)
                   ? std::nullopt
                   : std::optional<std::string>(need("invariant base and invariant fiber"));
    }
    if (tag == "ID_P4") {
        return factors_are(ctx, DistType::AntiInvariant, DistType::AntiInvariant)
                   ? std::nullopt
                   : std::optional<std::string>(need("anti-invariant base and anti-invariant fiber"));
    }
    // ID_HS
    bool ok = (b == DistType::AntiInvariant && f == DistType::ProperSlant) ||
              (b == DistType::ProperSlant && f == DistType::AntiInvariant);
    return ok ? std::nullopt : std::optional<std::string>(need("an anti-invariant and a proper slant factor"));
}

std::vector<IdentityResult> check_identities(const CatalogContext& ctx, const std::vector<std::string>& tags) {
    for (const auto& t : tags) {
        if (auto why = unmet_requirement(ctx, t)) throw NotApplicable("identity not applicable: " + t + " " + *why);
    }
    std::map<std::string, IdentityResult> done;
    auto wants = [&](const std::initializer_list<std::string_view>& family) {
        return std::any_of(tags.begin(), tags.end(), [&](const std::string& t) { return starts_with_any(t, family); });
    };
    if (wants(kDecomposition)) run_decomposition(ctx, done, tags);
    if (wants(kConnection)) run_connection(ctx, done, tags);
    for (const auto& t : tags) {
        if (done.count(t)) continue;
        IdentityResult r;
        if (t == "ID_E21" || t == "ID_E22" || t == "ID_E23i" || t == "ID_E23ii" || t == "ID_E24" || t == "ID_E25") {
            r = run_slant(ctx, t);
        } else if (t == "ID_WM") {
            r = run_warped_metric(ctx);
        } else if (t == "ID_L1A" || t == "ID_L1B" || t == "ID_L1C") {
            r = run_lemma(ctx, t);
        } else if (t == "ID_W1a" || t == "ID_W1b" || t == "ID_W3") {
            r = run_bislant_lemma(ctx, t);
        } else if (t == "ID_E32") {
            r = run_e32(ctx);
        } else if (t == "ID_P1" || t == "ID_P3") {
            r = run_p1_p3(ctx, t);
        } else if (t == "ID_P2" || t == "ID_P4") {
            r = run_p2_p4(ctx, t);
        } else {
            r = run_hs(ctx);
        }
        done[t] = r;
    }
    std::vector<IdentityResult> out;
    out.reserve(tags.size());
    for (const auto& t : tags) out.push_back(done.at(t));
    return out;
}

IdentityResult check_identity(const CatalogContext& ctx, std::string_view tag) {
    return check_identities(ctx, {std::string(tag)}).front();
}

IdentityResult check_identity(const ImmersionSpec& spec, std::string_view tag, double tol_scale) {
    if (!is_identity_tag(tag)) throw NotApplicable("identity not applicable: unknown tag " + std::string(tag));
    CatalogContext ctx(spec, tol_scale);
    return check_identity(ctx, tag);
}

std::vector<std::string> applicable_tags(const CatalogContext& ctx) {
    std::vector<std::string> out;
    for (const auto& t : identity_tags()) {
        if (!unmet_requirement(ctx, t)) out.push_back(t);
    }
    return out;
}

IdentityResult verify_warped_metric(const ImmersionSpec& spec, double tol_scale, int points_per_param) {
    if (!spec.warped) throw NotApplicable("identity not applicable: ID_WM needs a warped declaration");
    CatalogContext ctx(spec, tol_scale, points_per_param);
    return run_warped_metric(ctx);
}

ObstructionReport obstruction_report(const CatalogContext& ctx) {
    if (!ctx.factors) throw NotApplicable("obstruction report needs a warped declaration");
    if (ctx.classification.label == Label::Unclassified) {
        throw NotApplicable("obstruction report needs a classified submanifold");
    }
    ObstructionReport rep;
    rep.product_type = factor_text(ctx);
    const DistType b = base_type(ctx);
    const DistType f = fiber_type(ctx);
    if (b == DistType::Invariant && f == DistType::AntiInvariant) {
        rep.hypothesis_matches = true;
        rep.theorem = "M_T x_f M_perp: the warping function is constant on M_T";
    } else if (b == DistType::Invariant && f == DistType::ProperSlant) {
        rep.hypothesis_matches = true;
        rep.theorem = "M_T x_f M_theta: the warping function is constant on M_T";
    }

    for (const auto& u : ctx.points) {
        WarpingJet w = warping_at(ctx.spec, u);
        for (int a : ctx.base) rep.max_dlnf = std::max(rep.max_dlnf, std::abs(w.dlnf[a]));
    }
    rep.f_constant = rep.max_dlnf <= kConstantWarpingTol;

    std::vector<std::string> tags;
    for (std::string t : {"ID_WM", "ID_W1a", "ID_W1b", "ID_W3", "ID_E32", "ID_P1", "ID_P2", "ID_P4", "ID_HS"}) {
        if (!unmet_requirement(ctx, t)) tags.push_back(t);
    }
    rep.checks = check_identities(ctx, tags);

    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", rep.max_dlnf);
    if (rep.hypothesis_matches) {
        if (rep.f_constant) {
            rep.verdict = "constant warping forced";
        } else {
            rep.contradiction = true;
            std::string failing;
            for (const auto& c : rep.checks) {
                if (!c.pass) failing += (failing.empty() ? "" : ", ") + c.id;
            }
            rep.verdict = "contradiction: " + rep.theorem + ", but max |X(ln f)| = " + buf +
                          (failing.empty() ? std::string("; no identity check failed")
                                           : "; failing checks: " + failing);
        }
    } else if (rep.f_constant) {
        rep.verdict = "trivial warped product (max |X(ln f)| = " + std::string(buf) + ")";
    } else {
        rep.verdict = "proper warped product exists (max |X(ln f)| = " + std::string(buf) + ")";
    }
    return rep;
}

ObstructionReport obstruction_report(const ImmersionSpec& spec, double tol_scale) {
    CatalogContext ctx(spec, tol_scale);
    return obstruction_report(ctx);
}

} // namespace metagee
