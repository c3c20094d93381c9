#pragma once

#include "metagee/report.hpp"
#include "metagee/spec_io.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <string>

namespace testing_helpers {

inline double max_abs(const Eigen::MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

// Independent tangent projector from a Householder QR of E.
inline Eigen::MatrixXd qr_projector(const Eigen::MatrixXd& E) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(E);
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(E.rows(), E.cols());
    return Q * Q.transpose();
}

using namespace metagee;

// Random trees over x, y with non-negative decimal literals, as the parser
// produces them.
struct RandomExpr {
    std::mt19937_64 rng;
    explicit RandomExpr(std::uint64_t seed) : rng(seed) {}

    int pick(int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); }

    Expr leaf() {
        switch (pick(4)) {
        case 0: return Expr::ident("x");
        case 1: return Expr::ident("y");
        case 2: return Expr::literal(Rational(pick(40), 1 + 9 * pick(2)));
        default: return Expr::ident(pick(2) ? "sigma" : "pi");
        }
    }

    Expr make(int depth) {
        if (depth == 0) return leaf();
        switch (pick(6)) {
        case 0: return Expr::neg(make(depth - 1));
        case 1: return Expr::pow(make(depth - 1), pick(4));
        case 2: {
            static const Function fns[] = {Function::Sin, Function::Cos, Function::Tan,
                                           Function::Sqrt, Function::Exp, Function::Ln};
            return Expr::call(fns[pick(6)], make(depth - 1));
        }
        default: {
            static const ExprKind ops[] = {ExprKind::Add, ExprKind::Sub, ExprKind::Mul, ExprKind::Div};
            return Expr::binary(ops[pick(4)], make(depth - 1), make(depth - 1));
        }
        }
    }
};

} // namespace testing_helpers
