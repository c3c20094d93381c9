#pragma once

#include <string>
#include <string_view>

namespace metagee {

/// How a residual was produced, which fixes its tolerance.
enum class NumericClass { Exact, Algebraic, LinearSolve, FiniteDifference };

std::string_view class_name(NumericClass c);

/// 0, 1e-10, 1e-9, 2e-5 scaled by `scale`.
double tolerance(NumericClass c, double scale = 1.0);

constexpr double kFdStep = 1e-5;
constexpr double kAngleTol = 1e-7;
constexpr double kConstantWarpingTol = 1e-8;

struct IdentityResult {
    std::string id;
    /// Formula text of the identity.
    std::string anchor;
    NumericClass cls = NumericClass::Algebraic;
    double residual = 0.0;
    double tol = 0.0;
    bool pass = false;
    /// FD checks only: residual at half step and the guard outcome.
    double residual_half = 0.0;
    bool guard_ok = true;
    std::string note;
};

/// Fills tol and pass for a non-FD residual.
void settle(IdentityResult& r, double scale);
/// FD verdict: both step sizes within tolerance and halving the step does
/// not grow the residual by more than 4x (residuals below 1e-3*tol count as
/// converged noise).
void settle_fd(IdentityResult& r, double residual_full, double residual_half, double scale);

} // namespace metagee
