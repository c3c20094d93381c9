#include "metagee/identity.hpp"

#include <algorithm>

namespace metagee {

std::string_view class_name(NumericClass c) {
    switch (c) {
    case NumericClass::Exact: return "exact";
    case NumericClass::Algebraic: return "algebraic";
    case NumericClass::LinearSolve: return "linear-solve";
    case NumericClass::FiniteDifference: return "FD";
    }
    return "?";
}

double tolerance(NumericClass c, double scale) {
    switch (c) {
    case NumericClass::Exact: return 0.0;
    case NumericClass::Algebraic: return 1e-10 * scale;
    case NumericClass::LinearSolve: return 1e-9 * scale;
    case NumericClass::FiniteDifference: return 2e-5 * scale;
    }
    return 0.0;
}

void settle(IdentityResult& r, double scale) {
    r.tol = tolerance(r.cls, scale);
    r.pass = r.residual <= r.tol;
}

void settle_fd(IdentityResult& r, double residual_full, double residual_half, double scale) {
    r.cls = NumericClass::FiniteDifference;
    r.tol = tolerance(r.cls, scale);
    r.residual = std::max(residual_full, residual_half);
    r.residual_half = residual_half;
    r.guard_ok = residual_half <= 4.0 * residual_full || residual_half <= 1e-3 * r.tol;
    r.pass = r.residual <= r.tol && r.guard_ok;
    if (!r.guard_ok) r.note = "residual grows when the step is halved";
}

} // namespace metagee
