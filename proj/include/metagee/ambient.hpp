#pragma once

#include "metagee/quadring.hpp"

#include <Eigen/Core>

#include <vector>

namespace metagee {

enum class Axis { Sigma, Sigbar };

/// (R^n, Euclidean metric, J) with J diagonal, each axis scaled by sigma or
/// sigbar. Parallel by construction, so the ambient is locally metallic.
class AmbientStructure {
public:
    AmbientStructure(MetallicParams params, std::vector<Axis> signs);

    [[nodiscard]] int n() const noexcept { return static_cast<int>(signs_.size()); }
    [[nodiscard]] const std::vector<Axis>& signs() const noexcept { return signs_; }
    [[nodiscard]] const MetallicParams& params() const noexcept { return params_; }

    /// Exact diagonal entry on axis i.
    [[nodiscard]] RingElem entry(int i) const;
    /// Diagonal of J in double precision.
    [[nodiscard]] const Eigen::VectorXd& diagonal() const noexcept { return diag_; }
    [[nodiscard]] Eigen::MatrixXd matrix() const { return diag_.asDiagonal(); }

private:
    MetallicParams params_;
    std::vector<Axis> signs_;
    Eigen::VectorXd diag_;
};

Eigen::VectorXd apply_J(const AmbientStructure& s, const Eigen::VectorXd& v);

/// Exact check of the structure axioms on every axis.
bool check_metallic(const AmbientStructure& s);
/// Same check for an arbitrary diagonal: every entry must be a root of
/// x^2 - p x - q and any two distinct roots must multiply to -q.
bool check_metallic(const std::vector<RingElem>& diagonal);

/// alpha*I + beta*J with coefficients in Q[sigma].
struct JPoly {
    RingElem alpha;
    RingElem beta;

    friend bool operator==(const JPoly&, const JPoly&) = default;
};

/// Product of two polynomials in J, reduced with J^2 = pJ + qI.
JPoly compose(const JPoly& x, const JPoly& y);
JPoly operator+(const JPoly& x, const JPoly& y);

struct Projectors {
    JPoly l;
    JPoly m;
};

Projectors projectors(const AmbientStructure& s);
Projectors projectors(const MetallicParams& params);

} // namespace metagee
