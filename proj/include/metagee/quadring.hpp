#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <iosfwd>
#include <string>

namespace metagee {

using Rational = boost::multiprecision::cpp_rational;

/// The pair (p, q) fixing the metallic number sigma, the positive root of
/// x^2 - p x - q = 0. Both must be positive integers.
class MetallicParams {
public:
    MetallicParams(long p, long q);

    [[nodiscard]] long p() const noexcept { return p_; }
    [[nodiscard]] long q() const noexcept { return q_; }

    /// (p + sqrt(p^2 + 4q)) / 2 in double precision.
    [[nodiscard]] double sigma() const noexcept;
    /// p - sigma.
    [[nodiscard]] double sigbar() const noexcept { return static_cast<double>(p_) - sigma(); }

    [[nodiscard]] bool is_golden() const noexcept { return p_ == 1 && q_ == 1; }

    friend bool operator==(const MetallicParams&, const MetallicParams&) = default;

private:
    long p_;
    long q_;
};

/// Exact element a + b*sigma of Q[sigma] for a fixed (p, q).
///
/// Multiplication reduces sigma^2 to p*sigma + q. Mixing elements built on
/// different parameters throws RingMismatch.
class RingElem {
public:
    RingElem(Rational a, Rational b, MetallicParams params);

    static RingElem zero(const MetallicParams& params) { return {0, 0, params}; }
    static RingElem one(const MetallicParams& params) { return {1, 0, params}; }
    static RingElem rational(Rational a, const MetallicParams& params) { return {std::move(a), 0, params}; }
    static RingElem sigma(const MetallicParams& params) { return {0, 1, params}; }
    /// sigbar = p - sigma, the other root of the minimal polynomial.
    static RingElem sigbar(const MetallicParams& params) { return {params.p(), -1, params}; }

    [[nodiscard]] const Rational& a() const noexcept { return a_; }
    [[nodiscard]] const Rational& b() const noexcept { return b_; }
    [[nodiscard]] const MetallicParams& params() const noexcept { return params_; }

    [[nodiscard]] bool is_zero() const { return a_ == 0 && b_ == 0; }
    [[nodiscard]] bool is_rational() const { return b_ == 0; }

    /// a + b*p - b*sigma: swaps sigma and sigbar.
    [[nodiscard]] RingElem conj() const;
    /// x * conj(x) = a^2 + a b p - b^2 q, always rational.
    [[nodiscard]] Rational norm() const;
    /// conj(x) / norm(x); throws std::domain_error when the norm vanishes.
    [[nodiscard]] RingElem inverse() const;

    [[nodiscard]] double to_double() const;

    RingElem operator-() const { return {-a_, -b_, params_}; }
    RingElem& operator+=(const RingElem& rhs);
    RingElem& operator-=(const RingElem& rhs);
    RingElem& operator*=(const RingElem& rhs);
    RingElem& operator/=(const RingElem& rhs);

    friend RingElem operator+(RingElem lhs, const RingElem& rhs) { return lhs += rhs; }
    friend RingElem operator-(RingElem lhs, const RingElem& rhs) { return lhs -= rhs; }
    friend RingElem operator*(RingElem lhs, const RingElem& rhs) { return lhs *= rhs; }
    friend RingElem operator/(RingElem lhs, const RingElem& rhs) { return lhs /= rhs; }

    friend bool operator==(const RingElem& x, const RingElem& y);

    [[nodiscard]] std::string str() const;

private:
    void require_same(const RingElem& other) const;

    Rational a_;
    Rational b_;
    MetallicParams params_;
};

std::ostream& operator<<(std::ostream& os, const RingElem& x);

RingElem ring_add(const RingElem& x, const RingElem& y);
RingElem ring_mul(const RingElem& x, const RingElem& y);
RingElem ring_conj(const RingElem& x);
double ring_to_float(const RingElem& x);

} // namespace metagee
