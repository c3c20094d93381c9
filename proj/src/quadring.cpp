#include "metagee/quadring.hpp"

#include "metagee/error.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <ostream>
#include <sstream>

namespace metagee {

MetallicParams::MetallicParams(long p, long q) : p_(p), q_(q) {
    if (p < 1 || q < 1) {
        throw Error("metallic parameters must be positive integers, got p=" + std::to_string(p) +
                    ", q=" + std::to_string(q));
    }
}

double MetallicParams::sigma() const noexcept {
    const double p = static_cast<double>(p_);
    const double q = static_cast<double>(q_);
    return 0.5 * (p + std::sqrt(p * p + 4.0 * q));
}

RingElem::RingElem(Rational a, Rational b, MetallicParams params)
    : a_(std::move(a)), b_(std::move(b)), params_(params) {}

void RingElem::require_same(const RingElem& other) const {
    if (!(params_ == other.params_)) throw RingMismatch();
}

RingElem RingElem::conj() const { return {a_ + b_ * params_.p(), -b_, params_}; }

Rational RingElem::norm() const {
    return a_ * a_ + a_ * b_ * params_.p() - b_ * b_ * params_.q();
}

RingElem RingElem::inverse() const {
    Rational n = norm();
    if (n == 0) throw std::domain_error("division by an element of zero norm: " + str());
    RingElem c = conj();
    return {c.a_ / n, c.b_ / n, params_};
}

double RingElem::to_double() const {
    using Big = boost::multiprecision::cpp_bin_float_50;
    Big disc = Big(params_.p()) * params_.p() + Big(4) * params_.q();
    Big sigma = (Big(params_.p()) + boost::multiprecision::sqrt(disc)) / 2;
    Big value = Big(a_) + Big(b_) * sigma;
    return value.convert_to<double>();
}

RingElem& RingElem::operator+=(const RingElem& rhs) {
    require_same(rhs);
    a_ += rhs.a_;
    b_ += rhs.b_;
    return *this;
}

RingElem& RingElem::operator-=(const RingElem& rhs) {
    require_same(rhs);
    a_ -= rhs.a_;
    b_ -= rhs.b_;
    return *this;
}

RingElem& RingElem::operator*=(const RingElem& rhs) {
    require_same(rhs);
    // (a1 + b1 s)(a2 + b2 s) with s^2 = p s + q
    Rational bb = b_ * rhs.b_;
    Rational a = a_ * rhs.a_ + bb * params_.q();
    Rational b = a_ * rhs.b_ + rhs.a_ * b_ + bb * params_.p();
    a_ = std::move(a);
    b_ = std::move(b);
    return *this;
}

RingElem& RingElem::operator/=(const RingElem& rhs) {
    require_same(rhs);
    return *this *= rhs.inverse();
}

bool operator==(const RingElem& x, const RingElem& y) {
    return x.params_ == y.params_ && x.a_ == y.a_ && x.b_ == y.b_;
}

std::string RingElem::str() const {
    std::ostringstream os;
    os << *this;
    return os.str();
}

std::ostream& operator<<(std::ostream& os, const RingElem& x) {
    return os << '(' << x.a() << ", " << x.b() << ')';
}

RingElem ring_add(const RingElem& x, const RingElem& y) { return x + y; }
RingElem ring_mul(const RingElem& x, const RingElem& y) { return x * y; }
RingElem ring_conj(const RingElem& x) { return x.conj(); }
double ring_to_float(const RingElem& x) { return x.to_double(); }

} // namespace metagee
