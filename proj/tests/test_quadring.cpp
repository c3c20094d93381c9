#include "metagee/error.hpp"
#include "metagee/quadring.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using metagee::MetallicParams;
using metagee::Rational;
using metagee::RingElem;

namespace {

struct Gen {
    std::mt19937_64 rng{20240611};
    long params(long hi) { return std::uniform_int_distribution<long>(1, hi)(rng); }
    Rational rat() {
        long num = std::uniform_int_distribution<long>(-50, 50)(rng);
        long den = std::uniform_int_distribution<long>(1, 12)(rng);
        return Rational(num, den);
    }
    RingElem elem(const MetallicParams& pq) { return {rat(), rat(), pq}; }
};

} // namespace

TEST_SUITE("quadring") {

TEST_CASE("sigma is the positive root") {
    for (long p = 1; p <= 6; ++p) {
        for (long q = 1; q <= 6; ++q) {
            MetallicParams pq(p, q);
            const double s = pq.sigma();
            CHECK(s > 0);
            CHECK(s * s == doctest::Approx(p * s + q).epsilon(1e-14));
            CHECK(pq.sigbar() == doctest::Approx((p - std::sqrt(double(p * p + 4 * q))) / 2).epsilon(1e-14));
        }
    }
    CHECK(MetallicParams(1, 1).sigma() == doctest::Approx((1 + std::sqrt(5.0)) / 2).epsilon(1e-15));
    CHECK(MetallicParams(1, 1).is_golden());
}

TEST_CASE("invalid parameters are rejected") {
    CHECK_THROWS_AS(MetallicParams(0, 1), metagee::Error);
    CHECK_THROWS_AS(MetallicParams(1, 0), metagee::Error);
    CHECK_THROWS_AS(MetallicParams(-2, 3), metagee::Error);
}

TEST_CASE("sigma squared reduces exactly") {
    MetallicParams pq(3, 2);
    auto s = RingElem::sigma(pq);
    CHECK(s * s == RingElem(2, 3, pq));
    auto sb = RingElem::sigbar(pq);
    CHECK(s + sb == RingElem::rational(3, pq));
    CHECK(s * sb == RingElem::rational(-2, pq));
    CHECK(s.conj() == sb);
}

TEST_CASE("field axioms on random elements") {
    Gen g;
    int cases = 0;
    for (int i = 0; i < 1200; ++i) {
        MetallicParams pq(g.params(20), g.params(20));
        RingElem x = g.elem(pq), y = g.elem(pq), z = g.elem(pq);
        REQUIRE((x + y) + z == x + (y + z));
        REQUIRE((x * y) * z == x * (y * z));
        REQUIRE(x * y == y * x);
        REQUIRE(x * (y + z) == x * y + x * z);
        REQUIRE(x - x == RingElem::zero(pq));
        REQUIRE(x * RingElem::one(pq) == x);
        REQUIRE((x * y).conj() == x.conj() * y.conj());
        REQUIRE((x * y).norm() == x.norm() * y.norm());
        REQUIRE((x * x.conj()).is_rational());
        REQUIRE((x * x.conj()).a() == x.norm());
        if (x.norm() != 0) {
            REQUIRE(x * x.inverse() == RingElem::one(pq));
            REQUIRE((y / x) * x == y);
        }
        ++cases;
    }
    CHECK(cases == 1200);
}

TEST_CASE("float evaluation is a homomorphism") {
    Gen g;
    for (int i = 0; i < 1000; ++i) {
        MetallicParams pq(g.params(20), g.params(20));
        RingElem x = g.elem(pq), y = g.elem(pq);
        const double s = pq.sigma();
        // Oracle: direct evaluation of a + b*sigma in long double.
        auto direct = [&](const RingElem& e) {
            return static_cast<double>(static_cast<long double>(e.a().convert_to<long double>()) +
                                       e.b().convert_to<long double>() * static_cast<long double>(s));
        };
        const double scale = 1.0 + std::abs(direct(x)) * std::abs(direct(y));
        CHECK(std::abs(metagee::ring_to_float(x * y) - direct(x) * direct(y)) <= 1e-9 * scale);
        CHECK(std::abs(metagee::ring_to_float(x + y) - (direct(x) + direct(y))) <= 1e-12 * (1 + scale));
        CHECK(metagee::ring_add(x, y) == x + y);
        CHECK(metagee::ring_mul(x, y) == x * y);
        CHECK(metagee::ring_conj(x) == x.conj());
    }
}

TEST_CASE("zero has no inverse") {
    MetallicParams pq(1, 1);
    CHECK_THROWS_AS((void)RingElem::zero(pq).inverse(), std::domain_error);
    CHECK_THROWS_AS(RingElem::one(pq) / RingElem::zero(pq), std::domain_error);
}

TEST_CASE("zero divisors when sigma is rational") {
    // q = p + 1 gives sigma = p + 1 and sigbar = -1.
    MetallicParams pq(2, 3);
    CHECK(pq.sigma() == 3.0);
    RingElem x(1, 1, pq);
    CHECK(x.norm() == 0);
    CHECK_THROWS_AS((void)x.inverse(), std::domain_error);
    CHECK((x * RingElem(3, -1, pq)).is_zero());
}

TEST_CASE("mixing rings throws") {
    MetallicParams a(1, 1), b(2, 1);
    CHECK_THROWS_AS(RingElem::sigma(a) + RingElem::sigma(b), metagee::RingMismatch);
    CHECK_THROWS_AS(RingElem::sigma(a) * RingElem::sigma(b), metagee::RingMismatch);
}

TEST_CASE("printing") {
    MetallicParams pq(1, 1);
    std::ostringstream os;
    os << RingElem(Rational(1, 2), -3, pq);
    CHECK(os.str() == RingElem(Rational(1, 2), -3, pq).str());
    CHECK_FALSE(os.str().empty());
}

}
