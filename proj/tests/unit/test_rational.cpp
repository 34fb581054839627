#include <catch2/catch.hpp>

#include "limitlab/rational.hpp"
#include "limitlab/rng.hpp"

using limitlab::Rational;

TEST_CASE("rational normal form and arithmetic") {
    CHECK(Rational(2, 4) == Rational(1, 2));
    CHECK(Rational(-2, -4) == Rational(1, 2));
    CHECK(Rational(3, -6) == Rational(-1, 2));
    CHECK(Rational(1, 2) + Rational(1, 3) == Rational(5, 6));
    CHECK(Rational(1, 2) - Rational(1, 2) == Rational(0));
    CHECK(Rational(3, 8) * Rational(4) == Rational(3, 2));
    CHECK(Rational(1, 2) / Rational(3) == Rational(1, 6));
    CHECK(Rational(7, 3).floor() == 2);
    CHECK(Rational(-7, 3).floor() == -3);
    CHECK(Rational(-7, 3).frac() == Rational(2, 3));
    CHECK(Rational(5, 4).frac() == Rational(1, 4));
    CHECK(Rational(3, 4).str() == "3/4");
}

TEST_CASE("rational comparisons") {
    CHECK(Rational(1, 3) < Rational(1, 2));
    CHECK(Rational(-1, 2) < Rational(1, 3));
    CHECK(Rational(2, 6) <= Rational(1, 3));
    CHECK(Rational(5, 3) > Rational(1));
}

TEST_CASE("rational errors") {
    CHECK_THROWS_AS(Rational(1, 0), std::invalid_argument);
    CHECK_THROWS_AS(Rational(1, 3) / Rational(0), std::domain_error);
    // overflow is detected, not wrapped
    Rational big(INT64_MAX / 2, 1);
    CHECK_THROWS_AS(big * big, std::overflow_error);
}

TEST_CASE("rational group laws on random triples") {
    limitlab::Rng rng(42);
    for (int i = 0; i < 2000; ++i) {
        auto draw = [&]() {
            return Rational(static_cast<std::int64_t>(rng.below(2001)) - 1000,
                            static_cast<std::int64_t>(rng.below(999)) + 1);
        };
        Rational a = draw(), b = draw(), c = draw();
        CHECK(a + b == b + a);
        CHECK((a + b) + c == a + (b + c));
        CHECK(a * (b + c) == a * b + a * c);
        CHECK(a + (-a) == Rational(0));
    }
}
