#include <catch2/catch.hpp>

#include <cmath>

#include "limitlab/conjugacy.hpp"

using namespace limitlab;

namespace {

const Polynomial z2 = Polynomial::power_plus(2, 0.0);
const Polynomial z2p01 = Polynomial::power_plus(2, 0.1);
const double star01 = (1.0 - std::sqrt(0.6)) / 2.0;

} // namespace

TEST_CASE("annulus of z^2: exact circles") {
    AnnulusModel a = build_annulus(z2, 0.0, 0.25, 256);
    for (cpx w : a.inner.samples) CHECK(std::abs(std::abs(w) - 0.25) < 1e-12);
    for (cpx w : a.outer.samples) CHECK(std::abs(std::abs(w) - 0.5) < 1e-12);

    AnnulusModel b = build_annulus(z2, 0.0, 0.5, 256);
    for (cpx w : b.outer.samples) CHECK(std::abs(std::abs(w) - std::sqrt(0.5)) < 1e-12);
}

TEST_CASE("annulus of z^2 + 0.1: outer curve maps onto the inner") {
    AnnulusModel a = build_annulus(z2p01, star01, 0.25, 1024);
    CHECK(a.degree == 2);
    // p(Gamma'(theta)) = Gamma(2 theta) by construction; substitution check
    for (int j = 0; j < a.outer.size(); j += 16)
        CHECK(std::abs(z2p01.eval(a.outer.at_index(j)) - a.inner.at_index(2 * j)) < 1e-6);
    CHECK(a.inner.winding_about(star01) == 1);
    CHECK(a.outer.winding_about(star01) == 1);
}

TEST_CASE("psi0 of z^2 with matching radii is the identity on the anchors") {
    AnnulusModel a = build_annulus(z2, 0.0, 0.25, 512);
    for (int j = 0; j < a.inner.size(); j += 32) {
        cpx w = a.inner.at_index(j);
        CHECK(std::abs(psi0(a, w) - w) < 1e-10);   // Gamma anchors map in place
        CHECK(std::abs(std::abs(psi0(a, w)) - 0.25) < 1e-12);
    }
    for (int j = 0; j < a.outer.size(); j += 32) {
        cpx w = a.outer.at_index(j);
        CHECK(std::abs(psi0(a, w) - w) < 1e-10);   // and so do the Gamma' anchors
    }
    // interior point: modulus follows the fibered interpolation rule
    cpx mid = psi0(a, cpx(0.375, 0.0));
    CHECK(std::abs(mid) == Approx(std::pow(0.25, 1.0 - 0.5 * 0.5)).epsilon(1e-9));
    CHECK(std::arg(mid) == Approx(0.0).margin(1e-12));
}

TEST_CASE("psi0 conjugates p to p0 on the inner boundaries") {
    AnnulusModel a = build_annulus(z2p01, star01, 0.25, 4096);
    double worst = 0.0;
    for (int j = 0; j < a.outer.size(); ++j) {
        cpx w = a.outer.at_index(j);
        cpx lhs = psi0(a, z2p01.eval(w));
        cpx rhs = std::pow(psi0(a, w), 2);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    CHECK(worst <= 1e-6);
}

TEST_CASE("psi0 rejects points outside the annulus") {
    AnnulusModel a = build_annulus(z2, 0.0, 0.25, 256);
    CHECK_THROWS_AS(psi0(a, cpx(0.1, 0.0)), std::invalid_argument);
    CHECK_THROWS_AS(psi0(a, cpx(0.9, 0.0)), std::invalid_argument);
}

TEST_CASE("annulus construction fails outside the filled set") {
    // a Koenigs frame cannot even be built at a non-fixed point
    CHECK_THROWS(build_annulus(z2, cpx(3.0, 0.0), 0.25, 128));
    // and the repelling fixed point of z^2 is rejected
    CHECK_THROWS(build_annulus(z2, cpx(1.0, 0.0), 0.25, 128));
}

TEST_CASE("tower levels stay coherent") {
    SECTION("z^2 is exact") {
        ConjugacyMap c(z2, 0.0, 6, 0.25, 512);
        for (double r : c.level_residuals()) CHECK(r <= 1e-12);
    }
    SECTION("z^2 + 0.1 within 1e-6 per level") {
        ConjugacyMap c(z2p01, star01, 6, 0.25, 2048);
        REQUIRE(c.levels() == 6);
        for (double r : c.level_residuals()) CHECK(r <= 1e-6);
        // extending later keeps the bound
        extend_tower(c, 8);
        CHECK(c.levels() == 8);
        for (double r : c.level_residuals()) CHECK(r <= 1e-6);
    }
}

TEST_CASE("psi_hat maps the fixed history to the cone point exactly") {
    ConjugacyMap c(z2p01, star01, 4, 0.25, 1024);
    History fixed = History::unchecked(std::vector<cpx>(9, star01));
    auto img = c.psi_hat(fixed);
    CHECK(img.r == 0.0);
    CHECK(img.s.depth() == 8);
}

TEST_CASE("psi_hat on z^2 preserves the angular tower") {
    ConjugacyMap c(z2, 0.0, 4, 0.25, 1024);
    // history along the positive real axis: angles all zero
    History h = History::unchecked({cpx(0.09, 0.0), cpx(0.3, 0.0), cpx(std::sqrt(0.3), 0.0)});
    auto img = c.psi_hat(h);
    CHECK(img.s.theta0 == Approx(0.0).margin(1e-9));
    for (int d : img.s.digits) CHECK(d == 0);

    // the branch through -sqrt then -i sqrt: angles 1/2, 3/4, so digit 1
    History hb = History::unchecked({cpx(0.09, 0.0), cpx(-0.3, 0.0), cpx(0.0, -std::sqrt(0.3))});
    auto imgb = c.psi_hat(hb);
    REQUIRE(imgb.s.digits.size() == 1);
    CHECK(imgb.s.digits[0] == 1);
}

TEST_CASE("psi_hat needs enough depth to reach the tower") {
    ConjugacyMap c(z2p01, star01, 4, 0.25, 512);
    // a depth-0 history well inside Gamma cannot be unshifted into the tower
    History shallow = History::unchecked({star01 + 1e-4});
    CHECK_THROWS_AS(c.psi_hat(shallow), DepthError);
}

TEST_CASE("verify_conjugacy: z^2 is exact, z^2+0.1 within 1e-5") {
    SECTION("model case") {
        ConjugacyMap c(z2, 0.0, 6, 0.25, 1024);
        ConjugacyReport rep = verify_conjugacy(c, 120, 8, 21);
        CHECK(rep.max_residual <= 1e-12);
        CHECK(rep.min_pairwise >= 1e-9);
    }
    SECTION("perturbed case") {
        ConjugacyMap c(z2p01, star01, 6, 0.25, 4096);
        ConjugacyReport rep = verify_conjugacy(c, 120, 10, 22);
        CHECK(rep.max_residual <= 1e-5);
        CHECK(rep.min_pairwise >= 1e-9);
    }
}

TEST_CASE("refining the resolution does not increase the residual") {
    ConjugacyMap lo(z2p01, star01, 5, 0.25, 1024);
    ConjugacyMap hi(z2p01, star01, 5, 0.25, 2048);
    ConjugacyReport rl = verify_conjugacy(lo, 60, 8, 23);
    ConjugacyReport rh = verify_conjugacy(hi, 60, 8, 23);
    CHECK(rh.max_residual <= rl.max_residual + 1e-12);
}

TEST_CASE("conjugacy map serializes with residuals") {
    ConjugacyMap c(z2, 0.0, 2, 0.25, 128);
    auto j = c.to_json();
    CHECK(j["degree"] == 2);
    CHECK(j["levels"].size() == 3);
    CHECK(j["levels"][0]["curve"].size() == 128);
}
