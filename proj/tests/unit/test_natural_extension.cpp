#include <catch2/catch.hpp>

#include <cmath>
#include <set>

#include "limitlab/natural_extension.hpp"

using namespace limitlab;

namespace {

const Polynomial z2 = Polynomial::power_plus(2, 0.0);
const Polynomial z2p01 = Polynomial::power_plus(2, 0.1);

std::vector<cpx> circle_path(cpx center, double radius, int steps, cpx start) {
    // closed loop starting and ending at start
    double phase = std::arg(start - center);
    std::vector<cpx> path;
    path.reserve(static_cast<std::size_t>(steps) + 1);
    for (int i = 0; i <= steps; ++i)
        path.push_back(center + std::polar(radius, phase + 2.0 * M_PI * i / steps));
    path.back() = start;
    return path;
}

} // namespace

TEST_CASE("history construction enforces the step invariant") {
    CHECK_NOTHROW(History(z2, {cpx(1.0, 0.0), cpx(-1.0, 0.0), cpx(0.0, 1.0)}));
    CHECK_THROWS_AS(History(z2, {cpx(1.0, 0.0), cpx(0.5, 0.0)}), HistoryError);
}

TEST_CASE("fiber of z^2 over 1 at depth 2") {
    auto hs = fiber(z2, 1.0, 2);
    REQUIRE(hs.size() == 4);
    std::set<std::pair<double, double>> deepest;
    for (const History& h : hs) {
        CHECK(h.step_residual(z2) < 1e-12);
        CHECK(std::abs(h.entry(1) * h.entry(1) - h.entry(0)) < 1e-12);
        deepest.insert({std::round(h.entry(2).real()), std::round(h.entry(2).imag())});
        CHECK_FALSE(h.ramified());
    }
    // third entries are the four fourth roots of unity
    CHECK(deepest == std::set<std::pair<double, double>>{{1, 0}, {-1, 0}, {0, 1}, {0, -1}});
}

TEST_CASE("fiber over the ramification point is flagged") {
    auto hs = fiber(z2, 0.0, 2);
    REQUIRE(hs.size() == 4);   // multiplicity count
    for (const History& h : hs) {
        CHECK(h.ramified());
        for (const cpx& z : h.entries()) CHECK(std::abs(z) < 1e-12);
    }
}

TEST_CASE("fiber of z^2 + 0.1 over 0.5 at depth 3 has eight distinct histories") {
    auto hs = fiber(z2p01, 0.5, 3);
    REQUIRE(hs.size() == 8);
    for (std::size_t i = 0; i < hs.size(); ++i)
        for (std::size_t j = i + 1; j < hs.size(); ++j) {
            double gap = 0.0;
            for (int k = 0; k <= 3; ++k) gap = std::max(gap, std::abs(hs[i].entry(k) - hs[j].entry(k)));
            CHECK(gap > 1e-6);
        }
}

TEST_CASE("fiber cardinality is d^N with multiplicity") {
    Rng rng(31);
    for (int trial = 0; trial < 8; ++trial) {
        cpx z = rng.in_disk(1.5);
        for (int N : {1, 4, 7})
            CHECK(fiber(z2p01, z, N).size() == static_cast<std::size_t>(1) << N);
    }
    // degree 3 as well
    Polynomial cubic = Polynomial::parse("0.1,0,0,1");
    CHECK(fiber(cubic, 0.7, 4).size() == 81);
}

TEST_CASE("fiber separation for z^2 over 1") {
    auto hs = fiber(z2, 1.0, 10);
    REQUIRE(hs.size() == 1024);
    // pairwise distinctness at the deepest entry: the 2^10 roots of unity
    std::set<std::pair<long, long>> keys;
    for (const History& h : hs) {
        cpx w = h.entry(10);
        keys.insert({std::lround(w.real() * 1e12), std::lround(w.imag() * 1e12)});
        CHECK(std::abs(std::abs(w) - 1.0) < 1e-12);
    }
    CHECK(keys.size() == 1024);
}

TEST_CASE("shift examples") {
    History h = History::unchecked({cpx(1, 0), cpx(1, 0), cpx(1, 0)});
    History s = h.shift(z2);
    CHECK(s.depth() == 3);
    for (const cpx& z : s.entries()) CHECK(std::abs(z - cpx(1, 0)) < 1e-15);

    History m = History::unchecked({cpx(-1, 0), cpx(0, 1)});
    History sm = m.shift(z2);
    REQUIRE(sm.depth() == 2);
    CHECK(std::abs(sm.entry(0) - cpx(1, 0)) < 1e-15);
    CHECK(std::abs(sm.entry(1) - cpx(-1, 0)) < 1e-15);
    CHECK(std::abs(sm.entry(2) - cpx(0, 1)) < 1e-15);

    double star = (1.0 - std::sqrt(0.6)) / 2.0;
    History fixed = History::unchecked(std::vector<cpx>(4, star));
    History sf = fixed.shift(z2p01);
    CHECK(sf.depth() == 4);
    for (const cpx& z : sf.entries()) CHECK(std::abs(z - star) < 1e-14);
}

TEST_CASE("unshift examples and round trips") {
    History h = History::unchecked({cpx(1, 0), cpx(-1, 0)});
    History u = h.unshift(z2);
    CHECK(u.depth() == 0);
    CHECK(std::abs(u.entry(0) + 1.0) < 1e-15);

    // extend the tail by a chosen branch: preimages of 1 are {-1, 1}, sorted
    History g = History::unchecked({cpx(1, 0), cpx(1, 0)});
    History ext = g.unshift(z2, 0);
    REQUIRE(ext.depth() == 1);
    CHECK(std::abs(ext.entry(0) - 1.0) < 1e-15);
    CHECK(std::abs(ext.entry(1) + 1.0) < 1e-15);

    CHECK_THROWS_AS(g.unshift(z2, 5), HistoryError);
    CHECK_THROWS_AS(u.unshift(z2), HistoryError);   // depth 0

    // shift(unshift(h, b)) restores h on the shared window
    for (const History& h5 : fiber(z2p01, 0.4, 5)) {
        History back = h5.unshift(z2p01, 1).shift(z2p01);
        for (int k = 0; k <= 5; ++k) CHECK(std::abs(back.entry(k) - h5.entry(k)) < 1e-12);
    }
}

TEST_CASE("monodromy of the unit loop is the deck transformation") {
    History h = History::unchecked({cpx(1, 0), cpx(1, 0)});
    auto path = circle_path(0.0, 1.0, 1024, cpx(1, 0));
    History out = continue_along_path(z2, h, path);
    CHECK(std::abs(out.entry(0) - cpx(1, 0)) < 1e-10);
    CHECK(std::abs(out.entry(1) + cpx(1, 0)) < 1e-8);   // sqrt monodromy: 1 -> -1

    // going around twice restores the branch
    History twice = continue_along_path(z2, out, path);
    CHECK(std::abs(twice.entry(1) - cpx(1, 0)) < 1e-8);
}

TEST_CASE("null-homotopic loops act trivially") {
    History h = History::unchecked({cpx(1, 0), cpx(1, 0)});
    SECTION("constant path") {
        History out = continue_along_path(z2, h, {cpx(1, 0), cpx(1, 0)});
        CHECK(std::abs(out.entry(1) - cpx(1, 0)) < 1e-12);
    }
    SECTION("small loop around 1 avoiding 0") {
        auto path = circle_path(1.0, 0.25, 256, cpx(1.25, 0));
        History based = continue_along_path(z2, h, {cpx(1, 0), cpx(1.25, 0)});
        History out = continue_along_path(z2, based, path);
        CHECK(std::abs(out.entry(1) - based.entry(1)) < 1e-8);
    }
}

TEST_CASE("continuation composes and inverts") {
    Rng rng(17);
    History h = fiber(z2p01, 0.8, 4)[2];
    for (int trial = 0; trial < 5; ++trial) {
        cpx mid = cpx(0.8, 0) + rng.in_disk(0.3);
        cpx end = mid + rng.in_disk(0.3);
        if (std::abs(mid) < 0.2 || std::abs(end) < 0.2) continue;   // keep clear of the critical orbit
        std::vector<cpx> leg1{cpx(0.8, 0), mid}, leg2{mid, end};
        std::vector<cpx> whole{cpx(0.8, 0), mid, end};
        History a = continue_along_path(z2p01, continue_along_path(z2p01, h, leg1), leg2);
        History b = continue_along_path(z2p01, h, whole);
        for (int k = 0; k <= 4; ++k) CHECK(std::abs(a.entry(k) - b.entry(k)) < 1e-9);

        // reversed path undoes the continuation
        std::vector<cpx> back{end, mid, cpx(0.8, 0)};
        History round = continue_along_path(z2p01, b, back);
        for (int k = 0; k <= 4; ++k) CHECK(std::abs(round.entry(k) - h.entry(k)) < 1e-8);
    }
}

TEST_CASE("continuation refuses paths through the critical orbit") {
    History h = History::unchecked({cpx(1, 0), cpx(1, 0)});
    // vertex at the critical value 0 of z^2
    CHECK_THROWS_AS(continue_along_path(z2, h, {cpx(1, 0), cpx(0, 0)}), std::invalid_argument);
    // segment crossing 0 without a vertex there: the step collapses instead
    CHECK_THROWS_AS(continue_along_path(z2, h, {cpx(1, 0), cpx(-1, 0)}), ContinuationError);
}

TEST_CASE("component labels along the preimage atlas chain") {
    SECTION("Jordan case: constant label, complete") {
        GridSpec grid{-2.0, 2.0, -2.0, 2.0, 128, 128};
        ComponentAtlas atlas = interior_components(z2p01, grid, 300);
        REQUIRE(atlas.components.size() == 1);
        PreimageAtlasChain chain(z2p01, atlas, 0, 4);
        double star = (1.0 - std::sqrt(0.6)) / 2.0;
        History fixed = History::unchecked(std::vector<cpx>(5, star));
        ComponentLabel label = component_label(fixed, chain);
        CHECK(label.complete);
        REQUIRE(label.ids.size() == 5);
        for (std::size_t i = 1; i < label.ids.size(); ++i) CHECK(label.ids[i] == label.ids[0]);
    }
    SECTION("basilica squared: a branch exits to a satellite at depth 1") {
        // q = p o p for p = z^2 - 1, so 0 is an attracting fixed point
        Polynomial q = Polynomial::parse("0,0,-2,0,1");
        GridSpec grid{-2.0, 2.0, -2.0, 2.0, 192, 192};
        ComponentAtlas atlas = interior_components(q, grid, 400);
        auto base = atlas.component_of(0.0);
        REQUIRE(base.has_value());
        PreimageAtlasChain chain(q, atlas, *base, 2);

        History fixed = History::unchecked(std::vector<cpx>(3, 0.0), true);
        ComponentLabel stay = component_label(fixed, chain);
        REQUIRE(stay.ids.size() >= 2);
        CHECK(stay.ids[0] == stay.ids[1]);

        // a depth-1 history through the satellite near sqrt(2) draws a different label
        auto roots = preimages(q, 0.1);
        cpx satellite{};
        bool found = false;
        for (cpx w : roots)
            if (w.real() > 1.2) {
                satellite = w;
                found = true;
            }
        REQUIRE(found);
        History wander = History::unchecked({cpx(0.1, 0.0), satellite});
        ComponentLabel moved = component_label(wander, chain);
        REQUIRE(moved.ids.size() == 2);
        CHECK(moved.ids[1] != stay.ids[1]);
    }
}

TEST_CASE("labels are compatible with the shift") {
    GridSpec grid{-2.0, 2.0, -2.0, 2.0, 128, 128};
    ComponentAtlas atlas = interior_components(z2p01, grid, 300);
    PreimageAtlasChain chain(z2p01, atlas, 0, 5);
    History h = fiber(z2p01, 0.3, 4)[3];
    ComponentLabel before = component_label(h, chain);
    ComponentLabel after = component_label(h.shift(z2p01), chain);
    REQUIRE(before.ids.size() >= 3);
    REQUIRE(after.ids.size() >= 4);
    // the shifted label is the old label pushed one slot deeper
    for (std::size_t i = 0; i + 1 < after.ids.size() && i < before.ids.size(); ++i)
        CHECK(after.ids[i + 1] == before.ids[i]);
}

TEST_CASE("history JSON shape") {
    History h = History::unchecked({cpx(1, 0), cpx(-1, 0)});
    auto j = h.to_json();
    CHECK(j["depth"] == 1);
    CHECK(j["entries"].size() == 2);
    CHECK(j["entries"][1][0] == -1.0);
}
