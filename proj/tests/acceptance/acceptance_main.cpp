// Acceptance suite: desk-scale property checks, one pass/fail line per
// criterion. argv[1] is the CLI binary used by the determinism criterion.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "limitlab/limitlab.hpp"

using namespace limitlab;

namespace {

std::string g_cli;
int g_failures = 0;

void criterion(int number, const std::string& label, double budget_seconds,
               const std::function<bool(std::string&)>& body) {
    std::string detail;
    auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (elapsed > budget_seconds) {
        ok = false;
        detail += (detail.empty() ? "" : "; ") + std::string("over time budget");
    }
    std::printf("[%s] criterion %d: %s (%.1fs%s%s)\n", ok ? "PASS" : "FAIL", number, label.c_str(),
                elapsed, detail.empty() ? "" : "; ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

// ---- criterion 1: fiber cardinality ----

bool fiber_criterion(std::string& detail) {
    Rng rng(1001);
    for (const Polynomial& p : {Polynomial::power_plus(2, 0.0), Polynomial::power_plus(2, 0.1)}) {
        // forward critical orbit to stay away from
        std::vector<cpx> avoid;
        for (const cpx& c0 : critical_points(p)) {
            cpx v = c0;
            for (int j = 0; j <= 12; ++j) {
                avoid.push_back(v);
                v = p.eval(v);
                if (std::abs(v) > 8.0) break;
            }
        }
        for (int trial = 0; trial < 100; ++trial) {
            cpx z;
            for (;;) {
                z = rng.in_disk(1.5);
                bool clear = true;
                for (const cpx& q : avoid)
                    if (std::abs(z - q) < 1e-3) clear = false;
                if (clear) break;
            }
            for (int N = 1; N <= 10; ++N) {
                auto hs = fiber(p, z, N);
                if (hs.size() != static_cast<std::size_t>(1) << N) {
                    detail = "wrong cardinality at N=" + std::to_string(N);
                    return false;
                }
                if (N < 10) continue;
                // pairwise distinctness via the deepest entries (sort + window)
                std::vector<cpx> deep;
                deep.reserve(hs.size());
                for (const History& h : hs) deep.push_back(h.entry(N));
                std::sort(deep.begin(), deep.end(), [](cpx a, cpx b) {
                    if (a.real() != b.real()) return a.real() < b.real();
                    return a.imag() < b.imag();
                });
                for (std::size_t i = 0; i < deep.size(); ++i)
                    for (std::size_t j = i + 1; j < deep.size(); ++j) {
                        if (deep[j].real() - deep[i].real() > 1e-9) break;
                        if (std::abs(deep[j] - deep[i]) <= 1e-9) {
                            detail = "fiber entries collide";
                            return false;
                        }
                    }
            }
        }
    }
    detail = "2 polynomials x 100 base points x N<=10";
    return true;
}

// ---- criterion 2: monodromy / local triviality ----

bool monodromy_criterion(std::string& detail) {
    Polynomial p = Polynomial::power_plus(2, 0.0);
    History h = History::unchecked({cpx(1, 0), cpx(1, 0)});
    std::vector<cpx> loop;
    const int steps = 1024;
    for (int i = 0; i <= steps; ++i) loop.push_back(std::polar(1.0, 2.0 * M_PI * i / steps));
    loop.back() = cpx(1, 0);
    History out = continue_along_path(p, h, loop);
    if (std::abs(out.entry(1) + 1.0) > 1e-8) {
        detail = "monodromy missed -1";
        return false;
    }
    // null-homotopic loop: identity within 1e-8
    std::vector<cpx> small;
    for (int i = 0; i <= 256; ++i)
        small.push_back(cpx(1, 0) + cpx(0.25, 0) * (std::polar(1.0, 2.0 * M_PI * i / 256) - 1.0));
    small.back() = cpx(1, 0);
    History trivially = continue_along_path(p, h, small);
    if (std::abs(trivially.entry(1) - 1.0) > 1e-8) {
        detail = "null-homotopic loop moved the branch";
        return false;
    }
    detail = "unit loop -> deck transform; trivial loop -> identity";
    return true;
}

// ---- criterion 3: solenoid model ----

bool solenoid_criterion(std::string& detail) {
    Rng rng(1003);
    for (int trial = 0; trial < 10000; ++trial) {
        int base = 2 + static_cast<int>(rng.below(3));
        SolenoidPoint<Rational> s;
        s.base = base;
        std::int64_t den = static_cast<std::int64_t>(rng.below(997)) + 1;
        s.theta0 = Rational(static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(den))), den);
        for (int i = 0; i < 10; ++i)
            s.digits.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(base))));
        // encode/decode round trip exact (tower form)
        if (!(from_angle_tower(s.angle_tower(), base) == s)) {
            detail = "tower round trip broke";
            return false;
        }
        // shift round trips exact
        int k = static_cast<int>(rng.below(static_cast<std::uint64_t>(base)));
        if (!(solenoid_shift(solenoid_unshift(s, k)) == s) ||
            !(solenoid_unshift(solenoid_shift(s), s.digits.back()) == s)) {
            detail = "shift round trip broke";
            return false;
        }
        // cone-shift conjugacy exact on towers
        auto tower = s.angle_tower();
        auto stower = solenoid_shift(s).angle_tower();
        if (!(stower[0] == (tower[0] * Rational(base)).frac())) {
            detail = "conjugacy head angle broke";
            return false;
        }
        for (std::size_t i = 1; i < stower.size(); ++i)
            if (!(stower[i] == tower[i - 1])) {
                detail = "conjugacy tower broke";
                return false;
            }
    }
    // radius law to 1e-12 in floating mode
    double worst = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
        int base = 2 + static_cast<int>(rng.below(3));
        ConePoint<double> c;
        c.r = rng.uniform(0.1, 3.0);
        c.s.base = base;
        c.s.theta0 = rng.next_double();
        for (int i = 0; i < 8; ++i)
            c.s.digits.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(base))));
        History h = decode(c);
        for (int i = 0; i <= h.depth(); ++i)
            worst = std::max(worst, std::abs(std::abs(h.entry(i)) -
                                             std::pow(c.r, 1.0 / std::pow(base, i))));
    }
    if (worst > 1e-12) {
        detail = "radius law off by " + format_double(worst);
        return false;
    }
    detail = "10^4 rational points exact; radius law " + format_double(worst);
    return true;
}

// ---- criterion 4: conjugacy psi ----

bool conjugacy_criterion(std::string& detail) {
    double star = (1.0 - std::sqrt(0.6)) / 2.0;
    ConjugacyMap c(Polynomial::power_plus(2, 0.1), star, 6, 0.25, 4096);
    ConjugacyReport rep = verify_conjugacy(c, 1000, 10, 1004);
    if (rep.max_residual > 1e-5) {
        detail = "z^2+0.1 residual " + format_double(rep.max_residual);
        return false;
    }
    if (rep.min_pairwise < 1e-9) {
        detail = "injectivity proxy broke";
        return false;
    }
    History fixed = History::unchecked(std::vector<cpx>(11, star));
    if (c.psi_hat(fixed).r != 0.0) {
        detail = "fixed history not on the cone point";
        return false;
    }
    ConjugacyMap c0(Polynomial::power_plus(2, 0.0), 0.0, 6, 0.25, 4096);
    ConjugacyReport rep0 = verify_conjugacy(c0, 1000, 10, 1004);
    if (rep0.max_residual > 1e-12) {
        detail = "z^2 residual " + format_double(rep0.max_residual);
        return false;
    }
    detail = "residuals " + format_double(rep.max_residual) + " / " + format_double(rep0.max_residual);
    return true;
}

// ---- criterion 5: solid-torus model hypotheses ----

bool torus_criterion(std::string& detail) {
    auto map = [](const TorusPoint& pt) { return f_solid_torus(2, 0.1, pt); };
    TorusDiagnostics diag = torus_diagnostics(map, {1.0, 0.1}, 1.2, 10000, 12, 1005);
    if (diag.nesting_margin < 0.08) {
        detail = "nesting margin " + format_double(diag.nesting_margin);
        return false;
    }
    if (diag.winding != 2) {
        detail = "winding " + std::to_string(diag.winding);
        return false;
    }
    if (!diag.injective) {
        detail = "injectivity failed";
        return false;
    }
    if (!diag.clouds_monotone) {
        detail = "clouds not monotone";
        return false;
    }
    detail = "margin " + format_double(diag.nesting_margin) + ", winding 2, 10^4 samples, 12 clouds";
    return true;
}

// ---- criterion 6: accessible boundary ----

bool accessible_criterion(std::string& detail) {
    for (int k = 1; k <= 12; ++k) {
        auto endpoints = cantor_accessible(k);
        if (endpoints.size() != (static_cast<std::size_t>(1) << (k + 1)) - 2) {
            detail = "cantor count wrong at k=" + std::to_string(k);
            return false;
        }
    }
    Polynomial p = Polynomial::power_plus(2, 0.1);
    double star = (1.0 - std::sqrt(0.6)) / 2.0;
    BoundaryParametrization bp = boundary_parametrization(p, star, 4096);

    HenonParams h{p, cpx(0.05, 0.0), 0.05};
    AccessibleBoundaryOptions opt;   // 64 directions
    auto probes = accessible_boundary_sample(h, bp.gamma, opt);
    int certified = 0;
    for (const BoundaryProbe& probe : probes)
        if (!probe.flagged && probe.cert.pass()) ++certified;
    if (certified * 10 < opt.directions * 9) {
        detail = "only " + std::to_string(certified) + "/64 certified";
        return false;
    }

    // a = 0 reduction: the Henon bisection matches the 1-D bisection to 1e-6
    HenonParams h0{p, cpx(0.0, 0.0), 0.05};
    auto probes0 = accessible_boundary_sample(h0, bp.gamma, opt);
    double worst = 0.0;
    for (const BoundaryProbe& probe : probes0) {
        if (probe.flagged) {
            detail = "a=0 direction flagged";
            return false;
        }
        cpx u = std::polar(1.0, probe.theta);
        double lo = 0.0, hi = 4.0;
        for (int i = 0; i < 64; ++i) {
            double mid = 0.5 * (lo + hi);
            (classify_point(p, star + mid * u, 2000).bounded() ? lo : hi) = mid;
        }
        worst = std::max(worst, std::abs(probe.t - 0.5 * (lo + hi)));
    }
    if (worst > 1e-6) {
        detail = "a=0 reduction off by " + format_double(worst);
        return false;
    }
    detail = std::to_string(certified) + "/64 certified; a=0 gap " + format_double(worst);
    return true;
}

// ---- criterion 7: limit algebra ----

bool limit_algebra_criterion(std::string& detail) {
    Rng rng(1007);
    for (int trial = 0; trial < 10000; ++trial) {
        LimitGroupElement a(static_cast<int>(rng.below(12)),
                            static_cast<std::int64_t>(rng.below(4001)) - 2000, 2);
        LimitGroupElement b(static_cast<int>(rng.below(12)),
                            static_cast<std::int64_t>(rng.below(4001)) - 2000, 2);
        if ((a + b).as_localized() != a.as_localized() + b.as_localized()) {
            detail = "value map is not additive";
            return false;
        }
        if ((a.as_localized() == b.as_localized()) != (a == b)) {
            detail = "value map is not injective";
            return false;
        }
    }
    // Jordan-curve case
    ComponentGraph g;
    g.nodes = 1;
    g.forward = {0};
    g.degree = {2};
    g.small = {false};
    g.x0 = {0};
    H1Model m = h1_model(g);
    if (m.str() != "Z[1/2]") {
        detail = "Jordan case reported " + m.str();
        return false;
    }
    // split-ness
    for (int trial = 0; trial < 1000; ++trial) {
        LocalizedInteger v(static_cast<std::int64_t>(rng.below(801)) - 400,
                           static_cast<int>(rng.below(8)), 2);
        if (m.project(m.include(0, v), 0) != v) {
            detail = "projection after inclusion is not the identity";
            return false;
        }
    }
    detail = "10^4 pairs exact; h1 = Z[1/2]; split";
    return true;
}

// ---- criterion 8: covering triviality ----

bool covering_criterion(std::string& detail) {
    // basilica-style graph
    ComponentGraph basilica;
    basilica.nodes = 5;
    basilica.forward = {1, 0, 0, 2, 2};
    basilica.degree = {2, 1, 1, 1, 1};
    basilica.small = {false, false, true, true, true};
    if (covering_trivial(basilica).kind != CoveringVerdict::Kind::Trivial) {
        detail = "basilica graph not trivial";
        return false;
    }

    Rng rng(1008);
    for (int trial = 0; trial < 1000; ++trial) {
        int big = 1 + static_cast<int>(rng.below(3));
        int n = 2 * big + 2 + static_cast<int>(rng.below(21));
        ComponentGraph g;
        g.nodes = n;
        g.forward.assign(static_cast<std::size_t>(n), 0);
        g.degree.assign(static_cast<std::size_t>(n), 1);
        g.small.assign(static_cast<std::size_t>(n), true);
        for (int i = 0; i < n; ++i)
            g.forward[static_cast<std::size_t>(i)] = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
        // all but finitely many are small, and each big node gets a dedicated
        // small node mapped onto it: the hypothesis with full reachability
        for (int b = 0; b < big; ++b) {
            g.small[static_cast<std::size_t>(b)] = false;
            g.forward[static_cast<std::size_t>(big + b)] = b;
            g.small[static_cast<std::size_t>(big + b)] = true;
        }
        CoveringVerdict v = covering_trivial(g);
        if (v.kind != CoveringVerdict::Kind::Trivial) {
            detail = "random hypothesis graph inconclusive at trial " + std::to_string(trial);
            return false;
        }
        // monotone under enlarging the small set
        for (int i = 0; i < n; ++i)
            if (!g.small[static_cast<std::size_t>(i)]) {
                g.small[static_cast<std::size_t>(i)] = true;
                break;
            }
        if (covering_trivial(g).kind != CoveringVerdict::Kind::Trivial) {
            detail = "monotonicity violated at trial " + std::to_string(trial);
            return false;
        }
    }
    detail = "basilica + 10^3 random graphs trivial; monotone";
    return true;
}

// ---- criterion 9: CLI determinism ----

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

bool determinism_criterion(std::string& detail) {
    if (g_cli.empty()) {
        detail = "CLI path not supplied";
        return false;
    }
    struct Run {
        std::string args;
        std::vector<std::string> outputs;   // paths to compare, with {} placeholder dir
    };
    std::string dir = "/tmp/limitlab_accept";
    std::system(("rm -rf " + dir + " && mkdir -p " + dir).c_str());
    std::vector<Run> runs = {
        {"render-julia --poly 0,0,1 --grid -2,2,-2,2,96,96 --seed 3 --out {}/j.ppm --json {}/j.json",
         {"{}/j.ppm", "{}/j.json"}},
        {"render-basin --poly 0.1,0,1 --a 0.05 --grid -1.5,1.5,-1.5,1.5,64,64 --seed 3 --out {}/b.ppm --json {}/b.json",
         {"{}/b.ppm", "{}/b.json"}},
        {"fibers --poly 0.1,0,1 --z 0.5 --depth 8 --seed 3 --out {}/f.jsonl --json {}/f.json",
         {"{}/f.jsonl", "{}/f.json"}},
        {"solenoid-demo --poly 0,0,1 --depth 8 --seed 3 --json {}/s.json", {"{}/s.json"}},
        {"conjugacy-check --poly 0,0,1 --depth 8 --seed 3 --json {}/c.json", {"{}/c.json"}},
        {"torus-diagnostics --poly 0,0,1 --alpha 0.1 --rho 1.2 --seed 3 --json {}/t.json",
         {"{}/t.json"}},
        {"accessible-boundary --poly 0.1,0,1 --a 0.05 --directions 64 --seed 3 --out {}/a.jsonl --json {}/a.json",
         {"{}/a.jsonl", "{}/a.json"}},
        {"homology --poly 0.1,0,1 --grid -2,2,-2,2,128,128 --json {}/h.json", {"{}/h.json"}},
        {"covering-check --json {}/k.json", {"{}/k.json"}},
    };
    auto fill = [&](std::string s) {
        for (std::size_t pos; (pos = s.find("{}")) != std::string::npos;) s.replace(pos, 2, dir);
        return s;
    };
    for (const Run& run : runs) {
        std::vector<std::string> first;
        for (int pass = 0; pass < 2; ++pass) {
            std::string cmd = g_cli + " " + fill(run.args) + " > /dev/null 2>&1";
            std::system(cmd.c_str());
            for (std::size_t i = 0; i < run.outputs.size(); ++i) {
                std::string bytes = slurp(fill(run.outputs[i]));
                if (bytes.empty()) {
                    detail = "no output from: " + run.args.substr(0, run.args.find(' '));
                    return false;
                }
                if (pass == 0)
                    first.push_back(bytes);
                else if (bytes != first[i]) {
                    detail = "bytes differ for: " + run.args.substr(0, run.args.find(' '));
                    return false;
                }
            }
        }
    }
    detail = std::to_string(runs.size()) + " commands byte-identical on re-run";
    return true;
}

} // namespace

int main(int argc, char** argv) {
    if (argc > 1) g_cli = argv[1];

    criterion(1, "fiber cardinality 2^N with distinct entries", 30.0, fiber_criterion);
    criterion(2, "monodromy and local triviality of the history fibration", 5.0, monodromy_criterion);
    criterion(3, "solenoid encode/decode exact, conjugate, radius law", 10.0, solenoid_criterion);
    criterion(4, "conjugacy to the cone-over-solenoid model is shift-equivariant", 120.0, conjugacy_criterion);
    criterion(5, "solid-torus hypotheses: nesting, winding, injectivity, clouds", 60.0,
              torus_criterion);
    criterion(6, "accessible boundary: Cantor counts, Henon probes, a=0 reduction", 180.0,
              accessible_criterion);
    criterion(7, "limit algebra: Z[1/2] direct limit, h1 model, split-ness", 5.0,
              limit_algebra_criterion);
    criterion(8, "covering triviality on component graphs", 10.0, covering_criterion);
    criterion(9, "CLI determinism: byte-identical re-runs", 300.0, determinism_criterion);

    if (g_failures) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all acceptance criteria passed\n");
    return 0;
}
