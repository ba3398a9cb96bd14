#include "oracles.hpp"
#include "pspin/errors.hpp"
#include "pspin/landscape.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

using namespace pspin;
using doctest::Approx;

TEST_CASE("binomial") {
    CHECK(binomial(10, 3) == 120.0);
    CHECK(binomial(5, 0) == 1.0);
    CHECK(binomial(5, 6) == 0.0);
    CHECK(binomial(40, 20) == static_cast<double>(oracle::binom(40, 20)));
}

TEST_CASE("revolving door visits every subset once with single swaps") {
    for (std::size_t n = 1; n <= 9; ++n) {
        for (std::size_t k = 1; k <= n; ++k) {
            RevolvingDoor door(n, k);
            std::set<std::vector<std::size_t>> seen;
            std::vector<std::size_t> prev(door.current().begin(), door.current().end());
            seen.insert(prev);
            while (auto sw = door.next()) {
                std::vector<std::size_t> cur(door.current().begin(), door.current().end());
                CHECK(std::is_sorted(cur.begin(), cur.end()));
                CHECK(cur.back() < n);
                // cur = prev - out + in.
                auto expect = prev;
                auto it = std::find(expect.begin(), expect.end(), sw->out);
                REQUIRE(it != expect.end());
                *it = sw->in;
                std::sort(expect.begin(), expect.end());
                CHECK(expect == cur);
                CHECK(seen.insert(cur).second);
                prev = cur;
            }
            CHECK(seen.size() == static_cast<std::size_t>(oracle::binom(static_cast<int>(n), static_cast<int>(k))));
        }
    }
}

TEST_CASE("certify_local_min") {
    auto xi = PatternMatrix::generate(20, 1, 2);
    auto ex = exponents(2.0);
    auto ok = certify_local_min(xi.row(0), xi, ex);
    CHECK(ok.is_min);
    CHECK(ok.min_delta == Approx(1.0 - std::pow(18.0 / 20.0, 2)));

    auto off = xi.row(0);
    off.flip(7);
    auto bad = certify_local_min(off, xi, ex);
    CHECK_FALSE(bad.is_min);
    REQUIRE(bad.witness.has_value());
    CHECK(*bad.witness == 7);
}

TEST_CASE("sphere scan single-pattern closed form") {
    const std::size_t n1 = 16;
    auto xi = PatternMatrix::generate(n1, 1, 3);
    Rng rng(1);
    auto zero = sphere_scan(0, 0, xi, exponents(2.0), ScanMode::exhaustive(), rng);
    CHECK(zero.min_gap == 0.0);
    for (std::size_t n = 1; n <= n1; ++n) {
        auto s = sphere_scan(0, n, xi, exponents(2.0), ScanMode::exhaustive(), rng);
        const double expect = 1.0 - std::pow(1.0 - 2.0 * n / n1, 2.0);
        CHECK(s.min_gap == Approx(expect).epsilon(1e-12).scale(1.0));
        CHECK(s.complete);
        CHECK(s.visited == static_cast<std::size_t>(oracle::binom(n1, static_cast<int>(n))));
    }
}

TEST_CASE("sphere scan matches brute force and is thread independent") {
    const std::size_t n1 = 14;
    auto xi = PatternMatrix::generate(n1, 4, 21);
    auto rows = oracle::rows_of(xi);
    for (double p : {1.5, 3.0}) {
        auto ex = exponents(p);
        const double h0 = oracle::energy(rows, xi.row(0).values(), p);
        for (std::size_t radius : {1, 3, 6}) {
            double best = INFINITY;
            for (std::uint64_t b = 0; b < (1u << n1); ++b) {
                if (static_cast<std::size_t>(__builtin_popcountll(b)) != radius) continue;
                auto v = xi.row(0).values();
                for (std::size_t i = 0; i < n1; ++i)
                    if ((b >> i) & 1U) v[i] = -v[i];
                best = std::min(best, oracle::energy(rows, v, p) - h0);
            }
            Rng r1(0), r4(0);
            auto one = sphere_scan(0, radius, xi, ex, ScanMode::exhaustive(), r1, 1);
            auto four = sphere_scan(0, radius, xi, ex, ScanMode::exhaustive(), r4, 4);
            CHECK(one.min_gap == Approx(best).epsilon(1e-9).scale(1.0));
            CHECK(one.min_gap == four.min_gap);
        }
    }
}

TEST_CASE("sampled scans are nested and bound the exhaustive minimum") {
    auto xi = PatternMatrix::generate(30, 6, 4);
    auto ex = exponents(3.0);
    Rng e(0);
    auto full = sphere_scan(0, 4, xi, ex, ScanMode::exhaustive(), e);
    Rng a(5), b(5);
    auto small = sphere_scan(0, 4, xi, ex, ScanMode::sampled(100), a);
    auto large = sphere_scan(0, 4, xi, ex, ScanMode::sampled(2000), b);
    CHECK(small.visited == 100);
    CHECK(large.visited == 2000);
    CHECK(large.min_gap <= small.min_gap);
    CHECK(full.min_gap <= large.min_gap);
    CHECK_FALSE(small.complete);
}

TEST_CASE("exhaustive scan past the budget throws") {
    auto xi = PatternMatrix::generate(60, 2, 1);
    Rng rng(0);
    CHECK_THROWS_AS(sphere_scan(0, 10, xi, exponents(2.0), ScanMode::exhaustive(), rng), BudgetError);
}

TEST_CASE("barrier profile csv") {
    auto xi = PatternMatrix::generate(20, 2, 1);
    std::vector<std::size_t> radii{1, 2};
    auto prof = barrier_profile(0, radii, xi, exponents(2.0), ScanMode::exhaustive(), 3);
    std::ostringstream os;
    std::vector<BarrierProfile> v{prof};
    write_barrier_csv(os, v);
    auto text = os.str();
    CHECK(text.rfind("mu,radius,min_gap,mode,samples,seed\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 3);
}

TEST_CASE("single pattern landscape") {
    const std::size_t n1 = 12;
    auto xi = PatternMatrix::generate(n1, 1, 8);
    for (double p : {2.0, 3.0}) {
        auto ex = exponents(p);
        auto set = enumerate_local_minima(xi, ex, LocalMinScope::all_states());
        std::vector<SpinState> expect{xi.row(0), xi.row(0).negated()};
        std::sort(expect.begin(), expect.end());
        CHECK(set.states == expect);
        Rng rng(1);
        auto gs = ground_state(xi, ex, GroundStateMode::exhaustive(), rng);
        CHECK(gs.energy == -1.0);
        CHECK((gs.state == xi.row(0) || gs.state == xi.row(0).negated()));
    }
}

TEST_CASE("local minima in a ball are the all-states minima near the pattern") {
    auto xi = PatternMatrix::generate(14, 2, 33);
    auto ex = exponents(3.0);
    auto all = enumerate_local_minima(xi, ex, LocalMinScope::all_states());
    auto ball = enumerate_local_minima(xi, ex, LocalMinScope::ball(0, 0.25));
    std::vector<SpinState> expect;
    for (const auto& s : all.states)
        if (hamming(s, xi.row(0)) <= 3) expect.push_back(s);
    CHECK(ball.states == expect);
}

TEST_CASE("ground state search") {
    auto xi = PatternMatrix::generate(16, 3, 2);
    auto ex = exponents(2.0);
    auto rows = oracle::rows_of(xi);
    double best = INFINITY;
    for (std::uint64_t b = 0; b < (1u << 16); ++b) best = std::min(best, oracle::energy(rows, oracle::state_of_bits(b, 16), 2.0));
    Rng rng(4);
    auto exact = ground_state(xi, ex, GroundStateMode::exhaustive(), rng);
    CHECK(exact.energy == Approx(best).epsilon(1e-12));
    auto multi = ground_state(xi, ex, GroundStateMode::multistart(50), rng);
    CHECK(multi.energy >= exact.energy - 1e-12);
    auto big = PatternMatrix::generate(21, 1, 1);
    CHECK_THROWS_AS(ground_state(big, ex, GroundStateMode::exhaustive(), rng), BudgetError);
}
