#include "oracles.hpp"
#include "pspin/dynamics.hpp"
#include "pspin/errors.hpp"
#include "pspin/landscape.hpp"

#include <doctest.h>

#include <cmath>

using namespace pspin;

TEST_CASE("flip_count guards representation error") {
    CHECK(flip_count(0.1, 200) == 20);
    CHECK(flip_count(0.3, 10) == 3);
    CHECK(flip_count(0.0, 50) == 0);
    CHECK(flip_count(0.5, 101) == 50);
}

TEST_CASE("perturb") {
    auto xi = PatternMatrix::generate(100, 1, 4);
    Rng a(1);
    CHECK(perturb(xi.row(0), 0.0, a) == xi.row(0));
    Rng b(2);
    CHECK(hamming(perturb(xi.row(0), 0.5, b), xi.row(0)) == 50);
    Rng c(3), d(3);
    CHECK(perturb(xi.row(0), 0.2, c) == perturb(xi.row(0), 0.2, d));
    Rng e(4);
    CHECK_THROWS_AS(perturb(xi.row(0), 0.7, e), DomainError);
}

TEST_CASE("descent from a local minimum makes no flips") {
    auto xi = PatternMatrix::generate(40, 1, 9);
    Rng rng(1);
    auto res = descend(xi.row(0), xi, exponents(2.0), {}, rng);
    CHECK(res.flips == 0);
    CHECK(res.converged);
    CHECK(res.stop == StopReason::local_minimum);
    CHECK(res.endpoint == xi.row(0));
    REQUIRE(res.certificate.has_value());
    CHECK(res.certificate->min_delta > 0.0);
}

TEST_CASE("descent energy trace is strictly decreasing") {
    Rng gen(77);
    for (double p : {1.5, 2.0, 3.0}) {
        for (auto rule : {DescentRule::first_improvement, DescentRule::steepest}) {
            for (auto order : {SweepOrder::fixed, SweepOrder::random_permutation}) {
                auto xi = PatternMatrix::generate(80, 20, gen.next());
                DescentPolicy pol;
                pol.rule = rule;
                pol.order = order;
                Rng rng(gen.next());
                auto start = SpinState::random(80, gen);
                auto res = descend(start, xi, exponents(p), pol, rng);
                REQUIRE(res.energy_trace.size() == res.flips + 1);
                for (std::size_t i = 1; i < res.energy_trace.size(); ++i)
                    CHECK(res.energy_trace[i] < res.energy_trace[i - 1]);
                CHECK(res.energy_trace.back() ==
                      doctest::Approx(energy_full(res.endpoint, xi, exponents(p))).epsilon(1e-9));
                if (res.converged) {
                    auto chk = certify_local_min(res.endpoint, xi, exponents(p), std::nullopt, pol.convention);
                    CHECK(chk.is_min);
                }
            }
        }
    }
}

TEST_CASE("descent stops on the sweep cap") {
    auto xi = PatternMatrix::generate(200, 50, 5);
    DescentPolicy pol;
    pol.max_sweeps = 1;
    Rng rng(2);
    Rng init(3);
    auto res = descend(SpinState::random(200, init), xi, exponents(3.0), pol, rng);
    CHECK(res.sweeps <= 1);
    if (!res.converged) CHECK(res.stop == StopReason::max_sweeps);
}

TEST_CASE("descent policy validation") {
    DescentPolicy pol;
    pol.max_sweeps = 0;
    CHECK_THROWS_AS(pol.validate(), DomainError);
    DescentPolicy neg;
    neg.tie_epsilon = -1.0;
    CHECK_THROWS_AS(neg.validate(), DomainError);
    CHECK(default_tie_epsilon(100, exponents(2.0)) == 0.0);
    CHECK(default_tie_epsilon(100, exponents(3.0)) > 0.0);
}

TEST_CASE("descent is deterministic given the rng") {
    auto xi = PatternMatrix::generate(120, 30, 6);
    Rng i1(9), i2(9), r1(10), r2(10);
    auto a = descend(SpinState::random(120, i1), xi, exponents(2.0), {}, r1);
    auto b = descend(SpinState::random(120, i2), xi, exponents(2.0), {}, r2);
    CHECK(a.endpoint == b.endpoint);
    CHECK(a.energy_trace == b.energy_trace);
}
