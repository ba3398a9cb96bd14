#include "pspin/errors.hpp"
#include "pspin/priors.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace pspin;
using doctest::Approx;

TEST_CASE("parse prior") {
    CHECK(parse_prior("gaussian").family == PriorSpec::Family::gaussian);
    CHECK(parse_prior("rademacher").family == PriorSpec::Family::rademacher);
    auto se = parse_prior("stretched_exp:1.5");
    CHECK(se.family == PriorSpec::Family::stretched_exp);
    CHECK(se.q == 1.5);
    CHECK(parse_prior("mix:0.25").weight == 0.25);
    CHECK_THROWS(parse_prior("cauchy"));
    CHECK_THROWS(parse_prior("stretched_exp:0.5"));
    CHECK_THROWS(parse_prior("mix:1.5"));
}

TEST_CASE("tail exponents") {
    CHECK(PriorSpec::gaussian().tail_exponent() == 2.0);
    CHECK(std::isinf(PriorSpec::rademacher().tail_exponent()));
    CHECK(PriorSpec::stretched_exp(3.0).tail_exponent() == 3.0);
    CHECK(PriorSpec::gauss_bernoulli_mix(0.5).tail_exponent() == 2.0);
    CHECK(std::isinf(PriorSpec::gauss_bernoulli_mix(0.0).tail_exponent()));
}

TEST_CASE("gaussian samples have unit variance") {
    Rng rng(3);
    auto z = sample(PriorSpec::gaussian(), 200000, rng);
    double s = 0, s2 = 0;
    for (double v : z) s += v, s2 += v * v;
    CHECK(std::fabs(s / z.size()) < 0.01);
    CHECK(s2 / z.size() == Approx(1.0).epsilon(0.01));
}

TEST_CASE("rademacher samples are signs") {
    Rng rng(4);
    for (double v : sample(PriorSpec::rademacher(), 1000, rng)) CHECK(std::fabs(v) == 1.0);
}

TEST_CASE("stretched exponential tail fit") {
    // log P(|z| > t) / t^q -> -1; at moderate t the polynomial prefactor
    // contributes, so compare the slope between two points instead.
    const double q = 1.5;
    Rng rng(5);
    const std::size_t n = 2'000'000;
    auto z = sample(PriorSpec::stretched_exp(q), n, rng);
    auto tail = [&](double t) {
        return static_cast<double>(std::count_if(z.begin(), z.end(), [t](double v) { return std::fabs(v) > t; })) / n;
    };
    const double t1 = 2.0, t2 = 4.0;
    const double slope = (std::log(tail(t2)) - std::log(tail(t1))) / (std::pow(t2, q) - std::pow(t1, q));
    CHECK(slope == Approx(-1.0).epsilon(0.1));
}

TEST_CASE("cumulant closed forms") {
    for (double x : {-3.0, -0.5, 0.0, 0.7, 4.0}) {
        CHECK(u_eval(PriorSpec::gaussian(), x) == Approx(x * x / 2));
        CHECK(u_eval(PriorSpec::rademacher(), x) == Approx(std::log(std::cosh(x))));
    }
    CHECK(u_eval(PriorSpec::stretched_exp(1.5), 0.0) == 0.0);
    CHECK(u_eval(PriorSpec::gauss_bernoulli_mix(0.3), 0.0) == 0.0);
    const double w = 0.3, x = 1.7;
    CHECK(u_eval(PriorSpec::gauss_bernoulli_mix(w), x) ==
          Approx(std::log(w * std::exp(x * x / 2) + (1 - w) * std::cosh(x))));
}

TEST_CASE("quadrature reproduces the gaussian cumulant") {
    for (double x = -10.0; x <= 10.0; x += 0.5)
        CHECK(std::fabs(log_mgf_quadrature(2.0, 0.5, x) - x * x / 2) <= 1e-8);
}

TEST_CASE("quadrature is even in x") {
    for (double x : {0.3, 2.0, 15.0})
        CHECK(log_mgf_quadrature(1.5, 1.0, x) == Approx(log_mgf_quadrature(1.5, 1.0, -x)).epsilon(1e-12));
}

TEST_CASE("growth ratio") {
    auto g = growth_ratio(PriorSpec::gaussian(), 2.0);
    CHECK(g.converged);
    for (double r : g.ratio) CHECK(r == Approx(0.5).epsilon(1e-12));
    CHECK(g.x.size() == 41);

    auto rad = growth_ratio(PriorSpec::rademacher(), 1.0);
    CHECK(rad.ratio.back() == Approx(1.0).epsilon(1e-2));

    auto se = growth_ratio(PriorSpec::stretched_exp(1.5), 3.0);
    CHECK(se.converged);
    CHECK(se.limit_estimate > 0.0);

    std::ostringstream os;
    write_cumulant_csv(os, g);
    CHECK(os.str().rfind("x,u,ratio\n", 0) == 0);
}

TEST_CASE("orlicz norms") {
    CHECK(psi_norm(PriorSpec::gaussian(), 2.0) == Approx(std::sqrt(8.0 / 3.0)).epsilon(1e-9));
    CHECK(psi_norm(PriorSpec::rademacher(), 2.0) == Approx(1.0 / std::sqrt(std::log(2.0))).epsilon(1e-12));
    CHECK_THROWS_AS(psi_norm(PriorSpec::gaussian(), 4.0), DomainError);
    CHECK_THROWS_AS(psi_norm(PriorSpec::gaussian(), 0.5), DomainError);
    // The functional equals 2 at the norm.
    for (double r : {1.0, 1.5, 2.0}) {
        const double n = psi_norm(PriorSpec::gaussian(), r);
        CHECK(psi_functional(PriorSpec::gaussian(), r, n) == Approx(2.0).epsilon(1e-9));
    }
    const double nse = psi_norm(PriorSpec::stretched_exp(3.0), 2.0);
    CHECK(psi_functional(PriorSpec::stretched_exp(3.0), 2.0, nse) == Approx(2.0).epsilon(1e-9));
    CHECK(std::isinf(psi_functional(PriorSpec::gaussian(), 2.0, 1.0)));
}
