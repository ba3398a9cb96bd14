#include "oracles.hpp"
#include "pspin/energy.hpp"
#include "pspin/errors.hpp"
#include "pspin/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace pspin;
using doctest::Approx;

TEST_CASE("hand-computed energies") {
    std::vector<SpinState> rows{SpinState::parse("++++")};
    auto xi = PatternMatrix::from_rows(rows);
    CHECK(energy_full(rows[0], xi, exponents(2.0)) == Approx(-1.0));
    CHECK(energy_full(SpinState::parse("+-++"), xi, exponents(2.0)) == Approx(-0.25));

    for (std::size_t n1 : {5, 17, 64, 200}) {
        auto x = PatternMatrix::generate(n1, 1, n1);
        CHECK(energy_full(x.row(0), x, exponents(3.0)) == Approx(-1.0));
    }
    CHECK_THROWS_AS(energy_full(SpinState(5), xi, exponents(2.0)), DomainError);
}

TEST_CASE("abs_pow") {
    CHECK(abs_pow(0, 1.5) == 0.0);
    CHECK(abs_pow(-7, 2.0) == 49.0);
    CHECK(abs_pow(-7, 3.0) == 343.0);
    CHECK(abs_pow(9, 1.5) == Approx(27.0));
}

TEST_CASE("energy agrees with the naive oracle and is even") {
    Rng rng(17);
    for (double p : {1.3, 1.5, 2.0, 2.5, 3.0, 4.0}) {
        auto ex = exponents(p);
        for (int rep = 0; rep < 10; ++rep) {
            const std::size_t n1 = 1 + rng.below(150);
            const std::size_t n2 = 1 + rng.below(8);
            auto xi = PatternMatrix::generate(n1, n2, rng.next());
            auto s = SpinState::random(n1, rng);
            const double h = energy_full(s, xi, ex);
            CHECK(h == Approx(oracle::energy(oracle::rows_of(xi), s.values(), p)).epsilon(1e-12));
            CHECK(energy_full(s.negated(), xi, ex) == h);
            CHECK(h <= 0.0);
        }
    }
}

TEST_CASE("initial overlaps") {
    auto xi = PatternMatrix::generate(33, 1, 4);
    auto ex = exponents(2.0);
    OverlapState a(xi.row(0), xi, ex);
    CHECK(a.overlaps()[0] == 33);
    OverlapState b(xi.row(0).negated(), xi, ex);
    CHECK(b.overlaps()[0] == -33);
}

TEST_CASE("delta_flip matches recomputation") {
    Rng rng(23);
    for (double p : {1.5, 2.0, 3.0}) {
        auto ex = exponents(p);
        auto xi = PatternMatrix::generate(90, 6, 31);
        auto s = SpinState::random(90, rng);
        OverlapState st(s, xi, ex);
        for (std::size_t k = 0; k < 90; ++k) {
            auto t = s;
            t.flip(k);
            const double direct = energy_full(t, xi, ex) - energy_full(s, xi, ex);
            CHECK(st.delta_flip(k) == Approx(direct).epsilon(1e-10).scale(1.0));
        }
        CHECK_THROWS_AS(st.delta_flip(90), DomainError);
    }
}

TEST_CASE("delta_flip is zero when every |m| is unchanged") {
    std::vector<SpinState> rows{SpinState::parse("++"), SpinState::parse("+-")};
    auto xi = PatternMatrix::from_rows(rows);
    OverlapState st(SpinState::parse("++"), xi, exponents(2.0));
    // Overlaps (2, 0) -> flip site 0 -> (0, -2): multiset of |m| preserved.
    CHECK(st.delta_flip(0) == 0.0);
}

TEST_CASE("p = 2 integer numerator") {
    auto xi = PatternMatrix::generate(40, 3, 2);
    auto ex = exponents(2.0);
    Rng rng(3);
    OverlapState st(SpinState::random(40, rng), xi, ex);
    for (std::size_t k = 0; k < 40; ++k)
        CHECK(static_cast<double>(st.delta_flip_p2_numerator(k)) / 1600.0 == Approx(st.delta_flip(k)));
    OverlapState s3(SpinState(40), xi, exponents(3.0));
    CHECK_THROWS_AS(s3.delta_flip_p2_numerator(0), DomainError);
}

TEST_CASE("apply_flip twice restores the state") {
    Rng rng(41);
    for (double p : {1.5, 2.0, 3.0}) {
        auto xi = PatternMatrix::generate(128, 16, 8);
        OverlapState st(SpinState::random(128, rng), xi, exponents(p));
        const auto sigma = st.sigma();
        const std::vector<std::int64_t> m(st.overlaps().begin(), st.overlaps().end());
        const double e = st.energy();
        for (std::size_t k : {0, 63, 64, 127}) {
            st.apply_flip(k);
            st.apply_flip(k);
            CHECK(st.sigma() == sigma);
            CHECK(std::vector<std::int64_t>(st.overlaps().begin(), st.overlaps().end()) == m);
            CHECK(std::fabs(st.energy() - e) <= 1e-12 * std::fabs(e));
        }
    }
}

TEST_CASE("reverse move negates the delta") {
    Rng rng(8);
    auto xi = PatternMatrix::generate(60, 5, 1);
    OverlapState st(SpinState::random(60, rng), xi, exponents(2.5));
    for (std::size_t k = 0; k < 60; k += 7) {
        const double d = st.delta_flip(k);
        st.apply_flip(k);
        CHECK(st.delta_flip(k) == Approx(-d).epsilon(1e-10));
        st.apply_flip(k);
    }
}

TEST_CASE("p = 2 energy is a quadratic form") {
    // H = -(1/n1^2) σ^T (Σ_mu ξ^mu ξ^mu^T) σ.
    auto xi = PatternMatrix::generate(25, 4, 12);
    auto rows = oracle::rows_of(xi);
    Rng rng(6);
    auto s = SpinState::random(25, rng);
    auto v = s.values();
    double q = 0.0;
    for (std::size_t i = 0; i < 25; ++i)
        for (std::size_t j = 0; j < 25; ++j) {
            long long w = 0;
            for (const auto& r : rows) w += r[i] * r[j];
            q += static_cast<double>(w * v[i] * v[j]);
        }
    CHECK(energy_full(s, xi, exponents(2.0)) == Approx(-q / 625.0).epsilon(1e-13));
}

TEST_CASE("split overlaps sum to the full overlap") {
    auto xi = PatternMatrix::generate(50, 3, 5);
    Rng rng(7);
    auto s = SpinState::random(50, rng);
    FlipSet j({0, 4, 9, 33});
    auto sp = split_overlaps(s, xi, j);
    for (std::size_t mu = 0; mu < 3; ++mu)
        CHECK((sp.x[mu] + sp.y[mu]) * std::sqrt(50.0) == Approx(static_cast<double>(xi.overlap(mu, s))));
}

TEST_CASE("gap representation") {
    auto xi = PatternMatrix::generate(64, 5, 3);
    CHECK(gap_representation(xi, FlipSet{}, exponents(2.0)).lhs == 0.0);
    CHECK(gap_representation(xi, FlipSet{}, exponents(2.0)).rhs == 0.0);
    std::vector<std::size_t> big(32);
    std::iota(big.begin(), big.end(), 0);
    CHECK_THROWS_AS(gap_representation(xi, FlipSet(big), exponents(2.0)), DomainError);
}
