#include "pspin/verify_suite.hpp"

#include "pspin/dynamics.hpp"
#include "pspin/energy.hpp"
#include "pspin/errors.hpp"
#include "pspin/experiments.hpp"
#include "pspin/landscape.hpp"
#include "pspin/model.hpp"
#include "pspin/patterns.hpp"
#include "pspin/priors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>

namespace pspin {

namespace {

CheckResult judge(std::string name, double margin, std::string location, bool advisory = false) {
    CheckResult c;
    c.name = std::move(name);
    c.worst_margin = margin;
    c.location = std::move(location);
    c.status = margin >= 0.0 ? CheckStatus::pass : (advisory ? CheckStatus::advisory : CheckStatus::fail);
    return c;
}

std::string at(const char* key, double v) {
    std::ostringstream s;
    s << key << '=' << v;
    return s.str();
}

FlipSet random_flip_set(std::size_t n1, std::size_t size, Rng& rng) {
    std::vector<std::size_t> sites(n1);
    for (std::size_t i = 0; i < n1; ++i) sites[i] = i;
    for (std::size_t i = 0; i < size; ++i) std::swap(sites[i], sites[i + rng.below(n1 - i)]);
    sites.resize(size);
    return FlipSet(std::move(sites));
}

CheckResult incremental_energy(std::uint64_t seed) {
    double worst = 0.0;
    std::string where;
    for (double p : {1.5, 2.0, 3.0}) {
        const ExponentSet ex = exponents(p);
        const PatternMatrix xi = PatternMatrix::generate(128, 32, stream_key(seed, 1));
        Rng rng = Rng::stream(seed, 2);
        OverlapState state(SpinState::random(128, rng), xi, ex);
        for (int step = 0; step < 2000; ++step) {
            state.apply_flip(rng.below(128));
            const double full = energy_full(state.sigma(), xi, ex);
            const double err = std::fabs(state.energy() - full) / std::fabs(full);
            if (err > worst) {
                worst = err;
                where = at("p", p) + ", " + at("step", step);
            }
        }
    }
    return judge("incremental_energy", 1e-9 - worst, where);
}

CheckResult flip_identity(std::uint64_t seed) {
    double worst = 0.0;
    Rng rng = Rng::stream(seed, 3);
    for (int i = 0; i < 200; ++i) {
        const PatternMatrix xi = PatternMatrix::generate(64, 8, rng.next());
        const FlipSet J = random_flip_set(64, rng.below(32), rng);
        const FlipIdentity id = p2_flip_identity(xi, J, rng.below(64));
        worst = std::max(worst, std::fabs(id.lhs - id.rhs));
    }
    return judge("p2_flip_identity", 1e-10 - worst, "");
}

CheckResult gap_identity(std::uint64_t seed) {
    double worst = 0.0;
    std::string where;
    Rng rng = Rng::stream(seed, 4);
    for (double p : {1.5, 2.0, 3.0}) {
        const ExponentSet ex = exponents(p);
        for (int i = 0; i < 70; ++i) {
            const PatternMatrix xi = PatternMatrix::generate(64, 8, rng.next());
            const FlipSet J = random_flip_set(64, 1 + rng.below(31), rng);
            const GapRepresentation g = gap_representation(xi, J, ex);
            const double err = std::fabs(g.lhs - g.rhs);
            if (err > worst) {
                worst = err;
                where = at("p", p);
            }
        }
    }
    return judge("gap_representation", 1e-9 - worst, where);
}

CheckResult certify_vs_neighbours(std::uint64_t seed) {
    const std::size_t n1 = 10;
    const ExponentSet ex = exponents(2.0);
    const PatternMatrix xi = PatternMatrix::generate(n1, 3, stream_key(seed, 5));
    double mismatches = 0.0;
    for (std::uint32_t bits = 0; bits < (1U << n1); ++bits) {
        std::vector<int> v(n1);
        for (std::size_t i = 0; i < n1; ++i) v[i] = (bits >> i) & 1U ? 1 : -1;
        const SpinState s = SpinState::from_values(v);
        const double e = energy_full(s, xi, ex);
        bool naive = true;
        for (std::size_t k = 0; k < n1; ++k) {
            SpinState t = s;
            t.flip(k);
            if (!(energy_full(t, xi, ex) > e)) naive = false;
        }
        if (naive != certify_local_min(s, xi, ex).is_min) mismatches += 1.0;
    }
    return judge("certify_local_min_oracle", -mismatches, "n1=10, n2=3, p=2");
}

CheckResult single_pattern(std::uint64_t seed) {
    double margin = 0.0;
    std::string where;
    for (double p : {2.0, 3.0}) {
        const ExponentSet ex = exponents(p);
        const PatternMatrix xi = PatternMatrix::generate(12, 1, stream_key(seed, 6));
        const SpinState pattern = xi.row(0);
        Rng rng = Rng::stream(seed, 7);
        const auto set = enumerate_local_minima(xi, ex, LocalMinScope::all_states());
        std::vector<SpinState> expected{pattern, pattern.negated()};
        std::sort(expected.begin(), expected.end());
        const GroundState g = ground_state(xi, ex, GroundStateMode::exhaustive(), rng);
        const bool ok = certify_local_min(pattern, xi, ex).is_min && set.states == expected && g.energy == -1.0;
        if (!ok) {
            margin = -1.0;
            where = at("p", p);
        }
    }
    return judge("single_pattern_landscape", margin, where);
}

CheckResult revolving_door() {
    double bad = 0.0;
    std::string where;
    for (std::size_t k = 0; k <= 10; ++k) {
        RevolvingDoor door(10, k);
        std::set<std::vector<std::size_t>> seen;
        auto cur = std::vector<std::size_t>(door.current().begin(), door.current().end());
        seen.insert(cur);
        while (auto s = door.next()) {
            auto next = std::vector<std::size_t>(door.current().begin(), door.current().end());
            std::vector<std::size_t> expect = cur;
            auto it = std::find(expect.begin(), expect.end(), s->out);
            if (it == expect.end() || std::find(cur.begin(), cur.end(), s->in) != cur.end()) {
                bad += 1.0;
            } else {
                *it = s->in;
                std::sort(expect.begin(), expect.end());
                if (expect != next) bad += 1.0;
            }
            seen.insert(next);
            cur = next;
        }
        if (static_cast<double>(seen.size()) != binomial(10, k)) {
            bad += 1.0;
            where = at("k", static_cast<double>(k));
        }
    }
    return judge("revolving_door_order", -bad, where);
}

CheckResult sphere_closed_form(std::uint64_t seed) {
    const std::size_t n1 = 20;
    double worst = 0.0;
    std::string where;
    for (double p : {2.0, 3.0}) {
        const ExponentSet ex = exponents(p);
        const PatternMatrix xi = PatternMatrix::generate(n1, 1, stream_key(seed, 8));
        Rng rng(seed);
        for (std::size_t n = 0; n <= n1; ++n) {
            const double got = sphere_scan(0, n, xi, ex, ScanMode::exhaustive(), rng).min_gap;
            const double want = 1.0 - std::pow(std::fabs(1.0 - 2.0 * static_cast<double>(n) / n1), p);
            const double err = std::fabs(got - want);
            if (err > worst) {
                worst = err;
                where = at("p", p) + ", " + at("radius", static_cast<double>(n));
            }
        }
    }
    return judge("sphere_scan_single_pattern", 1e-12 - worst, where);
}

CheckResult sampled_scan_bounds(std::uint64_t seed) {
    const ExponentSet ex = exponents(2.0);
    const PatternMatrix xi = PatternMatrix::generate(16, 3, stream_key(seed, 9));
    Rng r0(seed);
    const double exact = sphere_scan(0, 4, xi, ex, ScanMode::exhaustive(), r0).min_gap;
    Rng r1 = Rng::stream(seed, 10);
    Rng r2 = Rng::stream(seed, 10);
    const double few = sphere_scan(0, 4, xi, ex, ScanMode::sampled(50), r1).min_gap;
    const double more = sphere_scan(0, 4, xi, ex, ScanMode::sampled(400), r2).min_gap;
    return judge("sampled_scan_one_sided", std::min(few - more, more - exact), "n1=16, radius=4");
}

CheckResult descent_endpoints(std::uint64_t seed) {
    const ExponentSet ex = exponents(2.0);
    const PatternMatrix xi = PatternMatrix::generate(12, 2, stream_key(seed, 11));
    const auto set = enumerate_local_minima(xi, ex, LocalMinScope::all_states());
    Rng rng = Rng::stream(seed, 12);
    double missing = 0.0;
    for (int i = 0; i < 30; ++i) {
        const DescentResult d = descend(SpinState::random(12, rng), xi, ex, DescentPolicy{}, rng);
        if (d.converged && !std::binary_search(set.states.begin(), set.states.end(), d.endpoint)) missing += 1.0;
    }
    return judge("descent_endpoints_are_minima", -missing, "n1=12, n2=2, p=2");
}

CheckResult energy_mean_p2(std::uint64_t seed, std::size_t threads) {
    Rng rng = Rng::stream(seed, 13);
    const auto s = pattern_energy_stats(exponents(2.0), 100, 50, 2000, rng, threads);
    return judge("pattern_energy_mean_p2", 3.0 * s.std_error - std::fabs(s.mean - s.reference), "n1=100, n2=50");
}

CheckResult energy_crude_p3(std::uint64_t seed, std::size_t threads) {
    Rng rng = Rng::stream(seed, 14);
    const auto s = pattern_energy_stats(exponents(3.0), 100, 50, 2000, rng, threads);
    return judge("pattern_energy_crude_bound_p3", s.crude_bound - (std::fabs(s.mean) - 3.0 * s.std_error),
                 "n1=100, n2=50", true);
}

CheckResult constants() {
    double worst = 0.0;
    std::string where;
    for (double p : {1.5, 2.0, 3.0}) {
        const double closed = std::pow(2.0, p / 2.0) * (p / 2.0) * std::tgamma(p / 2.0);
        const double err = std::fabs(e_constant(p) - closed) / closed;
        if (err > worst) {
            worst = err;
            where = at("p", p);
        }
    }
    return judge("e_constant_closed_form", 1e-10 - worst, where);
}

CheckResult gaussian_quadrature() {
    double worst = 0.0;
    std::string where;
    for (int i = -20; i <= 20; ++i) {
        const double x = 0.5 * i;
        const double err = std::fabs(log_mgf_quadrature(2.0, 0.5, x) - 0.5 * x * x);
        if (err > worst) {
            worst = err;
            where = at("x", x);
        }
    }
    return judge("gaussian_cumulant_quadrature", 1e-8 - worst, where);
}

CheckResult orlicz_norms() {
    const double g = std::fabs(psi_norm(PriorSpec::gaussian(), 2.0) - std::sqrt(8.0 / 3.0));
    const double r = std::fabs(psi_norm(PriorSpec::rademacher(), 2.0) - 1.0 / std::sqrt(std::log(2.0)));
    bool diverges = false;
    try {
        psi_norm(PriorSpec::gaussian(), 4.0);
    } catch (const DomainError&) {
        diverges = true;
    }
    const double margin = std::min(1e-6 - std::max(g, r), diverges ? 1.0 : -1.0);
    return judge("orlicz_norms", margin, "");
}

CheckResult growth_limits() {
    const auto gauss = growth_ratio(PriorSpec::gaussian(), 2.0);
    double margin = 1.0;
    std::string where;
    for (double v : gauss.ratio)
        if (v != 0.5) margin = -1.0, where = "gaussian";
    const auto rad = growth_ratio(PriorSpec::rademacher(), 1.0);
    if (!rad.converged || std::fabs(rad.limit_estimate - 1.0) > 0.01) margin = -1.0, where = "rademacher";
    const auto se = growth_ratio(PriorSpec::stretched_exp(1.5), 3.0);
    if (!se.converged || !(se.limit_estimate > 0.0)) margin = -1.0, where = "stretched_exp:1.5";
    const auto mix = growth_ratio(PriorSpec::gauss_bernoulli_mix(0.05), 2.0);
    if (!mix.converged || !(mix.limit_estimate > 0.0)) margin = -1.0, where = "mix:0.05";
    return judge("cumulant_growth_limits", margin, where);
}

CheckResult cumulant_shape() {
    double worst = 1.0;
    std::string where;
    for (const auto& prior : {PriorSpec::gaussian(), PriorSpec::rademacher(), PriorSpec::stretched_exp(1.5),
                              PriorSpec::stretched_exp(3.0), PriorSpec::gauss_bernoulli_mix(0.3)}) {
        std::vector<double> u;
        for (int i = -40; i <= 40; ++i) {
            const double x = 0.25 * i;
            const double v = u_eval(prior, x);
            const double odd = std::fabs(v - u_eval(prior, -x));
            if (-odd < worst) worst = -odd, where = prior.label() + " evenness";
            u.push_back(v);
        }
        for (std::size_t i = 1; i + 1 < u.size(); ++i) {
            const double second = u[i - 1] - 2.0 * u[i] + u[i + 1] + 1e-8;
            if (second < worst) worst = second, where = prior.label() + " convexity";
        }
        if (u[40] != 0.0) worst = -1.0, where = prior.label() + " u(0)";
    }
    // Evenness is exact by construction; a zero margin is a pass.
    return judge("cumulant_even_convex", worst, where);
}

CheckResult tail_check(const char* name, const SumSpec& spec, std::vector<double> grid, std::size_t trials,
                       std::uint64_t seed, std::size_t threads) {
    Rng rng(seed);
    const TailCheck t = empirical_tail(spec, grid, trials, rng, threads);
    double margin = 1.0;
    std::string where;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double m = t.bound[i] + 3.0 * t.std_error[i] - t.empirical[i];
        if (m < margin) margin = m, where = at("t", grid[i]);
    }
    return judge(name, margin, spec.label() + (where.empty() ? "" : ", " + where));
}

CheckResult split_second(std::uint64_t seed, std::size_t threads) {
    Rng rng(seed);
    const double r = 0.1;
    const std::size_t n1 = 1000;
    const Estimate e = split_second_moment(r, n1, 10000, rng, threads);
    const double want = static_cast<double>(flip_count(r, n1)) / static_cast<double>(n1);
    return judge("split_second_moment", 3.0 * e.std_error - std::fabs(e.mean - want), "r=0.1, n1=1000");
}

CheckResult moment_bound(double p, std::uint64_t seed, std::size_t threads, bool advisory) {
    Rng rng(seed);
    const Estimate e = overlap_moment(p, 64, 20000, rng, threads);
    const double bound = overlap_moment_bound(p, 64);
    return judge("overlap_moment_bound_p" + std::to_string(static_cast<int>(p)),
                 (bound - (e.mean - 3.0 * e.std_error)) / bound, "n1=64", advisory);
}

CheckResult split_psi2(const char* name, double lambda_over_sqrt_r, std::uint64_t seed, std::size_t threads,
                       bool advisory) {
    Rng rng(seed);
    const double r = 0.1;
    const Estimate e = split_psi2_functional(r, 1000, 1.05 * lambda_over_sqrt_r * std::sqrt(r), 10000, rng, threads);
    return judge(name, 2.0 - (e.mean + 3.0 * e.std_error), "r=0.1, n1=1000, 5% slack", advisory);
}

CheckResult flip_psi(std::uint64_t seed, std::size_t threads) {
    double margin = 1.0;
    std::string where;
    const double r = 0.1;
    for (double p : {1.5, 2.0, 3.0}) {
        Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(p * 10));
        const double scale = 1.05 * std::pow(3.0 * std::sqrt(r * (1.0 - r)), p / 2.0);
        const Estimate e = flip_psi_functional(p, r, 1000, scale, 10000, rng, threads);
        const double m = 2.0 - (e.mean + 3.0 * e.std_error);
        if (m < margin) margin = m, where = at("p", p);
    }
    return judge("flip_difference_psi_norm", margin, where + ", r=0.1, n1=1000, 5% slack", true);
}

CheckResult sweep_determinism(std::uint64_t seed) {
    SweepConfig c;
    c.p_values = {3.0, 1.5};
    c.alpha_values = {0.05};
    c.n1_values = {64};
    c.r = 0.1;
    c.trials = 6;
    c.master_seed = seed;
    std::string csv[2];
    for (int i = 0; i < 2; ++i) {
        c.threads = i == 0 ? 1 : 3;
        const auto res = retrieval_sweep(c);
        std::ostringstream out;
        write_trial_csv(out, res.records);
        csv[i] = out.str();
    }
    return judge("sweep_thread_independence", csv[0] == csv[1] ? 0.0 : -1.0, "threads 1 vs 3");
}

} // namespace

std::vector<CheckResult> run_verification_suite(std::uint64_t seed, std::size_t threads) {
    std::vector<std::function<std::vector<CheckResult>()>> checks{
        [&] { return std::vector{incremental_energy(seed)}; },
        [&] { return std::vector{flip_identity(seed)}; },
        [&] { return std::vector{gap_identity(seed)}; },
        [&] { return std::vector{certify_vs_neighbours(seed)}; },
        [&] { return std::vector{single_pattern(seed)}; },
        [&] { return std::vector{revolving_door()}; },
        [&] { return std::vector{sphere_closed_form(seed)}; },
        [&] { return std::vector{sampled_scan_bounds(seed)}; },
        [&] { return std::vector{descent_endpoints(seed)}; },
        [&] { return std::vector{energy_mean_p2(seed, threads)}; },
        [&] { return std::vector{energy_crude_p3(seed, threads)}; },
        [&] { return std::vector{constants()}; },
        [&] { return std::vector{gaussian_quadrature()}; },
        [&] { return std::vector{orlicz_norms()}; },
        [&] { return std::vector{growth_limits()}; },
        [&] { return std::vector{cumulant_shape()}; },
        [&] {
            std::vector<double> grid;
            for (int k = 1; k <= 6; ++k) grid.push_back(100.0 * k);
            return std::vector{tail_check("rademacher_sum_tail", SumSpec::rademacher(10000), grid, 10000,
                                          stream_key(seed, 20), threads)};
        },
        [&] {
            std::vector<double> grid{0.02, 0.05, 0.1, 0.2, 0.3};
            return std::vector{tail_check("centered_power_tail_p2", SumSpec::centered_power(2.0, 100, 50), grid, 2000,
                                          stream_key(seed, 21), threads)};
        },
        [&] {
            return std::vector{tail_check("zero_sum_tail", SumSpec::zero(10), {0.5, 1.0}, 1000, stream_key(seed, 22),
                                          threads)};
        },
        [&] { return std::vector{split_second(stream_key(seed, 23), threads)}; },
        [&] { return std::vector{moment_bound(2.0, stream_key(seed, 24), threads, false)}; },
        [&] { return std::vector{moment_bound(3.0, stream_key(seed, 25), threads, true)}; },
        [&] { return std::vector{moment_bound(4.0, stream_key(seed, 26), threads, true)}; },
        [&] {
            return std::vector{split_psi2("split_psi2_sqrt_3r_over_2", std::sqrt(1.5), stream_key(seed, 27),
                                          threads, true)};
        },
        [&] {
            return std::vector{split_psi2("split_psi2_gaussian_constant", std::sqrt(8.0 / 3.0), stream_key(seed, 28),
                                          threads, false)};
        },
        [&] { return std::vector{flip_psi(stream_key(seed, 29), threads)}; },
        [&] { return appendix_checks(1e-3); },
        [&] { return std::vector{sweep_determinism(seed)}; },
    };
    std::vector<CheckResult> out;
    for (std::size_t i = 0; i < checks.size(); ++i) {
        try {
            for (auto& r : checks[i]()) out.push_back(std::move(r));
        } catch (const std::exception& e) {
            out.push_back({"check_" + std::to_string(i), CheckStatus::fail, -1.0, std::string("exception: ") + e.what()});
        }
    }
    return out;
}

bool suite_passed(const std::vector<CheckResult>& results) {
    return std::none_of(results.begin(), results.end(), [](const CheckResult& r) { return r.status == CheckStatus::fail; });
}

} // namespace pspin
