// Acceptance run: prints one PASS/FAIL line per criterion and exits non-zero
// if any criterion fails.

#include "oracles.hpp"
#include "pspin/dynamics.hpp"
#include "pspin/energy.hpp"
#include "pspin/experiments.hpp"
#include "pspin/landscape.hpp"
#include "pspin/priors.hpp"
#include "pspin/stats.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace pspin;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        if (!detail.empty()) detail += "; ";
        detail += (ok ? "" : "FAILED ") + what;
    }
};

std::string fmt(const char* f, double a) {
    char buf[96];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string fmt(const char* f, double a, double b) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

Outcome incremental_energy() {
    Outcome out;
    const std::size_t n1 = 256, n2 = 64;
    for (double p : {1.5, 2.0, 3.0}) {
        const auto ex = exponents(p);
        auto xi = PatternMatrix::generate(n1, n2, 1001);
        Rng rng(2002);
        OverlapState st(SpinState::random(n1, rng), xi, ex);
        double worst = 0.0;
        for (int step = 0; step < 10'000; ++step) {
            st.apply_flip(static_cast<std::size_t>(rng.below(n1)));
            const double full = energy_full(st.sigma(), xi, ex);
            worst = std::max(worst, std::fabs(st.energy() - full) / std::fabs(full));
        }
        out.require(worst <= 1e-9, fmt("p=%.1f max rel err %.2e", p, worst));
    }
    return out;
}

std::vector<std::size_t> random_subset(std::size_t n, std::size_t size, Rng& rng) {
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    rng.shuffle(std::span<std::size_t>(all));
    all.resize(size);
    return all;
}

Outcome p2_flip_identity_check() {
    Outcome out;
    const std::size_t n1 = 128;
    Rng rng(3003);
    double worst = 0.0;
    for (int inst = 0; inst < 1000; ++inst) {
        const std::size_t n2 = 1 + rng.below(40);
        auto xi = PatternMatrix::generate(n1, n2, rng.next());
        FlipSet j(random_subset(n1, rng.below(n1 / 2), rng));
        const auto k = static_cast<std::size_t>(rng.below(n1));
        const auto id = p2_flip_identity(xi, j, k);
        // lhs cross-checked against the naive energy difference.
        auto base = flip(xi.row(0), j);
        auto moved = base;
        moved.flip(k);
        const auto rows = oracle::rows_of(xi);
        const double naive = (n1 / 4.0) * (oracle::energy(rows, moved.values(), 2.0) -
                                           oracle::energy(rows, base.values(), 2.0));
        worst = std::max({worst, std::fabs(id.lhs - id.rhs), std::fabs(id.lhs - naive)});
    }
    out.require(worst <= 1e-10, fmt("1000 instances, max |lhs-rhs| %.2e", worst));
    return out;
}

Outcome gap_identity_check() {
    Outcome out;
    Rng rng(4004);
    for (double p : {1.5, 2.0, 3.0}) {
        const auto ex = exponents(p);
        double worst = 0.0;
        for (int inst = 0; inst < 1000; ++inst) {
            const std::size_t n1 = 16 + rng.below(200);
            const std::size_t n2 = 1 + rng.below(30);
            auto xi = PatternMatrix::generate(n1, n2, rng.next());
            FlipSet j(random_subset(n1, rng.below((n1 - 1) / 2 + 1), rng));
            const auto g = gap_representation(xi, j, ex);
            const auto rows = oracle::rows_of(xi);
            const double naive = oracle::energy(rows, xi.row(0).values(), p) -
                                 oracle::energy(rows, flip(xi.row(0), j).values(), p);
            const double scale = std::max(1.0, std::fabs(g.lhs));
            worst = std::max({worst, std::fabs(g.lhs - g.rhs) / scale, std::fabs(g.lhs - naive) / scale});
        }
        out.require(worst <= 1e-9, fmt("p=%.1f max rel diff %.2e", p, worst));

        // One pattern: H(ξ) - H(F_J ξ) = -n1^(p-kappa) phi_bar(|J|/n1).
        double worst1 = 0.0;
        for (int inst = 0; inst < 200; ++inst) {
            const std::size_t n1 = 8 + rng.below(300);
            auto xi = PatternMatrix::generate(n1, 1, rng.next());
            const std::size_t size = rng.below((n1 - 1) / 2 + 1);
            FlipSet j(random_subset(n1, size, rng));
            const auto g = gap_representation(xi, j, ex);
            const double r = static_cast<double>(size) / static_cast<double>(n1);
            const double closed = -std::pow(static_cast<double>(n1), p - ex.kappa) * phi_bar(r, p);
            worst1 = std::max({worst1, std::fabs(g.lhs - closed), std::fabs(g.rhs - closed)});
        }
        out.require(worst1 <= 1e-12, fmt("p=%.1f n2=1 closed form max err %.2e", p, worst1));
    }
    return out;
}

Outcome oracle_equivalence() {
    Outcome out;
    const std::size_t n1 = 14;
    const auto ex = exponents(2.0);
    std::size_t endpoints = 0, in_weak = 0, in_strict = 0, set_mismatch = 0, plateau = 0, total_minima = 0;
    for (std::size_t n2 : {1, 2, 3}) {
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            auto xi = PatternMatrix::generate(n1, n2, 500 + 10 * n2 + seed);
            const auto rows = oracle::rows_of(xi);

            std::set<std::vector<int>> naive_strict, naive_weak;
            for (auto& v : oracle::local_minima(rows, n1, 2.0, true)) naive_strict.insert(v);
            for (auto& v : oracle::local_minima(rows, n1, 2.0, false)) naive_weak.insert(v);

            auto to_set = [](const LocalMinSet& s) {
                std::set<std::vector<int>> r;
                for (const auto& st : s.states) r.insert(st.values());
                return r;
            };
            const auto strict = to_set(enumerate_local_minima(xi, ex, LocalMinScope::all_states(), std::nullopt,
                                                              MinimumConvention::strict));
            const auto weak = to_set(enumerate_local_minima(xi, ex, LocalMinScope::all_states(), std::nullopt,
                                                            MinimumConvention::weak));
            if (strict != naive_strict || weak != naive_weak) ++set_mismatch;
            total_minima += strict.size();

            Rng rng(stream_key(seed, n2));
            for (int start = 0; start < 100; ++start) {
                auto s0 = SpinState::random(n1, rng);
                auto res = descend(s0, xi, ex, DescentPolicy{}, rng);
                ++endpoints;
                const auto v = res.endpoint.values();
                in_weak += naive_weak.count(v);
                in_strict += naive_strict.count(v);
                plateau += res.stop == StopReason::plateau;
            }
        }
    }
    out.require(set_mismatch == 0, "strict and weak minima sets equal the naive oracle on 30/30 instances (" +
                                       std::to_string(total_minima) + " strict minima)");
    out.require(in_weak == endpoints, std::to_string(in_weak) + "/" + std::to_string(endpoints) +
                                          " endpoints admit no lower neighbour");
    out.require(in_strict + plateau == endpoints,
                std::to_string(in_strict) + " endpoints are strict minima, " + std::to_string(plateau) +
                    " stopped on a tied plateau");
    return out;
}

Outcome single_pattern() {
    Outcome out;
    const std::size_t n1 = 12;
    for (double p : {2.0, 2.5, 3.0, 4.0}) {
        const auto ex = exponents(p);
        auto xi = PatternMatrix::generate(n1, 1, 606);
        const auto chk = certify_local_min(xi.row(0), xi, ex);
        Rng rng(7);
        const auto gs = ground_state(xi, ex, GroundStateMode::exhaustive(), rng);
        const auto lm = enumerate_local_minima(xi, ex, LocalMinScope::all_states());
        std::vector<SpinState> expect{xi.row(0), xi.row(0).negated()};
        std::sort(expect.begin(), expect.end());
        out.require(chk.is_min && gs.energy == -1.0 && lm.states == expect,
                    fmt("p=%.1f certified, ground %.17g, minima {xi,-xi}", p, gs.energy));
    }
    return out;
}

Outcome pattern_energy() {
    Outcome out;
    Rng rng(808);
    const auto s2 = pattern_energy_stats(exponents(2.0), 100, 50, 10'000, rng);
    const double z = (s2.mean - (-1.49)) / s2.std_error;
    out.require(std::fabs(z) <= 3.0 && s2.reference == -1.49,
                fmt("p=2 mean %.5f, z-score vs -1.49 %.2f", s2.mean, z));
    const auto s3 = pattern_energy_stats(exponents(3.0), 100, 50, 10'000, rng);
    out.require(std::fabs(s3.mean) <= s3.crude_bound,
                fmt("p=3 |mean| %.4f vs crude bound %.4f", std::fabs(s3.mean), s3.crude_bound));
    return out;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Outcome retrieval() {
    Outcome out;
    SweepConfig c;
    c.p_values = {3.0};
    c.alpha_values = {0.1};
    c.n1_values = {200, 400};
    c.r = 0.1;
    c.trials = 50;
    c.master_seed = 909;
    const auto res = retrieval_sweep(c);
    std::vector<double> rel(2);
    for (std::size_t i = 0; i < 2; ++i) {
        const std::size_t n1 = c.n1_values[i];
        std::vector<double> d;
        for (const auto& r : res.records)
            if (r.n1 == n1) d.push_back(static_cast<double>(r.target_dist));
        const double med = median(d);
        rel[i] = med / static_cast<double>(n1);
        out.require(d.size() == 50 && med <= 0.02 * n1, fmt("n1=%.0f median distance %.1f", double(n1), med));
    }
    out.require(rel[1] <= rel[0], fmt("relative median %.4f -> %.4f", rel[0], rel[1]));
    return out;
}

Outcome non_retrieval() {
    Outcome out;
    SweepConfig c;
    c.p_values = {1.5};
    c.alpha_values = {1.0, 0.0};
    c.n1_values = {400};
    c.r = 0.1;
    c.trials = 50;
    c.master_seed = 1010;
    const auto res = non_retrieval_probe(c);
    std::size_t escaped = 0, trials = 0, control = 0, control_exact = 0;
    for (const auto& r : res.records) {
        if (r.alpha == 1.0) {
            ++trials;
            escaped += r.final_dist >= 40;
        } else {
            ++control;
            control_exact += r.n2 == 1 && r.final_dist == 0;
        }
    }
    out.require(trials == 50 && escaped >= 45, std::to_string(escaped) + "/50 end at distance >= 0.1 n1");
    out.require(control == 50 && control_exact == control,
                std::to_string(control_exact) + "/50 control descents with n2=1 stay at distance 0");
    return out;
}

Outcome prior_analytics() {
    Outcome out;
    double worst = 0.0;
    for (double x = -10.0; x <= 10.0; x += 0.01)
        worst = std::max(worst, std::fabs(log_mgf_quadrature(2.0, 0.5, x) - x * x / 2.0));
    out.require(worst <= 1e-8, fmt("quadrature vs x^2/2 max err %.2e", worst));
    const double n = psi_norm(PriorSpec::gaussian(), 2.0);
    out.require(std::fabs(n - std::sqrt(8.0 / 3.0)) <= 1e-6, fmt("psi_2 norm %.9f", n));
    const auto g = growth_ratio(PriorSpec::gaussian(), 2.0);
    double dev = 0.0;
    for (double r : g.ratio) dev = std::max(dev, std::fabs(r - 0.5));
    out.require(g.converged && dev <= 1e-12, fmt("gaussian ratio max |r-0.5| %.1e", dev));
    const auto s = growth_ratio(PriorSpec::stretched_exp(1.5), 3.0);
    out.require(s.converged && s.limit_estimate > 0.0,
                fmt("stretched_exp(1.5) p=3 limit %.6f (%.0f grid points)", s.limit_estimate, double(s.x.size())));
    return out;
}

Outcome concentration() {
    Outcome out;
    Rng rng(1111);
    std::vector<double> grid;
    for (double t = 50.0; t <= 600.0; t += 50.0) grid.push_back(t);
    const auto tc = empirical_tail(SumSpec::rademacher(10'000), grid, 100'000, rng);
    out.require(tc.violations == 0, std::to_string(tc.violations) + " tail violations over " +
                                        std::to_string(grid.size()) + " grid points");

    bool moments_ok = true;
    std::string worst;
    for (double r : {0.1, 0.25, 0.4}) {
        const std::size_t n1 = 101;
        const auto e = split_second_moment(r, n1, 20'000, rng);
        const double expect = static_cast<double>(flip_count(r, n1)) / n1;
        const double z = (e.mean - expect) / e.std_error;
        moments_ok = moments_ok && std::fabs(z) <= 3.0;
        worst += fmt(" r=%.2f z=%.2f", r, z);
    }
    out.require(moments_ok, "E[X_J^2] =" + worst);

    for (double p : {2.0, 3.0, 4.0}) {
        const std::size_t n1 = 64;
        const auto m = overlap_moment(p, n1, 100'000, rng);
        const double bound = overlap_moment_bound(p, n1);
        out.require(m.mean - 3.0 * m.std_error <= bound,
                    fmt("p=%.0f moment/n1^(p/2) %.4f", p, m.mean / std::pow(double(n1), p / 2)) +
                        fmt(" vs bound %.4f", bound / std::pow(double(n1), p / 2)));
    }
    return out;
}

Outcome calculus_grids() {
    Outcome out;
    for (const auto& r : appendix_checks(1e-3))
        out.require(r.status == CheckStatus::pass, r.name + fmt(" margin %.3e", r.worst_margin));
    return out;
}

Outcome determinism() {
    Outcome out;
    SweepConfig c;
    c.p_values = {3.0, 2.0, 1.5};
    c.alpha_values = {0.0, 0.1};
    c.n1_values = {64, 100};
    c.trials = 10;
    c.master_seed = 1212;
    std::string first;
    bool same = true;
    for (std::size_t threads : {1, 4, 8}) {
        c.threads = threads;
        std::ostringstream os;
        write_trial_csv(os, retrieval_sweep(c).records);
        if (first.empty()) first = os.str();
        else same = same && os.str() == first;
    }
    out.require(same, std::to_string(first.size()) + " CSV bytes identical for 1, 4, 8 threads");
    return out;
}

} // namespace

int main() {
    const std::vector<std::function<Outcome()>> criteria{
        incremental_energy, p2_flip_identity_check, gap_identity_check, oracle_equivalence,
        single_pattern,     pattern_energy,         retrieval,          non_retrieval,
        prior_analytics,    concentration,          calculus_grids,     determinism};
    // Wall-clock limits in seconds; 0 means none.
    const std::vector<double> limits{5, 0, 0, 60, 0, 0, 300, 0, 0, 0, 30, 0};
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i]();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (limits[i] > 0 && secs > limits[i]) o.require(false, fmt("runtime over %.0fs", limits[i]));
        std::printf("criterion %zu: %s (%.2fs) %s\n", i + 1, o.pass ? "PASS" : "FAIL", secs, o.detail.c_str());
        std::fflush(stdout);
        failed += !o.pass;
    }
    return failed == 0 ? 0 : 1;
}
