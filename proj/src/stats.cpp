#include "pspin/stats.hpp"

#include "pspin/dynamics.hpp"
#include "pspin/energy.hpp"
#include "pspin/errors.hpp"
#include "pspin/parallel.hpp"
#include "pspin/patterns.hpp"
#include "pspin/priors.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>

namespace pspin {

double psi_tail_bound(double ell, double norm, std::size_t n, double t) {
    if (!(ell > 0.0 && ell <= 2.0)) throw DomainError("psi_tail_bound: l must lie in (0, 2]");
    if (!(norm > 0.0)) throw DomainError("psi_tail_bound: norm must be positive");
    if (n == 0) throw DomainError("psi_tail_bound: N must be positive");
    if (!(t > 0.0)) throw DomainError("psi_tail_bound: t must be positive");
    const double big_n = static_cast<double>(n);
    const double gauss = t * t / (norm * norm * big_n);
    const double heavy = std::pow(t / norm, ell) / std::pow(big_n, std::max(ell - 1.0, 0.0));
    return 2.0 * std::exp(-0.125 * std::min(gauss, heavy));
}

std::string SumSpec::label() const {
    char buf[96];
    switch (kind) {
    case Kind::rademacher: std::snprintf(buf, sizeof buf, "rademacher(N=%zu)", terms); break;
    case Kind::centered_power: std::snprintf(buf, sizeof buf, "centered_power(p=%g,n1=%zu,n2=%zu)", p, n1, n2); break;
    case Kind::centered_power_2p2:
        std::snprintf(buf, sizeof buf, "centered_power_2p2(p=%g,n1=%zu,n2=%zu)", p, n1, n2);
        break;
    case Kind::zero: std::snprintf(buf, sizeof buf, "zero(N=%zu)", terms); break;
    }
    return buf;
}

namespace {

// Sum of n independent uniform signs.
std::int64_t rademacher_sum(std::size_t n, Rng& rng) {
    std::int64_t ones = 0;
    std::size_t left = n;
    while (left >= 64) {
        ones += std::popcount(rng.next());
        left -= 64;
    }
    if (left > 0) ones += std::popcount(rng.next() & ((std::uint64_t{1} << left) - 1));
    return static_cast<std::int64_t>(n) - 2 * ones;
}

double load_of(const SumSpec& s) {
    const ExponentSet ex = exponents(s.p);
    return load_params(s.n1, s.n2, ex).alpha;
}

constexpr std::size_t kBlock = 1000;

// Trial-parallel mean and standard error of f(rng); the trial in block b
// uses the stream (seed, b), so results do not depend on the thread count.
template <typename F>
Estimate monte_carlo(std::size_t trials, std::uint64_t seed, std::size_t threads, F f) {
    const std::size_t blocks = (trials + kBlock - 1) / kBlock;
    std::vector<double> sums(blocks), squares(blocks);
    parallel_for(blocks, threads, [&](std::size_t b) {
        Rng rng = Rng::stream(seed, b);
        const std::size_t end = std::min(trials, (b + 1) * kBlock);
        double s = 0.0, s2 = 0.0;
        for (std::size_t t = b * kBlock; t < end; ++t) {
            const double v = f(rng);
            s += v;
            s2 += v * v;
        }
        sums[b] = s;
        squares[b] = s2;
    });
    double s = 0.0, s2 = 0.0;
    for (std::size_t b = 0; b < blocks; ++b) {
        s += sums[b];
        s2 += squares[b];
    }
    const double n = static_cast<double>(trials);
    Estimate e;
    e.mean = s / n;
    const double var = trials > 1 ? std::max(0.0, (s2 - n * e.mean * e.mean) / (n - 1.0)) : 0.0;
    e.std_error = std::sqrt(var / n);
    return e;
}

} // namespace

double overlap_abs_moment_exact(std::size_t n1, double q) {
    if (n1 == 0) throw DomainError("overlap_abs_moment_exact: n1 must be positive");
    const double n = static_cast<double>(n1);
    double total = 0.0;
    for (std::size_t k = 0; k <= n1; ++k) {
        const double m = std::fabs(n - 2.0 * static_cast<double>(k));
        if (m == 0.0) continue;
        const double log_pmf = std::lgamma(n + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
                               std::lgamma(n - static_cast<double>(k) + 1.0) - n * std::log(2.0);
        total += std::exp(log_pmf + q * std::log(m / n));
    }
    return total;
}

double tail_bound(const SumSpec& spec, double t) {
    switch (spec.kind) {
    case SumSpec::Kind::rademacher: return psi_tail_bound(2.0, psi_norm(PriorSpec::rademacher(), 2.0), spec.terms, t);
    case SumSpec::Kind::centered_power: {
        const double p = spec.p;
        if (!(p > 1.0 && p <= 2.0)) throw DomainError("centered_power bound needs p in (1, 2]");
        const double n1 = static_cast<double>(spec.n1);
        const double alpha = load_of(spec);
        const double a = std::pow(2.0, p) * t * t * std::pow(n1, p - 1.0) / (std::pow(3.0, p) * alpha);
        const double b = 2.0 * std::pow(t, 2.0 / p) * std::pow(n1, 2.0 - 2.0 / p) / (3.0 * std::pow(alpha, 2.0 / p - 1.0));
        return 2.0 * std::exp(-0.125 * std::min(a, b));
    }
    case SumSpec::Kind::centered_power_2p2: {
        const double p = spec.p;
        const auto h = h_constant(p);
        if (!h || !std::isfinite(*h)) throw DomainError("centered_power_2p2 needs p in (1, 2) with finite h");
        const double n1 = static_cast<double>(spec.n1);
        const double alpha = load_of(spec);
        if (t >= 2.0 * alpha * *h * std::pow(n1, 2.0 - p)) return 1.0;
        return 2.0 * std::exp(-t * t / (4.0 * alpha * *h * std::pow(n1, 3.0 - 2.0 * p)));
    }
    case SumSpec::Kind::zero: return 0.0;
    }
    return 1.0;
}

TailCheck empirical_tail(const SumSpec& spec, std::span<const double> t_grid, std::size_t trials, Rng& rng,
                         std::size_t threads) {
    if (trials < 1000) throw DomainError("empirical_tail: needs at least 1000 trials");
    if (spec.kind != SumSpec::Kind::rademacher && spec.kind != SumSpec::Kind::zero) {
        if (spec.n1 == 0 || spec.n2 < 2) throw DomainError("empirical_tail: power sums need n1 >= 1 and n2 >= 2");
        if (spec.kind == SumSpec::Kind::centered_power && !(spec.p > 1.0 && spec.p <= 2.0))
            throw DomainError("empirical_tail: centered_power needs p in (1, 2]");
        if (spec.kind == SumSpec::Kind::centered_power_2p2 && !(spec.p > 1.0 && spec.p < 2.0))
            throw DomainError("empirical_tail: centered_power_2p2 needs p in (1, 2)");
    }
    for (double t : t_grid)
        if (!(t > 0.0)) throw DomainError("empirical_tail: grid points must be positive");

    const std::uint64_t seed = rng.next();
    const double exponent = spec.kind == SumSpec::Kind::centered_power ? spec.p : 2.0 * spec.p - 2.0;
    const double centre = (spec.kind == SumSpec::Kind::centered_power || spec.kind == SumSpec::Kind::centered_power_2p2)
                              ? overlap_abs_moment_exact(spec.n1, exponent)
                              : 0.0;
    auto draw = [&](Rng& r) -> double {
        switch (spec.kind) {
        case SumSpec::Kind::rademacher: return static_cast<double>(rademacher_sum(spec.terms, r));
        case SumSpec::Kind::zero: return 0.0;
        default: {
            const double n1 = static_cast<double>(spec.n1);
            double s = 0.0;
            for (std::size_t mu = 0; mu < spec.terms; ++mu) {
                const double m = std::fabs(static_cast<double>(rademacher_sum(spec.n1, r))) / n1;
                s += (m == 0.0 ? 0.0 : std::pow(m, exponent)) - centre;
            }
            return s;
        }
        }
    };

    const std::size_t blocks = (trials + kBlock - 1) / kBlock;
    const std::size_t points = t_grid.size();
    std::vector<std::size_t> counts(blocks * points, 0);
    parallel_for(blocks, threads, [&](std::size_t b) {
        Rng r = Rng::stream(seed, b);
        const std::size_t end = std::min(trials, (b + 1) * kBlock);
        for (std::size_t t = b * kBlock; t < end; ++t) {
            const double s = std::fabs(draw(r));
            for (std::size_t i = 0; i < points; ++i)
                if (s >= t_grid[i]) ++counts[b * points + i];
        }
    });

    TailCheck check;
    check.spec = spec;
    check.trials = trials;
    check.t_grid.assign(t_grid.begin(), t_grid.end());
    const double n = static_cast<double>(trials);
    for (std::size_t i = 0; i < points; ++i) {
        std::size_t hits = 0;
        for (std::size_t b = 0; b < blocks; ++b) hits += counts[b * points + i];
        const double freq = static_cast<double>(hits) / n;
        const double se = std::sqrt(freq * (1.0 - freq) / n);
        const double bound = tail_bound(spec, t_grid[i]);
        check.empirical.push_back(freq);
        check.std_error.push_back(se);
        check.bound.push_back(bound);
        if (freq > bound + 3.0 * se) ++check.violations;
    }
    return check;
}

PatternEnergyStats pattern_energy_stats(const ExponentSet& ex, std::size_t n1, std::size_t n2, std::size_t trials,
                                        Rng& rng, std::size_t threads) {
    if (trials < 100) throw DomainError("pattern_energy_stats: needs at least 100 trials");
    if (n1 == 0 || n2 == 0) throw DomainError("pattern_energy_stats: dimensions must be positive");
    const std::uint64_t seed = rng.next();
    PatternEnergyStats stats;
    // Trial t draws its patterns from the key (seed, t).
    const std::size_t blocks = (trials + kBlock - 1) / kBlock;
    std::vector<double> energies(trials);
    parallel_for(blocks, threads, [&](std::size_t b) {
        const std::size_t end = std::min(trials, (b + 1) * kBlock);
        for (std::size_t t = b * kBlock; t < end; ++t) {
            const PatternMatrix xi = PatternMatrix::generate(n1, n2, stream_key(seed, t));
            energies[t] = energy_full(xi.row(0), xi, ex);
        }
    });
    double s = 0.0;
    for (double e : energies) s += e;
    const double n = static_cast<double>(trials);
    stats.mean = s / n;
    double ss = 0.0;
    for (double e : energies) ss += (e - stats.mean) * (e - stats.mean);
    stats.std_error = std::sqrt(ss / (n - 1.0) / n);

    const double big = static_cast<double>(n1);
    const double p = ex.p;
    if (p == 2.0) {
        stats.reference = -1.0 - static_cast<double>(n2 - 1) / big;
    } else {
        const double alpha = load_params(n1, n2, ex).alpha;
        stats.reference = -(p / 2.0) * std::tgamma(p / 2.0) * alpha - std::pow(big, -(1.0 - p / ex.p_plus));
    }
    stats.crude_bound = (std::pow(big, p) + std::pow(big, p / 2.0) * static_cast<double>(n2)) / std::pow(big, ex.kappa);
    return stats;
}

Estimate overlap_moment(double p, std::size_t n1, std::size_t trials, Rng& rng, std::size_t threads) {
    if (n1 == 0 || trials == 0) throw DomainError("overlap_moment: n1 and trials must be positive");
    return monte_carlo(trials, rng.next(), threads, [&](Rng& r) {
        const double m = std::fabs(static_cast<double>(rademacher_sum(n1, r)));
        return m == 0.0 ? 0.0 : std::pow(m, p);
    });
}

double overlap_moment_bound(double p, std::size_t n1) {
    return p / 2.0 * std::tgamma(p / 2.0) * std::pow(static_cast<double>(n1), p / 2.0);
}

namespace {

struct SplitDraw {
    double x;
    double y;
};

SplitDraw draw_split(double r, std::size_t n1, Rng& rng) {
    const std::size_t j = flip_count(r, n1);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n1));
    return {static_cast<double>(rademacher_sum(j, rng)) * scale,
            static_cast<double>(rademacher_sum(n1 - j, rng)) * scale};
}

void check_split_args(double r, std::size_t n1, std::size_t trials) {
    if (!(r > 0.0 && r < 0.5)) throw DomainError("split overlaps need r in (0, 1/2)");
    if (n1 == 0 || trials == 0) throw DomainError("split overlaps need positive n1 and trials");
}

} // namespace

Estimate split_second_moment(double r, std::size_t n1, std::size_t trials, Rng& rng, std::size_t threads) {
    check_split_args(r, n1, trials);
    return monte_carlo(trials, rng.next(), threads, [&](Rng& g) {
        const SplitDraw d = draw_split(r, n1, g);
        return d.x * d.x;
    });
}

Estimate split_psi2_functional(double r, std::size_t n1, double lambda, std::size_t trials, Rng& rng,
                               std::size_t threads) {
    check_split_args(r, n1, trials);
    if (!(lambda > 0.0)) throw DomainError("split_psi2_functional: lambda must be positive");
    return monte_carlo(trials, rng.next(), threads, [&](Rng& g) {
        const SplitDraw d = draw_split(r, n1, g);
        return std::exp(d.x * d.x / (lambda * lambda));
    });
}

Estimate flip_psi_functional(double p, double r, std::size_t n1, double scale, std::size_t trials, Rng& rng,
                             std::size_t threads) {
    check_split_args(r, n1, trials);
    if (!(scale > 0.0)) throw DomainError("flip_psi_functional: scale must be positive");
    return monte_carlo(trials, rng.next(), threads, [&](Rng& g) {
        const SplitDraw d = draw_split(r, n1, g);
        return std::exp(std::pow(std::fabs(phi(d.x, d.y, p)) / scale, 2.0 / p));
    });
}

const char* to_string(CheckStatus status) {
    switch (status) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::advisory: return "advisory";
    }
    return "?";
}

namespace {

std::string point(std::initializer_list<std::pair<const char*, double>> coords) {
    std::string out;
    char buf[64];
    for (const auto& [name, value] : coords) {
        if (!out.empty()) out += ", ";
        std::snprintf(buf, sizeof buf, "%s=%.6g", name, value);
        out += buf;
    }
    return out;
}

double g_fn(double x, double p) { return 1.0 - std::pow(1.0 - 2.0 * x, p) - std::pow(x, p / 2.0); }

double f_fn(double x, double p) { return 1.0 - std::pow(x, p) - p * std::pow(x, p - 1.0) + p * x; }

// Solves S(r) / (1 - 2r) = c1 on (0, 1/2); the left side increases from 0 to inf.
double crossing_radius(double c1) {
    double lo = 0.0, hi = 0.5;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (entropy(mid) / (1.0 - 2.0 * mid) < c1 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

std::vector<CheckResult> appendix_checks(double grid_step) {
    if (!(grid_step > 0.0 && grid_step <= 1e-2)) throw DomainError("appendix_checks: grid_step must lie in (0, 1e-2]");
    std::vector<CheckResult> out;
    const auto steps = [&](double a, double b) {
        return static_cast<std::size_t>(std::floor((b - a) / grid_step + 1e-9));
    };

    {
        CheckResult c{"g_positive", CheckStatus::pass, std::numeric_limits<double>::infinity(), ""};
        const std::size_t nx = steps(0.0, 0.5);
        const std::size_t np = steps(2.0, 6.0);
        for (std::size_t j = 0; j <= np; ++j) {
            const double p = 2.0 + static_cast<double>(j) * grid_step;
            for (std::size_t i = 1; i <= nx; ++i) {
                const double x = static_cast<double>(i) * grid_step;
                if (x >= 0.5) break;
                const double g = g_fn(x, p);
                if (g < c.worst_margin) {
                    c.worst_margin = g;
                    c.location = point({{"x", x}, {"p", p}});
                }
            }
        }
        if (!(c.worst_margin > 0.0)) c.status = CheckStatus::fail;
        out.push_back(c);
    }

    {
        constexpr double a = 0.9;
        constexpr double tol = 1e-12;
        CheckResult c{"f_monotone", CheckStatus::pass, std::numeric_limits<double>::infinity(), ""};
        const std::size_t nx = steps(0.0, a);
        const std::size_t np = steps(1.0, 2.0);
        for (std::size_t j = 1; j <= np; ++j) {
            const double p = 1.0 + static_cast<double>(j) * grid_step;
            const double fa = f_fn(a, p);
            if (fa < c.worst_margin) {
                c.worst_margin = fa;
                c.location = point({{"x", a}, {"p", p}});
            }
            for (std::size_t i = 0; i <= nx; ++i) {
                const double x = std::min(a, static_cast<double>(i) * grid_step);
                const double margin = f_fn(x, p) - fa + tol;
                if (margin < c.worst_margin) {
                    c.worst_margin = margin;
                    c.location = point({{"x", x}, {"p", p}});
                }
            }
        }
        if (!(c.worst_margin > 0.0)) c.status = CheckStatus::fail;
        out.push_back(c);
    }

    {
        CheckResult c{"verify_inequality", CheckStatus::pass, std::numeric_limits<double>::infinity(), ""};
        const double c1_grid[] = {0.01, 0.03, 0.1, 0.3, 1.0, 3.0, 10.0};
        const double alpha_factors[] = {1.0, 1.01, 1.1, 1.5, 2.0, 5.0, 10.0, 100.0, 1e4};
        const std::size_t nr = steps(0.0, 0.5);
        for (double c1 : c1_grid) {
            const double rbar = crossing_radius(c1);
            const double c2 = std::max(1.0 / c1, (1.0 - 2.0 * rbar) * (1.0 - 2.0 * rbar) / (2.0 * c1 * rbar));
            for (std::size_t i = 0; i < nr; ++i) {
                const double r = static_cast<double>(i) * grid_step;
                const double s = entropy(r);
                const double w = 1.0 - 2.0 * r;
                const double alpha_min = c2 * s / (w * w);
                for (double factor : alpha_factors) {
                    const double alpha = alpha_min * factor;
                    const double cap = alpha > 0.0 ? std::min(1.0, (1.0 + alpha) * w / alpha) : 1.0;
                    const double margin = c1 * (1.0 + alpha) * w * cap - s;
                    if (margin < c.worst_margin) {
                        c.worst_margin = margin;
                        c.location = point({{"c1", c1}, {"r", r}, {"alpha", alpha}});
                    }
                }
            }
        }
        if (c.worst_margin < 0.0) c.status = CheckStatus::fail;
        out.push_back(c);
    }
    return out;
}

std::string report_json(std::span<const CheckResult> results) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : results) {
        arr.push_back({{"name", r.name},
                       {"status", to_string(r.status)},
                       {"worst_margin", std::isfinite(r.worst_margin) ? nlohmann::json(r.worst_margin) : nlohmann::json()},
                       {"location", r.location}});
    }
    return arr.dump(2);
}

} // namespace pspin
