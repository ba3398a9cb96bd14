#pragma once

#include "pspin/model.hpp"
#include "pspin/rng.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace pspin {

/// 2 exp(-(1/8) min(t^2 / (norm^2 N), t^l / (norm^l N^max(l-1, 0)))).
double psi_tail_bound(double ell, double norm, std::size_t n, double t);

/// A sum of i.i.d. terms whose tail is compared against a concentration bound.
///   rademacher      Σ_{i<N} ε_i, bound psi_tail_bound(2, ‖ε‖_ψ2, N, t)
///   centered_power  Σ_{μ>=2} (|M_μ|^p - E|M_μ|^p) with M_μ = (ξ^1, ξ^μ) / n1,
///                   bounded by the Bernstein-type estimate with l = 2/p,
///                   p in (1, 2]
///   centered_power_2p2
///                   the same with exponent 2p - 2, p in (1, 2), sub-Gaussian
///                   bound with the series constant h; vacuous (bound 1)
///                   for t >= 2 alpha h n1^(2-p)
///   zero            N identically zero terms, bound 0
struct SumSpec {
    enum class Kind { rademacher, centered_power, centered_power_2p2, zero };
    Kind kind = Kind::rademacher;
    std::size_t terms = 0;
    double p = 2.0;
    std::size_t n1 = 0;
    std::size_t n2 = 0;

    static SumSpec rademacher(std::size_t n) { return {Kind::rademacher, n, 2.0, 0, 0}; }
    static SumSpec centered_power(double p, std::size_t n1, std::size_t n2) {
        return {Kind::centered_power, n2 - 1, p, n1, n2};
    }
    static SumSpec centered_power_2p2(double p, std::size_t n1, std::size_t n2) {
        return {Kind::centered_power_2p2, n2 - 1, p, n1, n2};
    }
    static SumSpec zero(std::size_t n) { return {Kind::zero, n, 2.0, 0, 0}; }

    std::string label() const;
};

/// Theoretical tail bound of P(|S| >= t) for the given sum.
double tail_bound(const SumSpec& spec, double t);

/// E|(ξ^1, ξ^μ) / n1|^q, exact from the binomial law.
double overlap_abs_moment_exact(std::size_t n1, double q);

struct TailCheck {
    SumSpec spec;
    std::vector<double> t_grid;
    std::vector<double> bound;
    std::vector<double> empirical;
    std::vector<double> std_error;
    std::size_t trials = 0;
    /// Grid points with empirical > bound + 3 standard errors.
    std::size_t violations = 0;
};

/// Monte Carlo tail frequencies P(|S| >= t). Needs trials >= 1000.
TailCheck empirical_tail(const SumSpec& spec, std::span<const double> t_grid, std::size_t trials, Rng& rng,
                         std::size_t threads = 1);

struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
};

struct PatternEnergyStats {
    double mean = 0.0;
    double std_error = 0.0;
    /// -1 - (n2 - 1)/n1 for p = 2, otherwise -(p/2) Γ(p/2) alpha - n1^-(1 - p/p_plus).
    double reference = 0.0;
    /// (n1^p + n1^(p/2) n2) / n1^kappa.
    double crude_bound = 0.0;
};

/// H(ξ^1; ξ) over fresh pattern draws. Needs trials >= 100.
PatternEnergyStats pattern_energy_stats(const ExponentSet& ex, std::size_t n1, std::size_t n2, std::size_t trials,
                                        Rng& rng, std::size_t threads = 1);

/// E|(ξ^1, ξ^μ)|^p by Monte Carlo.
Estimate overlap_moment(double p, std::size_t n1, std::size_t trials, Rng& rng, std::size_t threads = 1);

/// (p/2) Γ(p/2) n1^(p/2).
double overlap_moment_bound(double p, std::size_t n1);

/// Split overlaps X = (ξ_J, 1)/sqrt(n1), Y = (ξ_{J^c}, 1)/sqrt(n1) of a
/// random pattern with |J| = floor(r n1).
Estimate split_second_moment(double r, std::size_t n1, std::size_t trials, Rng& rng, std::size_t threads = 1);

/// E exp(X^2 / lambda^2) for X as above.
Estimate split_psi2_functional(double r, std::size_t n1, double lambda, std::size_t trials, Rng& rng,
                               std::size_t threads = 1);

/// E exp((|Φ_p(X, Y)| / scale)^(2/p)) with Φ_p(x, y) = |x + y|^p - |x - y|^p.
Estimate flip_psi_functional(double p, double r, std::size_t n1, double scale, std::size_t trials, Rng& rng,
                             std::size_t threads = 1);

enum class CheckStatus { pass, fail, advisory };

const char* to_string(CheckStatus status);

/// One verification outcome. A positive margin means the inequality holds.
struct CheckResult {
    std::string name;
    CheckStatus status = CheckStatus::pass;
    double worst_margin = 0.0;
    std::string location;
};

/// Grid checks of three calculus inequalities:
///   g_positive         1 - (1-2x)^p - x^(p/2) > 0 on (0, 1/2) x [2, 6]
///   f_monotone         f(x,p) = 1 - x^p - p x^(p-1) + p x >= f(0.9, p) > 0
///                      on [0, 0.9] x (1, 2]
///   verify_inequality  S(r) <= c1 (1+α)(1-2r) min(1, (1+α)(1-2r)/α) for
///                      α >= c2 S(r)/(1-2r)^2 over a (c1, r, α) grid
/// grid_step must lie in (0, 1e-2].
std::vector<CheckResult> appendix_checks(double grid_step);

/// Serializes results as a JSON array of {name, status, worst_margin, location}.
std::string report_json(std::span<const CheckResult> results);

} // namespace pspin
