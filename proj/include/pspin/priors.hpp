#pragma once

#include "pspin/rng.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace pspin {

/// Symmetric hidden-unit prior.
///   gaussian             N(0, 1)
///   rademacher           uniform on {-1, +1}
///   stretched_exp(q)     density proportional to exp(-|z|^q), q > 1
///   gauss_bernoulli_mix  w N(0, 1) + (1 - w) rademacher, w in [0, 1]
struct PriorSpec {
    enum class Family { gaussian, rademacher, stretched_exp, gauss_bernoulli_mix };
    Family family = Family::gaussian;
    double q = 2.0;
    double weight = 1.0;

    static PriorSpec gaussian() { return {Family::gaussian, 2.0, 1.0}; }
    static PriorSpec rademacher() { return {Family::rademacher, 2.0, 0.0}; }
    static PriorSpec stretched_exp(double q);
    static PriorSpec gauss_bernoulli_mix(double weight);

    void validate() const;
    /// Exponent of the tail decay; +inf for bounded priors.
    double tail_exponent() const;
    std::string label() const;
};

/// Parses "gaussian", "rademacher", "stretched_exp:<q>" or "mix:<w>".
PriorSpec parse_prior(const std::string& text);

std::vector<double> sample(const PriorSpec& prior, std::size_t n, Rng& rng);

/// u(x) = log E exp(x z). Closed forms for gaussian, rademacher and the
/// mixture; quadrature for stretched_exp.
double u_eval(const PriorSpec& prior, double x);

/// log E exp(x z) for the density proportional to exp(-beta |z|^q), by
/// double-exponential quadrature of the peak-shifted integrand. Throws
/// NumericError when the error estimate exceeds 1e-10 relative.
double log_mgf_quadrature(double q, double beta, double x);

struct CumulantReport {
    double p = 0.0;
    std::vector<double> x;
    std::vector<double> u;
    std::vector<double> ratio;
    double limit_estimate = 0.0;
    /// Relative change of the ratio over the last grid decade below 1%.
    bool converged = false;
};

/// Tabulates u(x) / |x|^p on 10^-1 .. 10^3 with 10 points per decade,
/// stopping early at the first x where quadrature fails.
CumulantReport growth_ratio(const PriorSpec& prior, double p);

/// CSV with header `x,u,ratio`.
void write_cumulant_csv(std::ostream& out, const CumulantReport& report);

/// E exp((|Z| / lambda)^r); +inf where the expectation diverges.
double psi_functional(const PriorSpec& prior, double r, double lambda);

/// Orlicz norm inf{lambda > 0 : E exp((|Z| / lambda)^r) <= 2} by bisection,
/// relative tolerance 1e-12. DomainError when r < 1 or r exceeds the
/// tail exponent.
double psi_norm(const PriorSpec& prior, double r);

} // namespace pspin
