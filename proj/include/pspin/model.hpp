#pragma once

#include <cstddef>
#include <optional>

namespace pspin {

/// Hölder-conjugate exponents governing the energy scalings.
///
/// `p` is the energy exponent, `q` the tail exponent of the hidden prior,
/// `p_plus = max(2, p)`, `q_minus = min(2, q)` and
/// `kappa = 1 + p - p / p_plus` is the normalisation exponent of the energy.
struct ExponentSet {
    double p = 2.0;
    double q = 2.0;
    double p_plus = 2.0;
    double q_minus = 2.0;
    double kappa = 2.0;
};

enum class Given { p, q };

/// Builds the exponent family from either p or q (both must be > 1).
ExponentSet exponents(double value, Given given = Given::p);

/// Network size and load `alpha = n2 / n1^(p_plus / 2)`.
struct LoadParams {
    std::size_t n1 = 0;
    std::size_t n2 = 0;
    double alpha = 0.0;
};

LoadParams load_params(std::size_t n1, std::size_t n2, const ExponentSet& ex);

/// Number of hidden units giving load alpha at n1 visible units, rounded to
/// the nearest integer. May be 0 for small alpha.
std::size_t hidden_units_for_load(double alpha, std::size_t n1, const ExponentSet& ex);

/// Coin-tossing entropy -r log r - (1-r) log(1-r), with 0 log 0 = 0.
double entropy(double r);

/// |x + y|^p - |x - y|^p.
double phi(double x, double y, double p);

/// 1 - (1 - 2r)^p, the single-pattern energy gap at flip fraction r.
double phi_bar(double r, double p);

/// Barrier threshold 1 - (1 - 2r)^p - r^(p/2) for r in (0, 1/2], p >= 2.
double threshold_t(double r, double p);

/// Lower bound on the curvature correction of a single flip for p in (1, 2]:
/// 2^p (2p - 1 - 2^(p-1) ((p-1)/p)^(p-1) (3p - 2)/p).
double d_constant(double p);

/// Integral of exp(-x^(2/p) / 2) over [0, inf), by adaptive quadrature.
double e_constant(double p);

/// (1/8) min((1/4)(2/3)^p (d-e)^2, (2/3) 2^(-2/p) |d-e|^(2/p)) with d, e above.
double kappa1_constant(double p);

/// 2 sum_{n>=1} exp(n^(2p-2) - (n-1)^2 / 4), summed until the terms drop
/// below 1e-14. Finite only for p in (1, 2); p = 2 gives std::nullopt.
std::optional<double> h_constant(double p);

struct ConstantsTable {
    double d_p = 0.0;
    double e_p = 0.0;
    double kappa1_p = 0.0;
    std::optional<double> h;
};

ConstantsTable constants_table(double p);

} // namespace pspin
