#include "pspin/model.hpp"

#include "pspin/errors.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace pspin {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw DomainError(what);
}

} // namespace

ExponentSet exponents(double value, Given given) {
    require(std::isfinite(value) && value > 1.0, "exponent must be finite and > 1");
    const double conjugate = value / (value - 1.0);
    ExponentSet ex;
    ex.p = given == Given::p ? value : conjugate;
    ex.q = given == Given::p ? conjugate : value;
    ex.p_plus = std::max(2.0, ex.p);
    ex.q_minus = std::min(2.0, ex.q);
    // Written piecewise so that kappa is exact on both branches.
    ex.kappa = ex.p >= 2.0 ? ex.p : 1.0 + ex.p / 2.0;
    return ex;
}

LoadParams load_params(std::size_t n1, std::size_t n2, const ExponentSet& ex) {
    require(n1 >= 1 && n2 >= 1, "n1 and n2 must be positive");
    return {n1, n2, static_cast<double>(n2) / std::pow(static_cast<double>(n1), ex.p_plus / 2.0)};
}

std::size_t hidden_units_for_load(double alpha, std::size_t n1, const ExponentSet& ex) {
    require(std::isfinite(alpha) && alpha >= 0.0, "alpha must be finite and >= 0");
    require(n1 >= 1, "n1 must be positive");
    return static_cast<std::size_t>(std::llround(alpha * std::pow(static_cast<double>(n1), ex.p_plus / 2.0)));
}

double entropy(double r) {
    require(r >= 0.0 && r <= 1.0, "entropy: r must lie in [0, 1]");
    auto xlogx = [](double x) { return x > 0.0 ? x * std::log(x) : 0.0; };
    return -xlogx(r) - xlogx(1.0 - r);
}

double phi(double x, double y, double p) {
    require(std::isfinite(x) && std::isfinite(y) && std::isfinite(p), "phi: non-finite input");
    return std::pow(std::abs(x + y), p) - std::pow(std::abs(x - y), p);
}

double phi_bar(double r, double p) {
    require(r >= 0.0 && r <= 0.5, "phi_bar: r must lie in [0, 1/2]");
    require(std::isfinite(p) && p > 0.0, "phi_bar: p must be positive");
    return 1.0 - std::pow(1.0 - 2.0 * r, p);
}

double threshold_t(double r, double p) {
    require(r > 0.0 && r <= 0.5, "threshold_t: r must lie in (0, 1/2]");
    require(std::isfinite(p) && p >= 2.0, "threshold_t: p must be >= 2");
    return 1.0 - std::pow(1.0 - 2.0 * r, p) - std::pow(r, p / 2.0);
}

double d_constant(double p) {
    require(p > 1.0 && p <= 2.0, "d_constant: p must lie in (1, 2]");
    const double inner = 2.0 * p - 1.0
        - std::pow(2.0, p - 1.0) * std::pow((p - 1.0) / p, p - 1.0) * (3.0 * p - 2.0) / p;
    return std::pow(2.0, p) * inner;
}

double e_constant(double p) {
    require(std::isfinite(p) && p > 0.0, "e_constant: p must be positive");
    const double a = 2.0 / p;
    auto integrand = [a](double x) { return std::exp(-0.5 * std::pow(x, a)); };
    boost::math::quadrature::exp_sinh<double> integrator;
    double error = 0.0;
    const double value = integrator.integrate(integrand, 0.0, std::numeric_limits<double>::infinity(),
                                              1e-13, &error);
    if (!(error <= 1e-10)) {
        throw NumericError("e_constant: quadrature error estimate " + std::to_string(error));
    }
    return value;
}

double kappa1_constant(double p) {
    const double gap = std::abs(d_constant(p) - e_constant(p));
    const double first = 0.25 * std::pow(2.0 / 3.0, p) * gap * gap;
    const double second = (2.0 / 3.0) * std::pow(2.0, -2.0 / p) * std::pow(gap, 2.0 / p);
    return std::min(first, second) / 8.0;
}

std::optional<double> h_constant(double p) {
    require(p > 1.0 && p <= 2.0, "h_constant: p must lie in (1, 2]");
    if (p >= 2.0) return std::nullopt;
    // Log-space accumulation; the peak term overflows a double once p is
    // close to 2, in which case +inf is returned.
    const double cutoff = std::log(1e-14);
    double log_sum = -std::numeric_limits<double>::infinity();
    double previous = -std::numeric_limits<double>::infinity();
    for (std::uint64_t n = 1; n < 100'000'000ULL; ++n) {
        const double nd = static_cast<double>(n);
        const double log_term = std::pow(nd, 2.0 * p - 2.0) - (nd - 1.0) * (nd - 1.0) / 4.0;
        const double hi = std::max(log_sum, log_term);
        log_sum = hi + std::log(std::exp(log_sum - hi) + std::exp(log_term - hi));
        if (log_term < previous && log_term < cutoff) break;
        previous = log_term;
    }
    return std::exp(std::log(2.0) + log_sum);
}

ConstantsTable constants_table(double p) {
    return {d_constant(p), e_constant(p), kappa1_constant(p), h_constant(p)};
}

} // namespace pspin
