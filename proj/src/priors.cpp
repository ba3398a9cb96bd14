#include "pspin/priors.hpp"

#include "pspin/errors.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace pspin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kQuadTol = 1e-12;
constexpr double kQuadAccept = 1e-10;

// log cosh x without overflow.
double log_cosh(double x) {
    const double a = std::fabs(x);
    return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

double log_add(double a, double b) {
    if (a == -kInf) return b;
    if (b == -kInf) return a;
    const double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// log of the normalising constant of exp(-beta |z|^q).
double log_norm(double q, double beta) {
    return std::log(2.0) + std::lgamma(1.0 + 1.0 / q) - std::log(beta) / q;
}

template <typename F>
double integrate_half_line(F f, const char* what) {
    thread_local boost::math::quadrature::exp_sinh<double> integrator;
    double error = 0.0;
    double l1 = 0.0;
    double value = 0.0;
    try {
        value = integrator.integrate(f, 0.0, kInf, kQuadTol, &error, &l1);
    } catch (const std::exception& e) {
        throw NumericError(std::string(what) + ": quadrature failed on [0, inf): " + e.what());
    }
    if (!std::isfinite(value) || error > kQuadAccept * std::max(l1, 1e-300))
        throw NumericError(std::string(what) + ": quadrature on [0, inf) did not converge (estimate " +
                           std::to_string(value) + ", error " + std::to_string(error) + ")");
    return value;
}

template <typename F>
double integrate_interval(F f, double a, double b, const char* what, double error_floor = 1e-300) {
    if (!(b > a)) return 0.0;
    thread_local boost::math::quadrature::tanh_sinh<double> integrator;
    double error = 0.0;
    double l1 = 0.0;
    double value = 0.0;
    try {
        value = integrator.integrate(f, a, b, kQuadTol, &error, &l1);
    } catch (const std::exception& e) {
        throw NumericError(std::string(what) + ": quadrature failed on a finite interval: " + e.what());
    }
    if (!std::isfinite(value) || error > kQuadAccept * std::max(l1, error_floor))
        throw NumericError(std::string(what) + ": quadrature on [" + std::to_string(a) + ", " + std::to_string(b) +
                           "] did not converge (error " + std::to_string(error) + ")");
    return value;
}

// (z + t)^q - z^q for z > 0, t >= -z, free of cancellation for small t.
double power_increment(double z, double t, double q) {
    return std::pow(z, q) * std::expm1(q * std::log1p(t / z));
}

// E exp((|Z| / lambda)^r) for the density proportional to exp(-beta |z|^q).
double continuous_psi(double q, double beta, double r, double lambda) {
    const double c = std::pow(lambda, -r);
    if (r > q) return kInf;
    if (r == q && c >= beta) return kInf;
    auto g = [&](double z) { return c * std::pow(z, r) - beta * std::pow(z, q); };
    double zm = 0.0;
    if (r < q) zm = std::pow(r * c / (q * beta), 1.0 / (q - r));
    const double gm = g(zm);
    const double left = integrate_interval([&](double z) { return std::exp(g(z) - gm); }, 0.0, zm, "psi_functional");
    const double right = integrate_half_line([&](double t) { return std::exp(g(zm + t) - gm); }, "psi_functional");
    const double log_value = gm + std::log(left + right) + std::log(2.0) - log_norm(q, beta);
    return log_value > 700.0 ? kInf : std::exp(log_value);
}

} // namespace

PriorSpec PriorSpec::stretched_exp(double q) {
    PriorSpec s{Family::stretched_exp, q, 0.0};
    s.validate();
    return s;
}

PriorSpec PriorSpec::gauss_bernoulli_mix(double weight) {
    PriorSpec s{Family::gauss_bernoulli_mix, 2.0, weight};
    s.validate();
    return s;
}

void PriorSpec::validate() const {
    if (family == Family::stretched_exp && !(q > 1.0 && std::isfinite(q)))
        throw DomainError("stretched_exp prior needs a finite q > 1");
    if (family == Family::gauss_bernoulli_mix && !(weight >= 0.0 && weight <= 1.0))
        throw DomainError("mixture weight must lie in [0, 1]");
}

double PriorSpec::tail_exponent() const {
    switch (family) {
    case Family::gaussian: return 2.0;
    case Family::rademacher: return kInf;
    case Family::stretched_exp: return q;
    case Family::gauss_bernoulli_mix: return weight > 0.0 ? 2.0 : kInf;
    }
    return kInf;
}

std::string PriorSpec::label() const {
    char buf[64];
    switch (family) {
    case Family::gaussian: return "gaussian";
    case Family::rademacher: return "rademacher";
    case Family::stretched_exp: std::snprintf(buf, sizeof buf, "stretched_exp:%g", q); return buf;
    case Family::gauss_bernoulli_mix: std::snprintf(buf, sizeof buf, "mix:%g", weight); return buf;
    }
    return "?";
}

PriorSpec parse_prior(const std::string& text) {
    if (text == "gaussian") return PriorSpec::gaussian();
    if (text == "rademacher") return PriorSpec::rademacher();
    const auto colon = text.find(':');
    if (colon != std::string::npos) {
        const std::string head = text.substr(0, colon);
        double value = 0.0;
        try {
            std::size_t used = 0;
            value = std::stod(text.substr(colon + 1), &used);
            if (used != text.size() - colon - 1) throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            throw DomainError("bad prior parameter in '" + text + "'");
        }
        if (head == "stretched_exp") return PriorSpec::stretched_exp(value);
        if (head == "mix") return PriorSpec::gauss_bernoulli_mix(value);
    }
    throw DomainError("unknown prior '" + text + "'");
}

std::vector<double> sample(const PriorSpec& prior, std::size_t n, Rng& rng) {
    prior.validate();
    std::vector<double> out(n);
    for (auto& z : out) {
        switch (prior.family) {
        case PriorSpec::Family::gaussian: z = rng.normal(); break;
        case PriorSpec::Family::rademacher: z = rng.sign(); break;
        case PriorSpec::Family::stretched_exp: {
            // |z|^q is Gamma(1/q, 1) distributed.
            const double g = boost::math::gamma_p_inv(1.0 / prior.q, rng.uniform_open());
            z = rng.sign() * std::pow(g, 1.0 / prior.q);
            break;
        }
        case PriorSpec::Family::gauss_bernoulli_mix:
            z = rng.uniform() < prior.weight ? rng.normal() : rng.sign();
            break;
        }
    }
    return out;
}

double log_mgf_quadrature(double q, double beta, double x) {
    if (!(q > 1.0) || !(beta > 0.0)) throw DomainError("log_mgf_quadrature: need q > 1 and beta > 0");
    if (!std::isfinite(x)) throw DomainError("log_mgf_quadrature: x must be finite");
    x = std::fabs(x);
    if (x == 0.0) return 0.0;
    // Peak of x z - beta z^q on z > 0; the integrand is integrated relative to it.
    const double zs = std::pow(x / (q * beta), 1.0 / (q - 1.0));
    const double peak = x * zs - beta * std::pow(zs, q);
    const double above =
        integrate_half_line([&](double t) { return std::exp(x * t - beta * power_increment(zs, t, q)); }, "u_eval");
    const double negative =
        integrate_half_line([&](double s) { return std::exp(-x * s - beta * std::pow(s, q) - peak); }, "u_eval");
    // For tiny x the interval [0, zs] is tiny too; judge its error against the total.
    const double below = integrate_interval(
        [&](double s) { return std::exp(-x * s - beta * power_increment(zs, -s, q)); }, 0.0, zs, "u_eval",
        above + negative);
    return peak + std::log(below + above + negative) - log_norm(q, beta);
}

double u_eval(const PriorSpec& prior, double x) {
    prior.validate();
    if (!std::isfinite(x)) throw DomainError("u_eval: x must be finite");
    switch (prior.family) {
    case PriorSpec::Family::gaussian: return 0.5 * x * x;
    case PriorSpec::Family::rademacher: return log_cosh(x);
    case PriorSpec::Family::stretched_exp: return log_mgf_quadrature(prior.q, 1.0, x);
    case PriorSpec::Family::gauss_bernoulli_mix: {
        if (x == 0.0) return 0.0;
        const double w = prior.weight;
        const double a = w > 0.0 ? std::log(w) + 0.5 * x * x : -kInf;
        const double b = w < 1.0 ? std::log1p(-w) + log_cosh(x) : -kInf;
        return log_add(a, b);
    }
    }
    return 0.0;
}

CumulantReport growth_ratio(const PriorSpec& prior, double p) {
    if (!(p > 0.0)) throw DomainError("growth_ratio: p must be positive");
    constexpr int kPerDecade = 10;
    constexpr int kPoints = 4 * kPerDecade + 1;
    CumulantReport report;
    report.p = p;
    for (int i = 0; i < kPoints; ++i) {
        const double x = std::pow(10.0, -1.0 + static_cast<double>(i) / kPerDecade);
        double u = 0.0;
        try {
            u = u_eval(prior, x);
        } catch (const NumericError&) {
            if (report.x.empty()) throw;
            break;
        }
        report.x.push_back(x);
        report.u.push_back(u);
        report.ratio.push_back(u / std::pow(x, p));
    }
    report.limit_estimate = report.ratio.back();
    if (report.ratio.size() > static_cast<std::size_t>(kPerDecade)) {
        const double before = report.ratio[report.ratio.size() - 1 - kPerDecade];
        const double last = report.limit_estimate;
        report.converged = std::isfinite(last) && last != 0.0 && std::fabs(last - before) < 0.01 * std::fabs(last);
    }
    return report;
}

void write_cumulant_csv(std::ostream& out, const CumulantReport& report) {
    out << "x,u,ratio\n";
    char buf[128];
    for (std::size_t i = 0; i < report.x.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", report.x[i], report.u[i], report.ratio[i]);
        out << buf;
    }
}

double psi_functional(const PriorSpec& prior, double r, double lambda) {
    prior.validate();
    if (!(lambda > 0.0)) throw DomainError("psi_functional: lambda must be positive");
    if (!(r >= 1.0)) throw DomainError("psi_functional: r must be >= 1");
    const double atom = std::exp(std::pow(lambda, -r));
    switch (prior.family) {
    case PriorSpec::Family::gaussian: return continuous_psi(2.0, 0.5, r, lambda);
    case PriorSpec::Family::rademacher: return atom;
    case PriorSpec::Family::stretched_exp: return continuous_psi(prior.q, 1.0, r, lambda);
    case PriorSpec::Family::gauss_bernoulli_mix: {
        const double w = prior.weight;
        const double cont = w > 0.0 ? w * continuous_psi(2.0, 0.5, r, lambda) : 0.0;
        return cont + (1.0 - w) * atom;
    }
    }
    return kInf;
}

double psi_norm(const PriorSpec& prior, double r) {
    prior.validate();
    if (!(r >= 1.0)) throw DomainError("psi_norm: r must be >= 1");
    if (r > prior.tail_exponent())
        throw DomainError("psi_norm: r exceeds the tail exponent, the expectation diverges for every lambda");
    if (prior.family == PriorSpec::Family::rademacher) return std::pow(std::log(2.0), -1.0 / r);

    auto value = [&](double lambda) { return psi_functional(prior, r, lambda); };
    double hi = 1.0;
    for (int i = 0; value(hi) > 2.0; ++i) {
        if (i > 200) throw NumericError("psi_norm: no upper bracket found");
        hi *= 2.0;
    }
    double lo = hi;
    for (int i = 0; value(lo) <= 2.0; ++i) {
        if (i > 200) throw NumericError("psi_norm: no lower bracket found");
        lo *= 0.5;
    }
    for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (value(mid) > 2.0 ? lo : hi) = mid;
    }
    return hi;
}

} // namespace pspin
