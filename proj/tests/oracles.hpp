#pragma once

// Naive reference implementations used as test oracles. Nothing here
// shares code with the library beyond the RNG and the container types.

#include "pspin/patterns.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<int>>;

inline Matrix rows_of(const pspin::PatternMatrix& xi) {
    Matrix m(xi.n2(), std::vector<int>(xi.n1()));
    for (std::size_t mu = 0; mu < xi.n2(); ++mu)
        for (std::size_t i = 0; i < xi.n1(); ++i) m[mu][i] = xi.entry(mu, i);
    return m;
}

inline double kappa_of(double p) { return p >= 2.0 ? p : 1.0 + p / 2.0; }

/// -n1^-kappa Σ_mu |Σ_i ξ_i σ_i|^p with plain loops and std::pow.
inline double energy(const Matrix& xi, const std::vector<int>& sigma, double p) {
    const double n1 = static_cast<double>(sigma.size());
    double sum = 0.0;
    for (const auto& row : xi) {
        long long m = 0;
        for (std::size_t i = 0; i < sigma.size(); ++i) m += row[i] * sigma[i];
        sum += std::pow(std::fabs(static_cast<double>(m)), p);
    }
    return -sum / std::pow(n1, kappa_of(p));
}

inline std::vector<int> state_of_bits(std::uint64_t bits, std::size_t n1) {
    std::vector<int> s(n1);
    for (std::size_t i = 0; i < n1; ++i) s[i] = (bits >> i) & 1U ? 1 : -1;
    return s;
}

/// Double loop over all 2^n1 states and their n1 neighbours. `strict`
/// requires every neighbour strictly higher; otherwise no neighbour lower.
inline std::vector<std::vector<int>> local_minima(const Matrix& xi, std::size_t n1, double p, bool strict) {
    std::vector<double> e(std::size_t{1} << n1);
    for (std::uint64_t b = 0; b < e.size(); ++b) e[b] = energy(xi, state_of_bits(b, n1), p);
    std::vector<std::vector<int>> out;
    for (std::uint64_t b = 0; b < e.size(); ++b) {
        bool ok = true;
        for (std::size_t k = 0; k < n1 && ok; ++k) {
            const double nb = e[b ^ (std::uint64_t{1} << k)];
            ok = strict ? nb > e[b] : !(nb < e[b]);
        }
        if (ok) out.push_back(state_of_bits(b, n1));
    }
    return out;
}

inline long long binom(int n, int k) {
    long long c = 1;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return c;
}

} // namespace oracle
