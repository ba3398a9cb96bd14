#include "pspin/dynamics.hpp"

#include "pspin/errors.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace pspin {

double default_tie_epsilon(std::size_t n1, const ExponentSet& ex) {
    if (ex.p == 2.0) return 0.0;
    return 1e-12 * std::pow(static_cast<double>(n1), ex.p - ex.kappa);
}

void DescentPolicy::validate() const {
    if (max_sweeps < 1) throw DomainError("max_sweeps must be >= 1");
    if (tie_epsilon && !(*tie_epsilon >= 0.0)) throw DomainError("tie_epsilon must be >= 0");
}

double DescentPolicy::resolved_tie_epsilon(std::size_t n1, const ExponentSet& ex) const {
    return tie_epsilon ? *tie_epsilon : default_tie_epsilon(n1, ex);
}

const char* to_string(StopReason reason) {
    switch (reason) {
    case StopReason::local_minimum: return "local_minimum";
    case StopReason::plateau: return "plateau";
    case StopReason::max_sweeps: return "max_sweeps";
    }
    return "?";
}

std::size_t flip_count(double r, std::size_t n1) {
    return static_cast<std::size_t>(std::floor(r * static_cast<double>(n1) + 1e-9));
}

SpinState perturb(const SpinState& pattern, double r, Rng& rng) {
    if (!(r >= 0.0 && r <= 0.5)) throw DomainError("perturb: r must lie in [0, 1/2]");
    const std::size_t n1 = pattern.size();
    const std::size_t count = flip_count(r, n1);
    std::vector<std::size_t> sites(n1);
    std::iota(sites.begin(), sites.end(), std::size_t{0});
    SpinState out = pattern;
    for (std::size_t i = 0; i < count; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.below(n1 - i));
        std::swap(sites[i], sites[j]);
        out.flip(sites[i]);
    }
    return out;
}

namespace {

// For p = 2 every delta is an integer multiple of n1^-2 computed exactly in
// double precision, so the comparisons below are exact for eps = 0.
LocalMinCertificate scan_min_delta(const OverlapState& state) {
    LocalMinCertificate best{std::numeric_limits<double>::infinity(), 0};
    for (std::size_t k = 0; k < state.n1(); ++k) {
        const double d = state.delta_flip(k);
        if (d < best.min_delta) best = {d, k};
    }
    return best;
}

} // namespace

DescentResult descend(const SpinState& start, const PatternMatrix& xi, const ExponentSet& ex,
                      const DescentPolicy& policy, Rng& rng) {
    policy.validate();
    OverlapState state(start, xi, ex);
    const std::size_t n1 = xi.n1();
    const double eps = policy.resolved_tie_epsilon(n1, ex);

    DescentResult result;
    result.energy_trace.push_back(state.energy());
    std::vector<std::size_t> order(n1);
    std::iota(order.begin(), order.end(), std::size_t{0});

    bool stalled = false;
    while (result.sweeps < policy.max_sweeps) {
        ++result.sweeps;
        if (policy.order == SweepOrder::random_permutation) rng.shuffle(std::span<std::size_t>(order));
        if (policy.rule == DescentRule::first_improvement) {
            bool moved = false;
            for (std::size_t k : order) {
                if (state.delta_flip(k) < -eps) {
                    state.apply_flip(k);
                    ++result.flips;
                    result.energy_trace.push_back(state.energy());
                    moved = true;
                }
            }
            if (!moved) {
                stalled = true;
                break;
            }
        } else {
            double best = std::numeric_limits<double>::infinity();
            std::size_t best_site = 0;
            for (std::size_t k : order) {
                const double d = state.delta_flip(k);
                if (d < best) {
                    best = d;
                    best_site = k;
                }
            }
            if (!(best < -eps)) {
                stalled = true;
                break;
            }
            state.apply_flip(best_site);
            ++result.flips;
            result.energy_trace.push_back(state.energy());
        }
    }

    if (!stalled) {
        // The budget ran out on a sweep that still moved; check whether the
        // final configuration happens to be stationary anyway.
        stalled = !(scan_min_delta(state).min_delta < -eps);
    }
    result.endpoint = state.sigma();
    if (!stalled) {
        result.stop = StopReason::max_sweeps;
        return result;
    }
    const LocalMinCertificate cert = scan_min_delta(state);
    const bool strict_ok = cert.min_delta > eps;
    if (strict_ok || policy.convention == MinimumConvention::weak) {
        result.stop = StopReason::local_minimum;
        result.converged = true;
        result.certificate = cert;
    } else {
        result.stop = StopReason::plateau;
    }
    return result;
}

} // namespace pspin
