#pragma once

#include "pspin/energy.hpp"
#include "pspin/model.hpp"
#include "pspin/patterns.hpp"
#include "pspin/rng.hpp"

#include <optional>
#include <vector>

namespace pspin {

enum class DescentRule { first_improvement, steepest };
enum class SweepOrder { fixed, random_permutation };

/// How single-flip ties (|Δ| <= tie_epsilon) are classified.
///   strict: a local minimum needs every neighbour strictly higher.
///   weak:   a local minimum needs no neighbour strictly lower.
/// The descent never takes a tied move under either convention.
enum class MinimumConvention { strict, weak };

/// Default tie tolerance: 0 for p = 2 (deltas compared as exact integers),
/// 1e-12 n1^(p - kappa) otherwise.
double default_tie_epsilon(std::size_t n1, const ExponentSet& ex);

struct DescentPolicy {
    DescentRule rule = DescentRule::first_improvement;
    SweepOrder order = SweepOrder::random_permutation;
    std::size_t max_sweeps = 10'000;
    /// Unset means default_tie_epsilon.
    std::optional<double> tie_epsilon;
    MinimumConvention convention = MinimumConvention::strict;

    void validate() const;
    double resolved_tie_epsilon(std::size_t n1, const ExponentSet& ex) const;
};

enum class StopReason {
    local_minimum, ///< certified under the policy's convention
    plateau,       ///< no improving flip, but a tied neighbour (strict convention only)
    max_sweeps,
};

const char* to_string(StopReason reason);

/// Evidence that the endpoint is a local minimum: the smallest single-flip
/// energy change and the site achieving it.
struct LocalMinCertificate {
    double min_delta = 0.0;
    std::size_t site = 0;
};

struct DescentResult {
    SpinState endpoint;
    std::size_t flips = 0;
    std::size_t sweeps = 0;
    /// Energy at the start and after each accepted flip.
    std::vector<double> energy_trace;
    bool converged = false;
    StopReason stop = StopReason::max_sweeps;
    std::optional<LocalMinCertificate> certificate;
};

/// floor(r n1), guarded against representation error in r n1.
std::size_t flip_count(double r, std::size_t n1);

/// Flips exactly floor(r n1) distinct uniformly chosen sites of `pattern`.
SpinState perturb(const SpinState& pattern, double r, Rng& rng);

/// Greedy single-flip descent: moves only when a flip lowers the energy by
/// more than the tie tolerance, until no such flip exists or max_sweeps
/// passes have been made.
DescentResult descend(const SpinState& start, const PatternMatrix& xi, const ExponentSet& ex,
                      const DescentPolicy& policy, Rng& rng);

} // namespace pspin
