#pragma once

#include "pspin/dynamics.hpp"
#include "pspin/energy.hpp"
#include "pspin/patterns.hpp"
#include "pspin/rng.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace pspin {

/// Largest number of configurations an exhaustive scan may visit.
inline constexpr double kExhaustiveBudget = 1e7;

/// Cap on the number of subsets drawn by a sampled sphere scan.
inline constexpr std::size_t kMaxSphereSamples = 100'000;

/// Binomial coefficient as a double (exact below 2^53).
double binomial(std::size_t n, std::size_t k);

/// k-subsets of {0, ..., n-1} in revolving-door (minimal change) order:
/// consecutive subsets differ by removing one element and adding another.
class RevolvingDoor {
public:
    struct Swap {
        std::size_t out;
        std::size_t in;
    };

    RevolvingDoor(std::size_t n, std::size_t k);

    /// Current subset, increasing.
    std::span<const std::size_t> current() const noexcept { return {c_.data() + 1, k_}; }

    /// Moves to the next subset; std::nullopt once all have been visited.
    std::optional<Swap> next();

private:
    std::size_t n_;
    std::size_t k_;
    std::vector<std::size_t> c_; // 1-based with sentinel c_[k+1] = n
    bool done_ = false;
};

struct LocalMinCheck {
    bool is_min = false;
    /// A site whose flip violates the minimum condition (the steepest one).
    std::optional<std::size_t> witness;
    double min_delta = 0.0;
};

LocalMinCheck certify_local_min(const SpinState& sigma, const PatternMatrix& xi, const ExponentSet& ex,
                                std::optional<double> tie_epsilon = std::nullopt,
                                MinimumConvention convention = MinimumConvention::strict);

struct ScanMode {
    enum class Kind { exhaustive, sampled };
    Kind kind = Kind::exhaustive;
    std::size_t samples = 0;

    static ScanMode exhaustive() { return {Kind::exhaustive, 0}; }
    static ScanMode sampled(std::size_t k) { return {Kind::sampled, k}; }
};

struct SphereScan {
    /// min over visited σ at Hamming distance `radius` from ξ^(mu) of H(σ) - H(ξ^(mu)).
    double min_gap = 0.0;
    std::size_t visited = 0;
    /// True when every point of the sphere was visited.
    bool complete = false;
};

/// Exhaustive mode walks all C(n1, radius) subsets in revolving-door order,
/// partitioned by largest element across workers, and throws BudgetError
/// beyond kExhaustiveBudget. Sampled mode draws min(k, 1e5, C(n1, radius))
/// distinct subsets in an order fixed by `rng`, so a larger k extends the
/// sample of a smaller one; its minimum is an upper bound of the true one.
SphereScan sphere_scan(std::size_t mu, std::size_t radius, const PatternMatrix& xi, const ExponentSet& ex,
                       ScanMode mode, Rng& rng, std::size_t threads = 1);

struct BarrierProfile {
    std::size_t mu = 0;
    std::vector<std::size_t> radii;
    std::vector<double> min_gap;
    std::vector<std::size_t> samples;
    ScanMode mode;
    std::uint64_t seed = 0;
};

/// Sphere scans at each radius; radius n uses the stream (seed, mu, n).
BarrierProfile barrier_profile(std::size_t mu, std::span<const std::size_t> radii, const PatternMatrix& xi,
                               const ExponentSet& ex, ScanMode mode, std::uint64_t seed, std::size_t threads = 1);

/// CSV with header `mu,radius,min_gap,mode,samples,seed`.
void write_barrier_csv(std::ostream& out, std::span<const BarrierProfile> profiles);

struct LocalMinScope {
    enum class Kind { all_states, ball };
    Kind kind = Kind::all_states;
    std::size_t mu = 0;
    double r0 = 0.0;

    static LocalMinScope all_states() { return {Kind::all_states, 0, 0.0}; }
    static LocalMinScope ball(std::size_t mu, double r0) { return {Kind::ball, mu, r0}; }
};

struct LocalMinSet {
    /// Sorted ascending.
    std::vector<SpinState> states;
    /// H(σ) < H(ξ^(owner)) - tie_epsilon.
    std::vector<bool> deep;
    /// Nearest pattern up to global flip; ties go to the lower index.
    std::vector<std::size_t> owner;
};

/// all_states needs n1 <= 20; ball needs Σ_{j <= floor(r0 n1)} C(n1, j) <= 1e7.
LocalMinSet enumerate_local_minima(const PatternMatrix& xi, const ExponentSet& ex, LocalMinScope scope,
                                   std::optional<double> tie_epsilon = std::nullopt,
                                   MinimumConvention convention = MinimumConvention::strict);

struct GroundStateMode {
    enum class Kind { exhaustive, multistart };
    Kind kind = Kind::exhaustive;
    std::size_t starts = 0;

    static GroundStateMode exhaustive() { return {Kind::exhaustive, 0}; }
    static GroundStateMode multistart(std::size_t k) { return {Kind::multistart, k}; }
};

struct GroundState {
    SpinState state;
    double energy = 0.0;
};

/// Exhaustive search is exact (n1 <= 20). Multistart returns the best of k
/// descents from uniformly random starts, an upper bound on the ground energy.
GroundState ground_state(const PatternMatrix& xi, const ExponentSet& ex, GroundStateMode mode, Rng& rng,
                         const DescentPolicy& policy = {});

} // namespace pspin
