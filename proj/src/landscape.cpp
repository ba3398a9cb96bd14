#include "pspin/landscape.hpp"

#include "pspin/errors.hpp"
#include "pspin/parallel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>
#include <string>

namespace pspin {

double binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0.0;
    k = std::min(k, n - k);
    double c = 1.0;
    for (std::size_t i = 1; i <= k; ++i) c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
    return std::round(c);
}

RevolvingDoor::RevolvingDoor(std::size_t n, std::size_t k) : n_(n), k_(k), c_(k + 2) {
    if (k > n) throw DomainError("revolving door: k exceeds n");
    for (std::size_t j = 1; j <= k; ++j) c_[j] = j - 1;
    c_[k + 1] = n;
}

// Knuth, TAOCP 7.2.1.3, Algorithm R.
std::optional<RevolvingDoor::Swap> RevolvingDoor::next() {
    if (done_ || k_ == 0 || k_ == n_) {
        done_ = true;
        return std::nullopt;
    }
    auto& c = c_;
    std::size_t j = 2;
    bool try_decrease;
    if (k_ % 2 == 1) {
        if (c[1] + 1 < c[2]) {
            Swap s{c[1], c[1] + 1};
            ++c[1];
            return s;
        }
        try_decrease = true;
    } else {
        if (c[1] > 0) {
            Swap s{c[1], c[1] - 1};
            --c[1];
            return s;
        }
        try_decrease = false;
    }
    while (j <= k_) {
        if (try_decrease) {
            // Here c[j] == c[j-1] + 1.
            if (c[j] >= j) {
                Swap s{c[j], j - 2};
                c[j] = c[j - 1];
                c[j - 1] = j - 2;
                return s;
            }
            ++j;
            if (j > k_) break;
        }
        // Here c[j-1] == j - 2.
        if (c[j] + 1 < c[j + 1]) {
            Swap s{c[j - 1], c[j] + 1};
            c[j - 1] = c[j];
            ++c[j];
            return s;
        }
        ++j;
        try_decrease = true;
    }
    done_ = true;
    return std::nullopt;
}

LocalMinCheck certify_local_min(const SpinState& sigma, const PatternMatrix& xi, const ExponentSet& ex,
                                std::optional<double> tie_epsilon, MinimumConvention convention) {
    const OverlapState state(sigma, xi, ex);
    const double eps = tie_epsilon ? *tie_epsilon : default_tie_epsilon(xi.n1(), ex);
    LocalMinCheck check;
    check.min_delta = std::numeric_limits<double>::infinity();
    std::size_t argmin = 0;
    for (std::size_t k = 0; k < xi.n1(); ++k) {
        const double d = state.delta_flip(k);
        if (d < check.min_delta) {
            check.min_delta = d;
            argmin = k;
        }
    }
    check.is_min = convention == MinimumConvention::strict ? check.min_delta > eps : check.min_delta >= -eps;
    if (!check.is_min) check.witness = argmin;
    return check;
}

namespace {

void require_budget(double count, const char* what) {
    if (count > kExhaustiveBudget)
        throw BudgetError(std::string(what) + ": " + std::to_string(count) + " configurations exceed the budget of 1e7");
}

// Energy gap H(σ) - H(ξ^(mu)) expressed through the overlap power sums so
// that the gap does not inherit the cancellation of two large energies.
double gap_of(const OverlapState& state, double base_sum, double norm) {
    double sum = 0.0;
    for (std::int64_t m : state.overlaps()) sum += abs_pow(m, state.exponents().p);
    return -(sum - base_sum) / norm;
}

double power_sum(const OverlapState& state) {
    double sum = 0.0;
    for (std::int64_t m : state.overlaps()) sum += abs_pow(m, state.exponents().p);
    return sum;
}

double scan_exhaustive(std::size_t mu, std::size_t radius, const PatternMatrix& xi, const ExponentSet& ex,
                       std::size_t threads) {
    const std::size_t n1 = xi.n1();
    const OverlapState base(xi.row(mu), xi, ex);
    const double base_energy = base.energy();
    if (radius == 0) return 0.0;

    // Chunk v holds the subsets whose largest element is v.
    const std::size_t first = radius - 1;
    const std::size_t chunks = n1 - first;
    std::vector<double> chunk_min(chunks, std::numeric_limits<double>::infinity());
    parallel_for(chunks, threads, [&](std::size_t c) {
        const std::size_t top = first + c;
        OverlapState state = base;
        state.apply_flip(top);
        RevolvingDoor door(top, radius - 1);
        for (std::size_t i : door.current()) state.apply_flip(i);
        double best = state.energy() - base_energy;
        while (auto s = door.next()) {
            state.apply_flip(s->out);
            state.apply_flip(s->in);
            best = std::min(best, state.energy() - base_energy);
        }
        chunk_min[c] = best;
    });
    return *std::min_element(chunk_min.begin(), chunk_min.end());
}

} // namespace

SphereScan sphere_scan(std::size_t mu, std::size_t radius, const PatternMatrix& xi, const ExponentSet& ex,
                       ScanMode mode, Rng& rng, std::size_t threads) {
    const std::size_t n1 = xi.n1();
    if (mu >= xi.n2()) throw DomainError("sphere_scan: pattern index out of range");
    if (radius > n1) throw DomainError("sphere_scan: radius exceeds n1");
    const double total = binomial(n1, radius);

    SphereScan out;
    if (mode.kind == ScanMode::Kind::exhaustive) {
        require_budget(total, "exhaustive sphere scan");
    }
    const std::size_t wanted = mode.kind == ScanMode::Kind::exhaustive
        ? static_cast<std::size_t>(total)
        : static_cast<std::size_t>(std::min<double>({static_cast<double>(mode.samples),
                                                     static_cast<double>(kMaxSphereSamples), total}));
    if (mode.kind == ScanMode::Kind::sampled && mode.samples == 0) throw DomainError("sampled scan needs k >= 1");

    if (static_cast<double>(wanted) >= total) {
        out.min_gap = scan_exhaustive(mu, radius, xi, ex, threads);
        out.visited = static_cast<std::size_t>(total);
        out.complete = true;
        return out;
    }

    // Distinct uniform subsets, drawn sequentially so the sample for k is a
    // prefix of the sample for any larger k.
    std::vector<std::vector<std::size_t>> subsets;
    subsets.reserve(wanted);
    std::set<std::vector<std::size_t>> seen;
    std::vector<std::size_t> sites(n1);
    while (subsets.size() < wanted) {
        std::iota(sites.begin(), sites.end(), std::size_t{0});
        for (std::size_t i = 0; i < radius; ++i) {
            const auto j = i + static_cast<std::size_t>(rng.below(n1 - i));
            std::swap(sites[i], sites[j]);
        }
        std::vector<std::size_t> subset(sites.begin(), sites.begin() + static_cast<std::ptrdiff_t>(radius));
        std::sort(subset.begin(), subset.end());
        if (seen.insert(subset).second) subsets.push_back(std::move(subset));
    }

    const OverlapState base(xi.row(mu), xi, ex);
    const double base_sum = power_sum(base);
    const double norm = std::pow(static_cast<double>(n1), ex.kappa);
    std::vector<double> gaps(subsets.size());
    constexpr std::size_t kBlock = 256;
    const std::size_t blocks = (subsets.size() + kBlock - 1) / kBlock;
    parallel_for(blocks, threads, [&](std::size_t b) {
        const std::size_t end = std::min(subsets.size(), (b + 1) * kBlock);
        for (std::size_t s = b * kBlock; s < end; ++s) {
            OverlapState state = base;
            for (std::size_t i : subsets[s]) state.apply_flip(i);
            gaps[s] = gap_of(state, base_sum, norm);
        }
    });
    out.min_gap = *std::min_element(gaps.begin(), gaps.end());
    out.visited = subsets.size();
    out.complete = false;
    return out;
}

BarrierProfile barrier_profile(std::size_t mu, std::span<const std::size_t> radii, const PatternMatrix& xi,
                               const ExponentSet& ex, ScanMode mode, std::uint64_t seed, std::size_t threads) {
    BarrierProfile profile;
    profile.mu = mu;
    profile.mode = mode;
    profile.seed = seed;
    for (std::size_t n : radii) {
        Rng rng = Rng::stream(seed, mu, n);
        const SphereScan scan = sphere_scan(mu, n, xi, ex, mode, rng, threads);
        profile.radii.push_back(n);
        profile.min_gap.push_back(scan.min_gap);
        profile.samples.push_back(scan.visited);
    }
    return profile;
}

namespace {

std::string mode_label(const ScanMode& mode) {
    return mode.kind == ScanMode::Kind::exhaustive ? "exhaustive" : "sampled(" + std::to_string(mode.samples) + ")";
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

void write_barrier_csv(std::ostream& out, std::span<const BarrierProfile> profiles) {
    out << "mu,radius,min_gap,mode,samples,seed\n";
    for (const auto& p : profiles)
        for (std::size_t i = 0; i < p.radii.size(); ++i)
            out << p.mu << ',' << p.radii[i] << ',' << format_double(p.min_gap[i]) << ',' << mode_label(p.mode)
                << ',' << p.samples[i] << ',' << p.seed << '\n';
}

namespace {

std::size_t nearest_pattern(const SpinState& sigma, const PatternMatrix& xi) {
    std::size_t best = 0;
    std::size_t best_dist = std::numeric_limits<std::size_t>::max();
    for (std::size_t mu = 0; mu < xi.n2(); ++mu) {
        const std::size_t h = hamming_words(xi.row_words(mu), sigma.words());
        const std::size_t d = std::min(h, xi.n1() - h);
        if (d < best_dist) {
            best_dist = d;
            best = mu;
        }
    }
    return best;
}

bool is_minimum(const OverlapState& state, double eps, MinimumConvention convention) {
    for (std::size_t k = 0; k < state.n1(); ++k) {
        const double d = state.delta_flip(k);
        if (convention == MinimumConvention::strict ? !(d > eps) : d < -eps) return false;
    }
    return true;
}

} // namespace

LocalMinSet enumerate_local_minima(const PatternMatrix& xi, const ExponentSet& ex, LocalMinScope scope,
                                   std::optional<double> tie_epsilon, MinimumConvention convention) {
    const std::size_t n1 = xi.n1();
    const double eps = tie_epsilon ? *tie_epsilon : default_tie_epsilon(n1, ex);
    std::vector<SpinState> found;

    if (scope.kind == LocalMinScope::Kind::all_states) {
        if (n1 > 20) throw BudgetError("all-states enumeration requires n1 <= 20");
        OverlapState state(SpinState(n1), xi, ex);
        const std::uint64_t total = std::uint64_t{1} << n1;
        for (std::uint64_t i = 0; i < total; ++i) {
            if (is_minimum(state, eps, convention)) found.push_back(state.sigma());
            if (i + 1 < total) state.apply_flip(static_cast<std::size_t>(std::countr_zero(i + 1)));
        }
    } else {
        if (scope.mu >= xi.n2()) throw DomainError("ball scope: pattern index out of range");
        if (!(scope.r0 >= 0.0 && scope.r0 <= 1.0)) throw DomainError("ball scope: r0 must lie in [0, 1]");
        const std::size_t radius = flip_count(scope.r0, n1);
        double total = 0.0;
        for (std::size_t j = 0; j <= radius; ++j) total += binomial(n1, j);
        require_budget(total, "ball enumeration");
        const OverlapState centre(xi.row(scope.mu), xi, ex);
        for (std::size_t j = 0; j <= radius; ++j) {
            OverlapState state = centre;
            RevolvingDoor door(n1, j);
            for (std::size_t i : door.current()) state.apply_flip(i);
            for (;;) {
                if (is_minimum(state, eps, convention)) found.push_back(state.sigma());
                auto s = door.next();
                if (!s) break;
                state.apply_flip(s->out);
                state.apply_flip(s->in);
            }
        }
    }

    std::sort(found.begin(), found.end());
    std::vector<double> pattern_energy(xi.n2());
    for (std::size_t mu = 0; mu < xi.n2(); ++mu) pattern_energy[mu] = energy_full(xi.row(mu), xi, ex);

    LocalMinSet set;
    set.states = std::move(found);
    for (const auto& s : set.states) {
        const std::size_t owner = nearest_pattern(s, xi);
        set.owner.push_back(owner);
        set.deep.push_back(energy_full(s, xi, ex) < pattern_energy[owner] - eps);
    }
    return set;
}

GroundState ground_state(const PatternMatrix& xi, const ExponentSet& ex, GroundStateMode mode, Rng& rng,
                         const DescentPolicy& policy) {
    const std::size_t n1 = xi.n1();
    GroundState best;
    best.energy = std::numeric_limits<double>::infinity();
    if (mode.kind == GroundStateMode::Kind::exhaustive) {
        if (n1 > 20) throw BudgetError("exhaustive ground state requires n1 <= 20");
        OverlapState state(SpinState(n1), xi, ex);
        const std::uint64_t total = std::uint64_t{1} << n1;
        for (std::uint64_t i = 0; i < total; ++i) {
            if (state.energy() < best.energy) {
                best.energy = state.energy();
                best.state = state.sigma();
            }
            if (i + 1 < total) state.apply_flip(static_cast<std::size_t>(std::countr_zero(i + 1)));
        }
    } else {
        if (mode.starts == 0) throw DomainError("multistart needs at least one start");
        for (std::size_t s = 0; s < mode.starts; ++s) {
            const SpinState start = SpinState::random(n1, rng);
            const DescentResult r = descend(start, xi, ex, policy, rng);
            const double e = r.energy_trace.back();
            if (e < best.energy) {
                best.energy = e;
                best.state = r.endpoint;
            }
        }
    }
    best.energy = energy_full(best.state, xi, ex);
    return best;
}

} // namespace pspin
