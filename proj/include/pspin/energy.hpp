#pragma once

#include "pspin/model.hpp"
#include "pspin/patterns.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace pspin {

/// |m|^p for an integer overlap, with |0|^p = 0. Exponents 2 and 3 are
/// evaluated by multiplication, everything else by std::pow.
double abs_pow(std::int64_t m, double p) noexcept;

/// n1^(-kappa), the energy normalisation.
double energy_scale(std::size_t n1, const ExponentSet& ex);

/// H(σ) = -Σ_mu |(ξ^(mu), σ)|^p / n1^kappa, overlaps taken as exact integers.
/// Dividing by n1^kappa makes an aligned pattern give exactly -1 for p >= 2.
double energy_full(const SpinState& sigma, const PatternMatrix& xi, const ExponentSet& ex);

/// A spin configuration together with its exact overlaps m_mu = (ξ^(mu), σ),
/// giving O(n2) single-flip energy differences.
///
/// Holds a non-owning pointer to the pattern matrix, which must outlive the
/// state. Copies are independent and cheap enough to clone per worker.
class OverlapState {
public:
    OverlapState(const SpinState& sigma, const PatternMatrix& xi, const ExponentSet& ex);

    const SpinState& sigma() const noexcept { return sigma_; }
    std::span<const std::int64_t> overlaps() const noexcept { return m_; }
    const ExponentSet& exponents() const noexcept { return ex_; }
    const PatternMatrix& patterns() const noexcept { return *xi_; }
    std::size_t n1() const noexcept { return xi_->n1(); }
    std::size_t n2() const noexcept { return xi_->n2(); }

    /// Cached energy; kept within 1e-9 relative of energy_full.
    double energy() const noexcept { return energy_; }

    /// H(σ with site k flipped) - H(σ); the state is not modified.
    double delta_flip(std::size_t k) const;

    /// For p = 2 only: n1^2 times delta_flip(k), an exact integer.
    std::int64_t delta_flip_p2_numerator(std::size_t k) const;

    /// Flips site k, updating overlaps and the energy cache.
    void apply_flip(std::size_t k);

    /// Recomputes the energy cache from the overlaps.
    void refresh();

    static constexpr std::uint32_t kRefreshInterval = 1u << 16;

private:
    int coupling(std::size_t mu, std::size_t k) const noexcept {
        // ξ_k^(mu) σ_k as ±1.
        const auto row = xi_->row_words(mu);
        const std::uint64_t x = (row[k / kWordBits] ^ sigma_.words()[k / kWordBits]) >> (k % kWordBits);
        return (x & 1U) ? -1 : 1;
    }
    void check_site(std::size_t k) const;

    const PatternMatrix* xi_;
    SpinState sigma_;
    ExponentSet ex_;
    double norm_;
    std::vector<std::int64_t> m_;
    std::vector<double> pow_m_;
    double energy_ = 0.0;
    std::uint32_t applies_since_refresh_ = 0;
};

inline OverlapState init_overlaps(const SpinState& sigma, const PatternMatrix& xi, const ExponentSet& ex) {
    return OverlapState(sigma, xi, ex);
}

/// X_J and Y_J: overlaps restricted to J and to its complement, divided by √n1.
struct SplitOverlaps {
    std::vector<double> x;
    std::vector<double> y;
};

SplitOverlaps split_overlaps(const SpinState& sigma, const PatternMatrix& xi, const FlipSet& J);

/// Both sides of the flip-gap representation around pattern 0:
/// lhs = H(ξ^(0)) - H(F_J ξ^(0)) computed directly, rhs assembled from
/// phi_bar(|J|/n1) and Φ_p of the split overlaps of the remaining patterns.
struct GapRepresentation {
    double lhs = 0.0;
    double rhs = 0.0;
};

/// Requires 2|J| < n1.
GapRepresentation gap_representation(const PatternMatrix& xi, const FlipSet& J, const ExponentSet& ex);

/// Exact p = 2 single-flip identity at σ = F_J ξ^(0), scaled by n1/4.
///
/// lhs = (n1/4)(H(F_{J±k} ξ^(0)) - H(F_J ξ^(0))) from the incremental delta;
/// rhs = s (Σ_{mu>=1} ξ_k^(0) ξ_k^(mu) Z_J^(mu) / √n1 + (1 - 2r)) - n2/n1,
/// where s = +1 when k is added to J, -1 when removed, r = |J|/n1 and
/// Z_J^(mu) = (ξ^(mu), F_J ξ^(0)) / √n1.
struct FlipIdentity {
    double lhs = 0.0;
    double rhs = 0.0;
};

FlipIdentity p2_flip_identity(const PatternMatrix& xi, const FlipSet& J, std::size_t k);

} // namespace pspin
