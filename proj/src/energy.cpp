#include "pspin/energy.hpp"

#include "pspin/errors.hpp"

#include <bit>
#include <cmath>

namespace pspin {

double abs_pow(std::int64_t m, double p) noexcept {
    if (m == 0) return 0.0;
    const double a = static_cast<double>(m < 0 ? -m : m);
    if (p == 2.0) return a * a;
    if (p == 3.0) return a * a * a;
    return std::pow(a, p);
}

double energy_scale(std::size_t n1, const ExponentSet& ex) {
    return std::pow(static_cast<double>(n1), -ex.kappa);
}

double energy_full(const SpinState& sigma, const PatternMatrix& xi, const ExponentSet& ex) {
    if (sigma.size() != xi.n1()) throw DomainError("energy_full: state length does not match patterns");
    double sum = 0.0;
    for (std::size_t mu = 0; mu < xi.n2(); ++mu) sum += abs_pow(xi.overlap(mu, sigma), ex.p);
    return -sum / std::pow(static_cast<double>(xi.n1()), ex.kappa);
}

OverlapState::OverlapState(const SpinState& sigma, const PatternMatrix& xi, const ExponentSet& ex)
    : xi_(&xi), sigma_(sigma), ex_(ex), norm_(std::pow(static_cast<double>(xi.n1()), ex.kappa)) {
    if (sigma.size() != xi.n1()) throw DomainError("init_overlaps: state length does not match patterns");
    m_.resize(xi.n2());
    pow_m_.resize(xi.n2());
    for (std::size_t mu = 0; mu < xi.n2(); ++mu) {
        m_[mu] = xi.overlap(mu, sigma_);
        pow_m_[mu] = abs_pow(m_[mu], ex_.p);
    }
    refresh();
}

void OverlapState::check_site(std::size_t k) const {
    if (k >= xi_->n1()) throw DomainError("site index out of range");
}

double OverlapState::delta_flip(std::size_t k) const {
    check_site(k);
    double sum = 0.0;
    for (std::size_t mu = 0; mu < m_.size(); ++mu) {
        const std::int64_t next = m_[mu] - 2 * coupling(mu, k);
        sum += abs_pow(next, ex_.p) - pow_m_[mu];
    }
    return -sum / norm_;
}

std::int64_t OverlapState::delta_flip_p2_numerator(std::size_t k) const {
    check_site(k);
    if (ex_.p != 2.0) throw DomainError("integer delta numerator requires p = 2");
    // (m - 2a)^2 - m^2 = 4 - 4am, negated.
    std::int64_t sum = 0;
    for (std::size_t mu = 0; mu < m_.size(); ++mu) sum += 4 * coupling(mu, k) * m_[mu] - 4;
    return sum;
}

void OverlapState::apply_flip(std::size_t k) {
    check_site(k);
    double sum = 0.0;
    for (std::size_t mu = 0; mu < m_.size(); ++mu) {
        m_[mu] -= 2 * coupling(mu, k);
        const double next = abs_pow(m_[mu], ex_.p);
        sum += next - pow_m_[mu];
        pow_m_[mu] = next;
    }
    sigma_.flip(k);
    energy_ -= sum / norm_;
    if (++applies_since_refresh_ >= kRefreshInterval) refresh();
}

void OverlapState::refresh() {
    double sum = 0.0;
    for (double v : pow_m_) sum += v;
    energy_ = -sum / norm_;
    applies_since_refresh_ = 0;
}

SplitOverlaps split_overlaps(const SpinState& sigma, const PatternMatrix& xi, const FlipSet& J) {
    const std::size_t n1 = xi.n1();
    if (sigma.size() != n1) throw DomainError("split_overlaps: state length does not match patterns");
    const auto mask = J.mask(n1);
    const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(n1));
    const auto in_size = static_cast<std::int64_t>(J.size());
    const auto out_size = static_cast<std::int64_t>(n1) - in_size;
    SplitOverlaps out;
    out.x.resize(xi.n2());
    out.y.resize(xi.n2());
    for (std::size_t mu = 0; mu < xi.n2(); ++mu) {
        const auto row = xi.row_words(mu);
        std::int64_t diff_in = 0;
        std::int64_t diff_all = 0;
        for (std::size_t w = 0; w < row.size(); ++w) {
            const std::uint64_t d = row[w] ^ sigma.words()[w];
            diff_in += std::popcount(d & mask[w]);
            diff_all += std::popcount(d);
        }
        out.x[mu] = static_cast<double>(in_size - 2 * diff_in) * inv_sqrt;
        out.y[mu] = static_cast<double>(out_size - 2 * (diff_all - diff_in)) * inv_sqrt;
    }
    return out;
}

GapRepresentation gap_representation(const PatternMatrix& xi, const FlipSet& J, const ExponentSet& ex) {
    const std::size_t n1 = xi.n1();
    if (2 * J.size() >= n1) throw DomainError("gap_representation: |J| must be below n1/2");
    const SpinState pattern = xi.row(0);
    GapRepresentation g;
    g.lhs = energy_full(pattern, xi, ex) - energy_full(flip(pattern, J), xi, ex);

    const double n = static_cast<double>(n1);
    const double r = static_cast<double>(J.size()) / n;
    const auto split = split_overlaps(pattern, xi, J);
    double interference = 0.0;
    for (std::size_t mu = 1; mu < xi.n2(); ++mu) interference += phi(split.x[mu], split.y[mu], ex.p);
    g.rhs = -std::pow(n, -(ex.p_plus - ex.p) / 2.0) * phi_bar(r, ex.p)
          - std::pow(n, -ex.p_plus / 2.0) * interference;
    return g;
}

FlipIdentity p2_flip_identity(const PatternMatrix& xi, const FlipSet& J, std::size_t k) {
    const std::size_t n1 = xi.n1();
    if (k >= n1) throw DomainError("p2_flip_identity: site index out of range");
    const ExponentSet ex = exponents(2.0);
    const SpinState pattern = xi.row(0);
    const SpinState base = flip(pattern, J);

    const OverlapState state(base, xi, ex);
    const double n = static_cast<double>(n1);
    FlipIdentity id;
    id.lhs = n / 4.0 * state.delta_flip(k);

    const double sign = J.contains(k) ? -1.0 : 1.0;
    const double r = static_cast<double>(J.size()) / n;
    const double sqrt_n = std::sqrt(n);
    double field = 0.0;
    for (std::size_t mu = 1; mu < xi.n2(); ++mu) {
        const double z = static_cast<double>(state.overlaps()[mu]) / sqrt_n;
        field += xi.entry(0, k) * xi.entry(mu, k) * z / sqrt_n;
    }
    id.rhs = sign * (field + (1.0 - 2.0 * r)) - static_cast<double>(xi.n2()) / n;
    return id;
}

} // namespace pspin
