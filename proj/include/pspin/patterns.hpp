#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pspin {

class Rng;

inline constexpr std::size_t kWordBits = 64;

constexpr std::size_t words_for(std::size_t n) noexcept { return (n + kWordBits - 1) / kWordBits; }

/// A ±1 vector of length n1 packed into 64-bit words; a set bit is +1.
/// Padding bits beyond n1 are always zero.
class SpinState {
public:
    SpinState() = default;

    /// All entries -1.
    explicit SpinState(std::size_t n1);

    /// Entries from a vector of ±1 values.
    static SpinState from_values(std::span<const int> values);

    /// Entries from a string of '+' and '-' characters.
    static SpinState parse(std::string_view text);

    static SpinState random(std::size_t n1, Rng& rng);

    std::size_t size() const noexcept { return n1_; }
    std::span<const std::uint64_t> words() const noexcept { return words_; }

    int operator[](std::size_t i) const noexcept {
        return ((words_[i / kWordBits] >> (i % kWordBits)) & 1U) ? 1 : -1;
    }

    void set(std::size_t i, int value);
    void flip(std::size_t i);

    SpinState negated() const;
    std::vector<int> values() const;
    std::string to_string() const;

    friend bool operator==(const SpinState&, const SpinState&) = default;
    friend auto operator<=>(const SpinState& a, const SpinState& b) {
        if (auto c = a.n1_ <=> b.n1_; c != 0) return c;
        return a.words_ <=> b.words_;
    }

private:
    friend class PatternMatrix;
    std::size_t n1_ = 0;
    std::vector<std::uint64_t> words_;
};

/// Sorted, duplicate-free set of site indices.
class FlipSet {
public:
    FlipSet() = default;

    /// Takes indices in any order; rejects duplicates.
    explicit FlipSet(std::vector<std::size_t> indices);

    std::span<const std::size_t> indices() const noexcept { return indices_; }
    std::size_t size() const noexcept { return indices_.size(); }
    bool empty() const noexcept { return indices_.empty(); }
    bool contains(std::size_t i) const noexcept;

    /// Bit mask of the set over n1 sites; throws when an index is >= n1.
    std::vector<std::uint64_t> mask(std::size_t n1) const;

private:
    std::vector<std::size_t> indices_;
};

/// n2 independent ±1 patterns of length n1. Immutable once built.
class PatternMatrix {
public:
    PatternMatrix() = default;

    static PatternMatrix generate(std::size_t n1, std::size_t n2, std::uint64_t seed);

    /// Matrix with the given rows; `seed` is recorded verbatim.
    static PatternMatrix from_rows(std::span<const SpinState> rows, std::uint64_t seed = 0);

    std::size_t n1() const noexcept { return n1_; }
    std::size_t n2() const noexcept { return n2_; }
    std::uint64_t seed() const noexcept { return seed_; }
    std::size_t words_per_row() const noexcept { return wpr_; }

    std::span<const std::uint64_t> row_words(std::size_t mu) const noexcept {
        return {words_.data() + mu * wpr_, wpr_};
    }

    int entry(std::size_t mu, std::size_t i) const noexcept {
        return ((words_[mu * wpr_ + i / kWordBits] >> (i % kWordBits)) & 1U) ? 1 : -1;
    }

    SpinState row(std::size_t mu) const;

    /// Exact integer overlap (ξ^(mu), σ) = n1 - 2 hamming.
    std::int64_t overlap(std::size_t mu, const SpinState& sigma) const;

    friend bool operator==(const PatternMatrix&, const PatternMatrix&) = default;

private:
    std::size_t n1_ = 0;
    std::size_t n2_ = 0;
    std::size_t wpr_ = 0;
    std::uint64_t seed_ = 0;
    std::vector<std::uint64_t> words_;
};

/// F_J σ: entries in J negated.
SpinState flip(const SpinState& sigma, const FlipSet& J);

std::size_t hamming(const SpinState& a, const SpinState& b);

/// Hamming distance between two packed rows of equal length.
std::size_t hamming_words(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) noexcept;

/// Binary format: "PSPN", version byte 0x01, little-endian u64 n1, n2, seed,
/// then n2 rows of ceil(n1/64) little-endian u64 words.
void save_patterns(const PatternMatrix& matrix, const std::filesystem::path& path);
PatternMatrix load_patterns(const std::filesystem::path& path);

} // namespace pspin
