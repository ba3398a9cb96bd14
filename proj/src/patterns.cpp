#include "pspin/patterns.hpp"

#include "pspin/errors.hpp"
#include "pspin/rng.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <fstream>

namespace pspin {

namespace {

std::uint64_t tail_mask(std::size_t n) noexcept {
    const std::size_t rem = n % kWordBits;
    return rem == 0 ? ~std::uint64_t{0} : (std::uint64_t{1} << rem) - 1;
}

void check_index(std::size_t i, std::size_t n1) {
    if (i >= n1) throw DomainError("site index " + std::to_string(i) + " out of range for n1=" + std::to_string(n1));
}

} // namespace

SpinState::SpinState(std::size_t n1) : n1_(n1), words_(words_for(n1), 0) {}

SpinState SpinState::from_values(std::span<const int> values) {
    SpinState s(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) s.set(i, values[i]);
    return s;
}

SpinState SpinState::parse(std::string_view text) {
    SpinState s(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '+') s.set(i, 1);
        else if (text[i] != '-') throw DomainError("spin string may only contain '+' and '-'");
    }
    return s;
}

SpinState SpinState::random(std::size_t n1, Rng& rng) {
    SpinState s(n1);
    for (auto& w : s.words_) w = rng.next();
    if (!s.words_.empty()) s.words_.back() &= tail_mask(n1);
    return s;
}

void SpinState::set(std::size_t i, int value) {
    check_index(i, n1_);
    if (value != 1 && value != -1) throw DomainError("spin values must be +1 or -1");
    const std::uint64_t bit = std::uint64_t{1} << (i % kWordBits);
    if (value == 1) words_[i / kWordBits] |= bit;
    else words_[i / kWordBits] &= ~bit;
}

void SpinState::flip(std::size_t i) {
    check_index(i, n1_);
    words_[i / kWordBits] ^= std::uint64_t{1} << (i % kWordBits);
}

SpinState SpinState::negated() const {
    SpinState s = *this;
    for (auto& w : s.words_) w = ~w;
    if (!s.words_.empty()) s.words_.back() &= tail_mask(n1_);
    return s;
}

std::vector<int> SpinState::values() const {
    std::vector<int> out(n1_);
    for (std::size_t i = 0; i < n1_; ++i) out[i] = (*this)[i];
    return out;
}

std::string SpinState::to_string() const {
    std::string out(n1_, '-');
    for (std::size_t i = 0; i < n1_; ++i)
        if ((*this)[i] > 0) out[i] = '+';
    return out;
}

FlipSet::FlipSet(std::vector<std::size_t> indices) : indices_(std::move(indices)) {
    std::sort(indices_.begin(), indices_.end());
    if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end())
        throw DomainError("flip set contains duplicate indices");
}

bool FlipSet::contains(std::size_t i) const noexcept {
    return std::binary_search(indices_.begin(), indices_.end(), i);
}

std::vector<std::uint64_t> FlipSet::mask(std::size_t n1) const {
    std::vector<std::uint64_t> m(words_for(n1), 0);
    for (std::size_t i : indices_) {
        check_index(i, n1);
        m[i / kWordBits] |= std::uint64_t{1} << (i % kWordBits);
    }
    return m;
}

PatternMatrix PatternMatrix::generate(std::size_t n1, std::size_t n2, std::uint64_t seed) {
    if (n1 == 0 || n2 == 0) throw DomainError("pattern dimensions must be positive");
    PatternMatrix m;
    m.n1_ = n1;
    m.n2_ = n2;
    m.wpr_ = words_for(n1);
    m.seed_ = seed;
    m.words_.resize(n2 * m.wpr_);
    const std::uint64_t last = tail_mask(n1);
    for (std::size_t mu = 0; mu < n2; ++mu) {
        Rng rng = Rng::stream(seed, mu);
        std::uint64_t* row = m.words_.data() + mu * m.wpr_;
        for (std::size_t w = 0; w < m.wpr_; ++w) row[w] = rng.next();
        row[m.wpr_ - 1] &= last;
    }
    return m;
}

PatternMatrix PatternMatrix::from_rows(std::span<const SpinState> rows, std::uint64_t seed) {
    if (rows.empty() || rows.front().size() == 0) throw DomainError("pattern dimensions must be positive");
    PatternMatrix m;
    m.n1_ = rows.front().size();
    m.n2_ = rows.size();
    m.wpr_ = words_for(m.n1_);
    m.seed_ = seed;
    m.words_.reserve(m.n2_ * m.wpr_);
    for (const auto& r : rows) {
        if (r.size() != m.n1_) throw DomainError("pattern rows must have equal length");
        m.words_.insert(m.words_.end(), r.words().begin(), r.words().end());
    }
    return m;
}

SpinState PatternMatrix::row(std::size_t mu) const {
    if (mu >= n2_) throw DomainError("pattern index out of range");
    SpinState s(n1_);
    auto src = row_words(mu);
    std::copy(src.begin(), src.end(), s.words_.begin());
    return s;
}

std::int64_t PatternMatrix::overlap(std::size_t mu, const SpinState& sigma) const {
    if (sigma.size() != n1_) throw DomainError("state length does not match pattern length");
    if (mu >= n2_) throw DomainError("pattern index out of range");
    const auto d = hamming_words(row_words(mu), sigma.words());
    return static_cast<std::int64_t>(n1_) - 2 * static_cast<std::int64_t>(d);
}

SpinState flip(const SpinState& sigma, const FlipSet& J) {
    SpinState out = sigma;
    for (std::size_t i : J.indices()) out.flip(i);
    return out;
}

std::size_t hamming_words(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) noexcept {
    std::size_t d = 0;
    for (std::size_t w = 0; w < a.size(); ++w) d += static_cast<std::size_t>(std::popcount(a[w] ^ b[w]));
    return d;
}

std::size_t hamming(const SpinState& a, const SpinState& b) {
    if (a.size() != b.size()) throw DomainError("hamming: length mismatch");
    return hamming_words(a.words(), b.words());
}

namespace {

constexpr std::array<char, 4> kMagic{'P', 'S', 'P', 'N'};
constexpr unsigned char kVersion = 0x01;

void put_u64(std::ostream& out, std::uint64_t v) {
    std::array<char, 8> b{};
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(b.data(), 8);
}

std::uint64_t get_u64(std::istream& in, const char* what) {
    std::array<unsigned char, 8> b{};
    in.read(reinterpret_cast<char*>(b.data()), 8);
    if (in.gcount() != 8) throw PatternIoError(PatternIoErrc::truncated, std::string("truncated pattern file while reading ") + what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

} // namespace

void save_patterns(const PatternMatrix& matrix, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw PatternIoError(PatternIoErrc::io_failure, "cannot open " + path.string() + " for writing");
    out.write(kMagic.data(), kMagic.size());
    out.put(static_cast<char>(kVersion));
    put_u64(out, matrix.n1());
    put_u64(out, matrix.n2());
    put_u64(out, matrix.seed());
    for (std::size_t mu = 0; mu < matrix.n2(); ++mu)
        for (std::uint64_t w : matrix.row_words(mu)) put_u64(out, w);
    out.flush();
    if (!out) throw PatternIoError(PatternIoErrc::io_failure, "write failed for " + path.string());
}

PatternMatrix load_patterns(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PatternIoError(PatternIoErrc::io_failure, "cannot open " + path.string());
    std::array<char, 4> magic{};
    in.read(magic.data(), magic.size());
    if (in.gcount() != 4) throw PatternIoError(PatternIoErrc::truncated, "truncated pattern header");
    if (magic != kMagic) throw PatternIoError(PatternIoErrc::bad_magic, "not a pattern file (bad magic)");
    const int version = in.get();
    if (version == std::char_traits<char>::eof()) throw PatternIoError(PatternIoErrc::truncated, "truncated pattern header");
    if (version != kVersion) throw PatternIoError(PatternIoErrc::bad_version, "unsupported pattern file version " + std::to_string(version));
    const std::uint64_t n1 = get_u64(in, "n1");
    const std::uint64_t n2 = get_u64(in, "n2");
    const std::uint64_t seed = get_u64(in, "seed");
    if (n1 == 0 || n2 == 0) throw PatternIoError(PatternIoErrc::invalid_payload, "pattern file has zero dimension");

    std::vector<SpinState> rows;
    rows.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(n2, 1u << 20)));
    const std::uint64_t last = tail_mask(n1);
    for (std::uint64_t mu = 0; mu < n2; ++mu) {
        SpinState s(n1);
        for (std::size_t w = 0; w < words_for(n1); ++w) {
            const std::uint64_t word = get_u64(in, "row data");
            if (w + 1 == words_for(n1) && (word & ~last) != 0)
                throw PatternIoError(PatternIoErrc::invalid_payload, "nonzero padding bits in row " + std::to_string(mu));
            for (std::size_t b = 0; b < kWordBits; ++b) {
                const std::size_t i = w * kWordBits + b;
                if (i >= n1) break;
                if ((word >> b) & 1U) s.set(i, 1);
            }
        }
        rows.push_back(std::move(s));
    }
    return PatternMatrix::from_rows(rows, seed);
}

} // namespace pspin
