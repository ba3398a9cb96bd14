#pragma once

#include "pspin/experiments.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace pspin {

/// Value of a `key = value` line: a number, a quoted string or a flat
/// array of numbers.
using ConfigValue = std::variant<double, std::string, std::vector<double>>;

/// Flat key-value configuration in a TOML subset:
///
///     # comment
///     p = [3.0, 1.5]
///     alpha = 0.1
///     rule = "steepest"
///
/// Keys are bare words; duplicate keys and malformed lines raise ConfigError
/// with the line number.
class Config {
public:
    static Config parse(const std::string& text);
    static Config load(const std::string& path);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    const std::map<std::string, ConfigValue>& values() const { return values_; }

    double number(const std::string& key) const;
    std::size_t count(const std::string& key) const;
    std::string text(const std::string& key) const;
    /// A scalar number reads as a one-element list.
    std::vector<double> numbers(const std::string& key) const;

    void set(const std::string& key, ConfigValue value) { values_[key] = std::move(value); }

    /// Throws ConfigError naming the first key outside `allowed`.
    void require_known(const std::set<std::string>& allowed) const;

    /// Canonical JSON (sorted keys) of the parsed values.
    std::string canonical_json() const;

private:
    std::map<std::string, ConfigValue> values_;
};

/// FNV-1a 64-bit hash, rendered as 16 hex digits.
std::string digest_hex(const std::string& bytes);

/// Keys understood by sweep_config_from:
///   p | q          energy exponents, or hidden tail exponents converted to p
///   alpha, n1      load and size grids
///   r, trials, seed, threads
///   rule           "first_improvement" | "steepest"
///   order          "random_permutation" | "fixed"
///   max_sweeps, tie_epsilon
///   convention     "strict" | "weak"
///   radii          radius fractions for barrier scans
///   scan           "exhaustive" | "sampled"; samples
const std::set<std::string>& sweep_config_keys();

SweepConfig sweep_config_from(const Config& config);

} // namespace pspin
