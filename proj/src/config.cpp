#include "pspin/config.hpp"

#include "pspin/errors.hpp"

#include <json.hpp>

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace pspin {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
    throw ConfigError("config line " + std::to_string(line) + ": " + what);
}

std::optional<double> parse_number(const std::string& s) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (first != last && *first == '+') ++first;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last || !std::isfinite(v)) return std::nullopt;
    return v;
}

// Removes a trailing comment that is not inside a string.
std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

ConfigValue parse_value(const std::string& raw, std::size_t line) {
    const std::string v = trim(raw);
    if (v.empty()) fail(line, "missing value");
    if (v.front() == '"') {
        if (v.size() < 2 || v.back() != '"') fail(line, "unterminated string");
        const std::string inner = v.substr(1, v.size() - 2);
        if (inner.find('"') != std::string::npos) fail(line, "stray quote in string");
        return inner;
    }
    if (v.front() == '[') {
        if (v.back() != ']') fail(line, "unterminated array");
        std::vector<double> items;
        std::stringstream body(v.substr(1, v.size() - 2));
        std::string item;
        while (std::getline(body, item, ',')) {
            const std::string t = trim(item);
            if (t.empty()) {
                if (body.eof()) break; // trailing comma
                fail(line, "empty array element");
            }
            const auto n = parse_number(t);
            if (!n) fail(line, "array elements must be numbers, got '" + t + "'");
            items.push_back(*n);
        }
        return items;
    }
    const auto n = parse_number(v);
    if (!n) fail(line, "cannot parse value '" + v + "'");
    return *n;
}

} // namespace

Config Config::parse(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string body = trim(strip_comment(raw));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) fail(line, "expected key = value");
        const std::string key = trim(body.substr(0, eq));
        if (key.empty()) fail(line, "missing key");
        for (char c : key)
            if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'))
                fail(line, "invalid key '" + key + "'");
        if (cfg.values_.count(key)) fail(line, "duplicate key '" + key + "'");
        cfg.values_[key] = parse_value(body.substr(eq + 1), line);
    }
    return cfg;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

double Config::number(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing config key '" + key + "'");
    if (const auto* d = std::get_if<double>(&it->second)) return *d;
    throw ConfigError("config key '" + key + "' must be a number");
}

std::size_t Config::count(const std::string& key) const {
    const double v = number(key);
    if (!(v >= 0.0) || v != std::floor(v) || v > 9.0e15)
        throw ConfigError("config key '" + key + "' must be a non-negative integer");
    return static_cast<std::size_t>(v);
}

std::string Config::text(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing config key '" + key + "'");
    if (const auto* s = std::get_if<std::string>(&it->second)) return *s;
    throw ConfigError("config key '" + key + "' must be a string");
}

std::vector<double> Config::numbers(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing config key '" + key + "'");
    if (const auto* d = std::get_if<double>(&it->second)) return {*d};
    if (const auto* v = std::get_if<std::vector<double>>(&it->second)) return *v;
    throw ConfigError("config key '" + key + "' must be a number or an array of numbers");
}

void Config::require_known(const std::set<std::string>& allowed) const {
    for (const auto& [key, value] : values_)
        if (!allowed.count(key)) throw ConfigError("unknown config key '" + key + "'");
}

std::string Config::canonical_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [key, value] : values_) std::visit([&](const auto& v) { j[key] = v; }, value);
    return j.dump();
}

std::string digest_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

const std::set<std::string>& sweep_config_keys() {
    static const std::set<std::string> keys{"p",          "q",           "alpha",      "n1",      "r",
                                            "trials",     "seed",        "threads",    "rule",    "order",
                                            "max_sweeps", "tie_epsilon", "convention", "radii",   "scan",
                                            "samples"};
    return keys;
}

SweepConfig sweep_config_from(const Config& config) {
    config.require_known(sweep_config_keys());
    SweepConfig s;
    if (config.has("p") == config.has("q")) throw ConfigError("config needs exactly one of 'p' or 'q'");
    try {
        if (config.has("p")) {
            s.p_values = config.numbers("p");
        } else {
            for (double q : config.numbers("q")) s.p_values.push_back(exponents(q, Given::q).p);
        }
    } catch (const DomainError& e) {
        throw ConfigError(std::string("invalid exponent: ") + e.what());
    }
    s.alpha_values = config.numbers("alpha");
    for (double n : config.numbers("n1")) {
        if (!(n >= 1.0) || n != std::floor(n)) throw ConfigError("n1 values must be positive integers");
        s.n1_values.push_back(static_cast<std::size_t>(n));
    }
    if (config.has("r")) s.r = config.number("r");
    if (config.has("trials")) s.trials = config.count("trials");
    if (config.has("seed")) s.master_seed = config.count("seed");
    if (config.has("threads")) s.threads = config.count("threads");
    if (config.has("rule")) {
        const auto v = config.text("rule");
        if (v == "first_improvement") s.policy.rule = DescentRule::first_improvement;
        else if (v == "steepest") s.policy.rule = DescentRule::steepest;
        else throw ConfigError("rule must be \"first_improvement\" or \"steepest\"");
    }
    if (config.has("order")) {
        const auto v = config.text("order");
        if (v == "random_permutation") s.policy.order = SweepOrder::random_permutation;
        else if (v == "fixed") s.policy.order = SweepOrder::fixed;
        else throw ConfigError("order must be \"random_permutation\" or \"fixed\"");
    }
    if (config.has("max_sweeps")) s.policy.max_sweeps = config.count("max_sweeps");
    if (config.has("tie_epsilon")) s.policy.tie_epsilon = config.number("tie_epsilon");
    if (config.has("convention")) {
        const auto v = config.text("convention");
        if (v == "strict") s.policy.convention = MinimumConvention::strict;
        else if (v == "weak") s.policy.convention = MinimumConvention::weak;
        else throw ConfigError("convention must be \"strict\" or \"weak\"");
    }
    if (config.has("radii")) s.radius_fractions = config.numbers("radii");
    std::size_t samples = 1000;
    if (config.has("samples")) samples = config.count("samples");
    if (config.has("scan")) {
        const auto v = config.text("scan");
        if (v == "exhaustive") s.scan_mode = ScanMode::exhaustive();
        else if (v == "sampled") s.scan_mode = ScanMode::sampled(samples);
        else throw ConfigError("scan must be \"exhaustive\" or \"sampled\"");
    } else {
        s.scan_mode = ScanMode::sampled(samples);
    }
    try {
        s.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("invalid sweep config: ") + e.what());
    }
    return s;
}

} // namespace pspin
