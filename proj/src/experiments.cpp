#include "pspin/experiments.hpp"

#include "pspin/energy.hpp"
#include "pspin/errors.hpp"
#include "pspin/parallel.hpp"
#include "pspin/patterns.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <tuple>

namespace pspin {

void SweepConfig::validate() const {
    if (p_values.empty() || alpha_values.empty() || n1_values.empty())
        throw DomainError("sweep config needs at least one p, alpha and n1 value");
    for (double p : p_values) exponents(p);
    for (double a : alpha_values)
        if (!(a >= 0.0 && std::isfinite(a))) throw DomainError("alpha values must be finite and >= 0");
    for (std::size_t n : n1_values)
        if (n < 2) throw DomainError("n1 values must be >= 2");
    if (!(r >= 0.0 && r <= 0.5)) throw DomainError("r must lie in [0, 1/2]");
    if (trials == 0) throw DomainError("trials must be >= 1");
    for (double f : radius_fractions)
        if (!(f >= 0.0 && f <= 1.0)) throw DomainError("radius fractions must lie in [0, 1]");
    if (scan_mode.kind == ScanMode::Kind::sampled && scan_mode.samples == 0)
        throw DomainError("sampled scan mode needs k >= 1");
    policy.validate();
}

std::vector<Cell> sweep_cells(const SweepConfig& config) {
    config.validate();
    std::vector<Cell> cells;
    for (double p : config.p_values)
        for (double alpha : config.alpha_values)
            for (std::size_t n1 : config.n1_values) {
                Cell c;
                c.index = cells.size();
                c.ex = exponents(p);
                c.alpha = alpha;
                c.n1 = n1;
                c.n2 = alpha == 0.0 ? 1 : hidden_units_for_load(alpha, n1, c.ex);
                c.valid = c.n2 >= 1;
                cells.push_back(c);
            }
    return cells;
}

bool retrieval_condition(double p, double alpha, double r) {
    if (p > 2.0) return true;
    if (p < 2.0) return false;
    if (!(r > 0.0 && r < 3.0 / 8.0)) return false;
    const double limit = std::min(std::sqrt(r / (1.0 - r)) / 3.0, std::sqrt(r) / (25.0 * entropy(r)));
    return alpha < limit;
}

bool non_retrieval_condition(double p, double alpha, double r) {
    if (p > 2.0) return false;
    if (!(r >= 0.0 && r < 0.5)) return false;
    const double w = 1.0 - 2.0 * r;
    const double threshold = p == 2.0 ? entropy(r) / (w * w) : entropy(r);
    return alpha >= threshold;
}

namespace {

struct NearestPattern {
    std::size_t dist;
    std::size_t mu;
};

std::size_t symmetric_distance(std::size_t h, std::size_t n1) { return std::min(h, n1 - h); }

NearestPattern nearest(const SpinState& sigma, const PatternMatrix& xi) {
    NearestPattern best{std::numeric_limits<std::size_t>::max(), 0};
    for (std::size_t mu = 0; mu < xi.n2(); ++mu) {
        const std::size_t d = symmetric_distance(hamming_words(xi.row_words(mu), sigma.words()), xi.n1());
        if (d < best.dist) best = {d, mu};
    }
    return best;
}

enum class Start { perturbed, at_pattern };

SweepResult run_descents(const SweepConfig& config, Start start) {
    const auto cells = sweep_cells(config);
    SweepResult result;
    struct Job {
        const Cell* cell;
        std::size_t trial;
    };
    std::vector<Job> jobs;
    for (const auto& c : cells) {
        for (std::size_t t = 0; t < config.trials; ++t) {
            if (c.valid) {
                jobs.push_back({&c, t});
            } else {
                result.warnings.push_back({c.ex.p, c.alpha, c.n1, t,
                                           "alpha rounds to n2 = 0 hidden units at this n1; cell skipped"});
            }
        }
    }
    result.records.resize(jobs.size());
    parallel_for(jobs.size(), config.threads, [&](std::size_t j) {
        const Cell& c = *jobs[j].cell;
        const std::size_t trial = jobs[j].trial;
        const std::uint64_t seed = stream_key(config.master_seed, c.index, trial);
        const PatternMatrix xi = PatternMatrix::generate(c.n1, c.n2, seed);
        Rng rng(stream_key(seed, 1));
        const SpinState pattern = xi.row(0);
        const SpinState sigma0 = start == Start::perturbed ? perturb(pattern, config.r, rng) : pattern;
        const DescentResult d = descend(sigma0, xi, c.ex, config.policy, rng);
        const NearestPattern near = nearest(d.endpoint, xi);

        TrialRecord& rec = result.records[j];
        rec.p = c.ex.p;
        rec.q = c.ex.q;
        rec.alpha = c.alpha;
        rec.n1 = c.n1;
        rec.n2 = c.n2;
        rec.r = config.r;
        rec.trial = trial;
        rec.seed = seed;
        rec.init_dist = hamming(sigma0, pattern);
        rec.final_dist = near.dist;
        rec.nearest_mu = near.mu;
        rec.flips = d.flips;
        rec.converged = d.converged;
        rec.endpoint_energy = energy_full(d.endpoint, xi, c.ex);
        rec.pattern_energy = energy_full(pattern, xi, c.ex);
        rec.cond_theorem1 = retrieval_condition(c.ex.p, c.alpha, config.r);
        rec.cond_theorem2 = non_retrieval_condition(c.ex.p, c.alpha, config.r);
        rec.target_dist = symmetric_distance(hamming(d.endpoint, pattern), c.n1);
    });
    return result;
}

} // namespace

SweepResult retrieval_sweep(const SweepConfig& config) { return run_descents(config, Start::perturbed); }

SweepResult non_retrieval_probe(const SweepConfig& config) {
    for (double p : config.p_values)
        if (!(p > 1.0 && p <= 2.0)) throw DomainError("non_retrieval_probe: p must lie in (1, 2]");
    return run_descents(config, Start::at_pattern);
}

std::vector<ProbeSummary> summarize_probe(std::span<const TrialRecord> records, double r) {
    std::vector<ProbeSummary> out;
    std::map<std::tuple<double, double, std::size_t>, std::size_t> slot;
    std::vector<std::size_t> escaped;
    for (const auto& rec : records) {
        const auto key = std::make_tuple(rec.p, rec.alpha, rec.n1);
        auto it = slot.find(key);
        if (it == slot.end()) {
            it = slot.emplace(key, out.size()).first;
            out.push_back({rec.p, rec.alpha, rec.n1, rec.n2, 0, 0.0});
            escaped.push_back(0);
        }
        auto& s = out[it->second];
        ++s.trials;
        if (rec.final_dist >= flip_count(r, rec.n1)) ++escaped[it->second];
    }
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i].escaped_fraction = static_cast<double>(escaped[i]) / static_cast<double>(out[i].trials);
    return out;
}

std::vector<BarrierRecord> barrier_profile_experiment(const SweepConfig& config) {
    const auto cells = sweep_cells(config);
    struct Job {
        const Cell* cell;
        std::size_t trial;
    };
    std::vector<Job> jobs;
    for (const auto& c : cells)
        if (c.valid)
            for (std::size_t t = 0; t < config.trials; ++t) jobs.push_back({&c, t});

    std::vector<BarrierRecord> out(jobs.size());
    // Parallelism is across trials; each scan runs on one thread.
    parallel_for(jobs.size(), config.threads, [&](std::size_t j) {
        const Cell& c = *jobs[j].cell;
        const std::uint64_t seed = stream_key(config.master_seed, c.index, jobs[j].trial);
        const PatternMatrix xi = PatternMatrix::generate(c.n1, c.n2, seed);
        std::vector<std::size_t> radii;
        for (double f : config.radius_fractions)
            radii.push_back(static_cast<std::size_t>(std::llround(f * static_cast<double>(c.n1))));
        BarrierRecord& rec = out[j];
        rec.p = c.ex.p;
        rec.alpha = c.alpha;
        rec.n1 = c.n1;
        rec.n2 = c.n2;
        rec.trial = jobs[j].trial;
        rec.profile = barrier_profile(0, radii, xi, c.ex, config.scan_mode, stream_key(seed, 2), 1);
    });
    return out;
}

std::string format_real(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_trial_csv(std::ostream& out, std::span<const TrialRecord> records) {
    out << "p,q,alpha,n1,n2,r,trial,seed,init_dist,final_dist,nearest_mu,flips,converged,endpoint_energy,"
           "pattern_energy,cond_theorem1,cond_theorem2\n";
    for (const auto& r : records) {
        out << format_real(r.p) << ',' << format_real(r.q) << ',' << format_real(r.alpha) << ',' << r.n1 << ','
            << r.n2 << ',' << format_real(r.r) << ',' << r.trial << ',' << r.seed << ',' << r.init_dist << ','
            << r.final_dist << ',' << r.nearest_mu << ',' << r.flips << ',' << (r.converged ? 1 : 0) << ','
            << format_real(r.endpoint_energy) << ',' << format_real(r.pattern_energy) << ','
            << (r.cond_theorem1 ? 1 : 0) << ',' << (r.cond_theorem2 ? 1 : 0) << '\n';
    }
}

void write_barrier_experiment_csv(std::ostream& out, std::span<const BarrierRecord> records) {
    out << "p,alpha,n1,n2,trial,mu,radius,min_gap,mode,samples,seed,threshold_t\n";
    for (const auto& rec : records) {
        const auto& prof = rec.profile;
        const std::string mode = prof.mode.kind == ScanMode::Kind::exhaustive
                                     ? "exhaustive"
                                     : "sampled(" + std::to_string(prof.mode.samples) + ")";
        for (std::size_t i = 0; i < prof.radii.size(); ++i) {
            const double frac = static_cast<double>(prof.radii[i]) / static_cast<double>(rec.n1);
            std::string threshold;
            if (rec.p >= 2.0 && frac > 0.0 && frac <= 0.5) threshold = format_real(threshold_t(frac, rec.p));
            out << format_real(rec.p) << ',' << format_real(rec.alpha) << ',' << rec.n1 << ',' << rec.n2 << ','
                << rec.trial << ',' << prof.mu << ',' << prof.radii[i] << ',' << format_real(prof.min_gap[i]) << ','
                << mode << ',' << prof.samples[i] << ',' << prof.seed << ',' << threshold << '\n';
        }
    }
}

} // namespace pspin
