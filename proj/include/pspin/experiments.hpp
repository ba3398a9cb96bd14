#pragma once

#include "pspin/dynamics.hpp"
#include "pspin/landscape.hpp"
#include "pspin/model.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace pspin {

/// Cartesian product p x alpha x n1 of Monte Carlo cells.
struct SweepConfig {
    std::vector<double> p_values;
    std::vector<double> alpha_values;
    std::vector<std::size_t> n1_values;
    /// Perturbation fraction for retrieval, distance threshold for probes.
    double r = 0.1;
    /// Default sized so an acceptance cell runs in seconds on one core.
    std::size_t trials = 50;
    std::uint64_t master_seed = 0;
    DescentPolicy policy;
    std::size_t threads = 1;
    /// Barrier experiments: radii as fractions of n1, and the scan mode.
    std::vector<double> radius_fractions;
    ScanMode scan_mode = ScanMode::sampled(1000);

    void validate() const;
};

struct Cell {
    std::size_t index = 0;
    ExponentSet ex;
    double alpha = 0.0;
    std::size_t n1 = 0;
    /// round(alpha n1^(p_plus/2)); alpha = 0 selects the single-pattern control n2 = 1.
    std::size_t n2 = 0;
    bool valid = false;
};

/// Cells in (p, alpha, n1) lexicographic order.
std::vector<Cell> sweep_cells(const SweepConfig& config);

struct TrialRecord {
    double p = 0.0;
    double q = 0.0;
    double alpha = 0.0;
    std::size_t n1 = 0;
    std::size_t n2 = 0;
    double r = 0.0;
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    std::size_t init_dist = 0;
    /// min over mu of min(hamming, n1 - hamming).
    std::size_t final_dist = 0;
    std::size_t nearest_mu = 0;
    std::size_t flips = 0;
    bool converged = false;
    double endpoint_energy = 0.0;
    double pattern_energy = 0.0;
    bool cond_theorem1 = false;
    bool cond_theorem2 = false;
    /// min(hamming, n1 - hamming) to the first pattern; not serialized.
    std::size_t target_dist = 0;
};

/// A skipped (cell, trial) pair.
struct SweepWarning {
    double p = 0.0;
    double alpha = 0.0;
    std::size_t n1 = 0;
    std::size_t trial = 0;
    std::string message;
};

struct SweepResult {
    std::vector<TrialRecord> records;
    std::vector<SweepWarning> warnings;
};

/// Large-load retrieval condition at fraction r: always for p > 2, never
/// for p < 2, and for p = 2 r < 3/8 with alpha < min(sqrt(r/(1-r))/3, sqrt(r)/(25 S(r))).
bool retrieval_condition(double p, double alpha, double r);

/// Non-retrieval condition: p <= 2 and alpha >= S(r) (S(r)/(1-2r)^2 when p = 2).
bool non_retrieval_condition(double p, double alpha, double r);

/// Each trial draws fresh patterns and descends from perturb(ξ^1, r). Trial
/// t of cell c uses the key stream_key(master_seed, c, t).
SweepResult retrieval_sweep(const SweepConfig& config);

/// As retrieval_sweep but every descent starts at ξ^1 (init_dist 0). Needs p in (1, 2].
SweepResult non_retrieval_probe(const SweepConfig& config);

struct ProbeSummary {
    double p = 0.0;
    double alpha = 0.0;
    std::size_t n1 = 0;
    std::size_t n2 = 0;
    std::size_t trials = 0;
    /// Fraction of trials with final_dist >= floor(r n1).
    double escaped_fraction = 0.0;
};

std::vector<ProbeSummary> summarize_probe(std::span<const TrialRecord> records, double r);

struct BarrierRecord {
    double p = 0.0;
    double alpha = 0.0;
    std::size_t n1 = 0;
    std::size_t n2 = 0;
    std::size_t trial = 0;
    BarrierProfile profile;
};

/// One profile around ξ^1 per trial, at radii round(f n1) for each fraction f.
std::vector<BarrierRecord> barrier_profile_experiment(const SweepConfig& config);

/// Header: p,q,alpha,n1,n2,r,trial,seed,init_dist,final_dist,nearest_mu,flips,
/// converged,endpoint_energy,pattern_energy,cond_theorem1,cond_theorem2
void write_trial_csv(std::ostream& out, std::span<const TrialRecord> records);

/// Header: p,alpha,n1,n2,trial,mu,radius,min_gap,mode,samples,seed,threshold_t
/// (threshold_t empty where undefined).
void write_barrier_experiment_csv(std::ostream& out, std::span<const BarrierRecord> records);

/// Shortest notation that reads back to the same double (%.17g).
std::string format_real(double v);

} // namespace pspin
