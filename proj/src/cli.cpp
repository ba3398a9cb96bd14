#include "pspin/cli.hpp"

#include "pspin/config.hpp"
#include "pspin/dynamics.hpp"
#include "pspin/energy.hpp"
#include "pspin/errors.hpp"
#include "pspin/experiments.hpp"
#include "pspin/landscape.hpp"
#include "pspin/parallel.hpp"
#include "pspin/patterns.hpp"
#include "pspin/priors.hpp"
#include "pspin/verify_suite.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace pspin::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string iso_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Collects outputs of one run and writes manifest.json beside them.
class Run {
public:
    Run(std::string command, fs::path dir) : command_(std::move(command)), dir_(std::move(dir)), started_(iso_now()) {
        fs::create_directories(dir_);
    }

    json& params() { return params_; }

    void write(const std::string& name, const std::string& content) {
        std::ofstream f(dir_ / name, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + (dir_ / name).string());
        f << content;
        outputs_.push_back(name);
    }

    void add_existing(const std::string& name) { outputs_.push_back(name); }

    void warn(const std::string& message) { warnings_.push_back(message); }

    void finish(std::uint64_t seed) {
        json m;
        m["command"] = command_;
        m["config_digest"] = digest_hex(params_.dump());
        m["master_seed"] = seed;
        m["version"] = PSPIN_VERSION;
        m["started_at"] = started_;
        m["finished_at"] = iso_now();
        m["outputs"] = outputs_;
        m["parameters"] = params_;
        if (!warnings_.empty()) m["warnings"] = warnings_;
        std::ofstream f(dir_ / "manifest.json");
        f << m.dump(2) << '\n';
    }

    const fs::path& dir() const { return dir_; }

private:
    std::string command_;
    fs::path dir_;
    std::string started_;
    json params_ = json::object();
    std::vector<std::string> outputs_;
    std::vector<std::string> warnings_;
};

struct Common {
    std::uint64_t seed = 0;
    std::size_t threads = 1;
    std::string out = ".";
};

std::uint64_t env_seed() {
    const char* v = std::getenv("PSPIN_SEED");
    if (!v || !*v) return 0;
    char* end = nullptr;
    const unsigned long long s = std::strtoull(v, &end, 10);
    if (*end != '\0') throw CLI::ValidationError("PSPIN_SEED", "must be a non-negative integer");
    return s;
}

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--seed", c.seed, "Master seed (default: $PSPIN_SEED or 0)");
    sub->add_option("--threads", c.threads, "Worker threads (default: all cores)")->check(CLI::PositiveNumber);
    sub->add_option("--out", c.out, "Output directory");
}

struct PatternSource {
    std::string file;
    std::size_t n1 = 0;
    std::size_t n2 = 0;
    double alpha = -1.0;
    double p = 2.0;
};

void add_patterns(CLI::App* sub, PatternSource& s) {
    sub->add_option("--patterns", s.file, "Pattern file written by gen-patterns");
    sub->add_option("--n1", s.n1, "Visible units");
    sub->add_option("--n2", s.n2, "Hidden units (patterns)");
    sub->add_option("--alpha", s.alpha, "Load; sets n2 = round(alpha n1^(p_plus/2))");
    sub->add_option("--p", s.p, "Energy exponent");
}

PatternMatrix resolve_patterns(const PatternSource& s, std::uint64_t seed, json& params) {
    params["p"] = s.p;
    if (!s.file.empty()) {
        PatternMatrix xi = load_patterns(s.file);
        params["patterns"] = s.file;
        params["n1"] = xi.n1();
        params["n2"] = xi.n2();
        return xi;
    }
    if (s.n1 == 0) throw CLI::ValidationError("--n1", "required unless --patterns is given");
    std::size_t n2 = s.n2;
    if (s.alpha >= 0.0) n2 = s.alpha == 0.0 ? 1 : hidden_units_for_load(s.alpha, s.n1, exponents(s.p));
    if (n2 == 0) throw CLI::ValidationError("--n2", "need n2 >= 1 (give --n2 or a larger --alpha)");
    params["n1"] = s.n1;
    params["n2"] = n2;
    return PatternMatrix::generate(s.n1, n2, seed);
}

struct PolicyOptions {
    std::string rule = "first_improvement";
    std::string order = "random_permutation";
    std::size_t max_sweeps = 10000;
    std::string convention = "strict";
};

void add_policy(CLI::App* sub, PolicyOptions& o) {
    sub->add_option("--rule", o.rule)->check(CLI::IsMember({"first_improvement", "steepest"}));
    sub->add_option("--order", o.order)->check(CLI::IsMember({"random_permutation", "fixed"}));
    sub->add_option("--max-sweeps", o.max_sweeps)->check(CLI::PositiveNumber);
    sub->add_option("--convention", o.convention)->check(CLI::IsMember({"strict", "weak"}));
}

DescentPolicy make_policy(const PolicyOptions& o, json& params) {
    DescentPolicy p;
    p.rule = o.rule == "steepest" ? DescentRule::steepest : DescentRule::first_improvement;
    p.order = o.order == "fixed" ? SweepOrder::fixed : SweepOrder::random_permutation;
    p.max_sweeps = o.max_sweeps;
    p.convention = o.convention == "weak" ? MinimumConvention::weak : MinimumConvention::strict;
    params["rule"] = o.rule;
    params["order"] = o.order;
    params["max_sweeps"] = o.max_sweeps;
    params["convention"] = o.convention;
    return p;
}

json sweep_params(const SweepConfig& c) {
    json j;
    j["p"] = c.p_values;
    j["alpha"] = c.alpha_values;
    j["n1"] = c.n1_values;
    j["r"] = c.r;
    j["trials"] = c.trials;
    j["seed"] = c.master_seed;
    j["rule"] = c.policy.rule == DescentRule::steepest ? "steepest" : "first_improvement";
    j["order"] = c.policy.order == SweepOrder::fixed ? "fixed" : "random_permutation";
    j["max_sweeps"] = c.policy.max_sweeps;
    if (c.policy.tie_epsilon) j["tie_epsilon"] = *c.policy.tie_epsilon;
    j["convention"] = c.policy.convention == MinimumConvention::weak ? "weak" : "strict";
    j["radii"] = c.radius_fractions;
    j["scan"] = c.scan_mode.kind == ScanMode::Kind::exhaustive ? "exhaustive" : "sampled";
    j["samples"] = c.scan_mode.samples;
    return j;
}

struct SweepOverrides {
    std::string config;
    std::size_t trials = 0;
};

SweepConfig load_sweep(const SweepOverrides& o, const Common& c, const CLI::App* sub) {
    const Config file = Config::load(o.config);
    SweepConfig s = sweep_config_from(file);
    if (sub->count("--seed") || !file.has("seed")) s.master_seed = c.seed;
    if (sub->count("--trials")) s.trials = o.trials;
    if (sub->count("--threads") || !file.has("threads")) s.threads = c.threads;
    try {
        s.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("invalid sweep config: ") + e.what());
    }
    return s;
}

std::string json_number(double v) { return std::isfinite(v) ? format_real(v) : "null"; }

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Simulator for p-spin associative memory landscapes", "pspin"};
    app.require_subcommand(1);
    app.set_version_flag("--version", PSPIN_VERSION);

    Common common;
    PatternSource source;
    PolicyOptions policy_opts;
    SweepOverrides sweep_opts;

    auto* gen = app.add_subcommand("gen-patterns", "Generate a pattern matrix");
    add_common(gen, common);
    gen->add_option("--n1", source.n1)->required();
    gen->add_option("--n2", source.n2);
    gen->add_option("--alpha", source.alpha);
    gen->add_option("--p", source.p);

    std::string state_text;
    std::size_t pattern_index = 0;
    auto* energy = app.add_subcommand("energy", "Energy of a configuration");
    add_common(energy, common);
    add_patterns(energy, source);
    energy->add_option("--state", state_text, "Configuration as a string of + and -");
    energy->add_option("--pattern", pattern_index, "Use pattern row as the configuration");

    double r = 0.1;
    auto* desc = app.add_subcommand("descend", "Greedy flip descent from a perturbed pattern");
    add_common(desc, common);
    add_patterns(desc, source);
    add_policy(desc, policy_opts);
    desc->add_option("--r", r, "Fraction of flipped spins")->check(CLI::Range(0.0, 0.5));
    desc->add_option("--pattern", pattern_index, "Pattern to perturb");

    std::vector<std::size_t> radii;
    std::string mode = "exhaustive";
    std::size_t samples = 1000;
    auto* scan = app.add_subcommand("scan", "Barrier profile around a pattern");
    add_common(scan, common);
    add_patterns(scan, source);
    scan->add_option("--pattern", pattern_index, "Pattern index");
    scan->add_option("--radii", radii, "Radii (number of flips)")->delimiter(',');
    scan->add_option("--mode", mode)->check(CLI::IsMember({"exhaustive", "sampled"}));
    scan->add_option("--samples", samples)->check(CLI::PositiveNumber);
    scan->add_option("--config", sweep_opts.config, "Barrier experiment config (runs every cell)");
    scan->add_option("--trials", sweep_opts.trials);

    auto* sweep = app.add_subcommand("sweep", "Retrieval sweep over (p, alpha, n1) cells");
    add_common(sweep, common);
    sweep->add_option("--config", sweep_opts.config)->required();
    sweep->add_option("--trials", sweep_opts.trials);

    auto* probe = app.add_subcommand("probe", "Non-retrieval probe from the patterns");
    add_common(probe, common);
    probe->add_option("--config", sweep_opts.config)->required();
    probe->add_option("--trials", sweep_opts.trials);

    std::string family = "gaussian";
    double prior_p = 0.0;
    std::vector<double> psi_orders;
    auto* prior = app.add_subcommand("prior", "Cumulant growth and Orlicz norms of a hidden prior");
    add_common(prior, common);
    prior->add_option("--family", family, "gaussian | rademacher | stretched_exp:<q> | mix:<w>");
    prior->add_option("--p", prior_p, "Growth exponent (default: conjugate of the tail exponent)");
    prior->add_option("--psi", psi_orders, "Orlicz orders r to evaluate")->delimiter(',');

    auto* verify = app.add_subcommand("verify", "Run the invariant suite");
    add_common(verify, common);

    try {
        common.seed = env_seed();
        common.threads = default_threads();
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    try {
        if (gen->parsed()) {
            Run run("gen-patterns", common.out);
            const PatternMatrix xi = resolve_patterns(source, common.seed, run.params());
            save_patterns(xi, run.dir() / "patterns.bin");
            run.add_existing("patterns.bin");
            run.params()["seed"] = common.seed;
            run.finish(common.seed);
            out << "wrote " << xi.n2() << " x " << xi.n1() << " patterns\n";
        } else if (energy->parsed()) {
            Run run("energy", common.out);
            const PatternMatrix xi = resolve_patterns(source, common.seed, run.params());
            const ExponentSet ex = exponents(source.p);
            SpinState sigma;
            if (!state_text.empty()) {
                sigma = SpinState::parse(state_text);
                run.params()["state"] = state_text;
            } else {
                if (pattern_index >= xi.n2()) throw CLI::ValidationError("--pattern", "index out of range");
                sigma = xi.row(pattern_index);
                run.params()["pattern"] = pattern_index;
            }
            const double h = energy_full(sigma, xi, ex);
            json j{{"energy", h}, {"n1", xi.n1()}, {"n2", xi.n2()}, {"p", ex.p}, {"kappa", ex.kappa}};
            run.write("energy.json", j.dump(2) + "\n");
            run.params()["seed"] = common.seed;
            run.finish(common.seed);
            out << format_real(h) << '\n';
        } else if (desc->parsed()) {
            Run run("descend", common.out);
            const PatternMatrix xi = resolve_patterns(source, common.seed, run.params());
            const ExponentSet ex = exponents(source.p);
            const DescentPolicy policy = make_policy(policy_opts, run.params());
            if (pattern_index >= xi.n2()) throw CLI::ValidationError("--pattern", "index out of range");
            Rng rng(stream_key(common.seed, 1));
            const SpinState target = xi.row(pattern_index);
            const SpinState start = perturb(target, r, rng);
            const DescentResult d = descend(start, xi, ex, policy, rng);
            std::size_t best = xi.n1(), best_mu = 0;
            for (std::size_t mu = 0; mu < xi.n2(); ++mu) {
                const std::size_t h = hamming(d.endpoint, xi.row(mu));
                const std::size_t dist = std::min(h, xi.n1() - h);
                if (dist < best) best = dist, best_mu = mu;
            }
            json j{{"init_dist", hamming(start, target)},
                   {"final_dist", best},
                   {"nearest_mu", best_mu},
                   {"flips", d.flips},
                   {"sweeps", d.sweeps},
                   {"converged", d.converged},
                   {"stop", to_string(d.stop)},
                   {"start_energy", d.energy_trace.front()},
                   {"endpoint_energy", energy_full(d.endpoint, xi, ex)},
                   {"pattern_energy", energy_full(target, xi, ex)},
                   {"endpoint", d.endpoint.to_string()}};
            run.params()["r"] = r;
            run.params()["pattern"] = pattern_index;
            run.params()["seed"] = common.seed;
            run.write("descent.json", j.dump(2) + "\n");
            run.finish(common.seed);
            out << "final_dist " << best << " flips " << d.flips << " stop " << to_string(d.stop) << '\n';
        } else if (scan->parsed()) {
            Run run("scan", common.out);
            if (!sweep_opts.config.empty()) {
                const SweepConfig cfg = load_sweep(sweep_opts, common, scan);
                run.params() = sweep_params(cfg);
                const auto records = barrier_profile_experiment(cfg);
                std::ostringstream csv;
                write_barrier_experiment_csv(csv, records);
                run.write("barrier_experiment.csv", csv.str());
                run.finish(cfg.master_seed);
                out << "wrote " << records.size() << " barrier profiles\n";
            } else {
                const PatternMatrix xi = resolve_patterns(source, common.seed, run.params());
                const ExponentSet ex = exponents(source.p);
                if (radii.empty())
                    for (std::size_t n = 0; n <= xi.n1() / 2; ++n) radii.push_back(n);
                const ScanMode m = mode == "exhaustive" ? ScanMode::exhaustive() : ScanMode::sampled(samples);
                const BarrierProfile prof =
                    barrier_profile(pattern_index, radii, xi, ex, m, common.seed, common.threads);
                std::ostringstream csv;
                write_barrier_csv(csv, std::span<const BarrierProfile>(&prof, 1));
                run.params()["radii"] = radii;
                run.params()["mode"] = mode;
                run.params()["samples"] = samples;
                run.params()["pattern"] = pattern_index;
                run.params()["seed"] = common.seed;
                run.write("barrier.csv", csv.str());
                run.finish(common.seed);
                out << "scanned " << radii.size() << " radii\n";
            }
        } else if (sweep->parsed() || probe->parsed()) {
            const bool is_probe = probe->parsed();
            CLI::App* sub = is_probe ? probe : sweep;
            Run run(is_probe ? "probe" : "sweep", common.out);
            const SweepConfig cfg = load_sweep(sweep_opts, common, sub);
            run.params() = sweep_params(cfg);
            const SweepResult res = is_probe ? non_retrieval_probe(cfg) : retrieval_sweep(cfg);
            for (const auto& w : res.warnings)
                run.warn("p=" + format_real(w.p) + " alpha=" + format_real(w.alpha) + " n1=" + std::to_string(w.n1) +
                         " trial=" + std::to_string(w.trial) + ": " + w.message);
            std::ostringstream csv;
            write_trial_csv(csv, res.records);
            run.write(is_probe ? "probe.csv" : "sweep.csv", csv.str());
            if (is_probe) {
                std::ostringstream sum;
                sum << "p,alpha,n1,n2,trials,escaped_fraction\n";
                for (const auto& s : summarize_probe(res.records, cfg.r))
                    sum << format_real(s.p) << ',' << format_real(s.alpha) << ',' << s.n1 << ',' << s.n2 << ','
                        << s.trials << ',' << format_real(s.escaped_fraction) << '\n';
                run.write("probe_summary.csv", sum.str());
            }
            run.finish(cfg.master_seed);
            if (!res.warnings.empty()) err << res.warnings.size() << " trials skipped (see manifest warnings)\n";
            out << "wrote " << res.records.size() << " records\n";
        } else if (prior->parsed()) {
            Run run("prior", common.out);
            PriorSpec spec;
            try {
                spec = parse_prior(family);
            } catch (const DomainError& e) {
                throw CLI::ValidationError("--family", e.what());
            }
            double p = prior_p;
            if (p == 0.0) {
                const double q = spec.tail_exponent();
                p = std::isinf(q) ? 1.0 : q / (q - 1.0);
            }
            const CumulantReport rep = growth_ratio(spec, p);
            std::ostringstream csv;
            write_cumulant_csv(csv, rep);
            run.write("cumulant.csv", csv.str());
            json norms = json::object();
            for (double order : psi_orders) {
                try {
                    norms[format_real(order)] = psi_norm(spec, order);
                } catch (const DomainError&) {
                    norms[format_real(order)] = nullptr;
                }
            }
            json j{{"family", spec.label()},
                   {"p", p},
                   {"limit_estimate", rep.limit_estimate},
                   {"converged", rep.converged},
                   {"psi_norms", norms}};
            run.write("prior.json", j.dump(2) + "\n");
            run.params()["family"] = spec.label();
            run.params()["p"] = p;
            run.params()["psi"] = psi_orders;
            run.finish(common.seed);
            out << "limit_estimate " << json_number(rep.limit_estimate) << (rep.converged ? " converged" : " not converged")
                << '\n';
        } else if (verify->parsed()) {
            Run run("verify", common.out);
            run.params()["seed"] = common.seed;
            const auto results = run_verification_suite(common.seed, common.threads);
            run.write("verify.json", report_json(results) + "\n");
            run.finish(common.seed);
            for (const auto& r : results)
                out << to_string(r.status) << ' ' << r.name << " margin=" << json_number(r.worst_margin)
                    << (r.location.empty() ? "" : " at " + r.location) << '\n';
            const bool ok = suite_passed(results);
            out << (ok ? "verify: ok\n" : "verify: FAILED\n");
            return ok ? kExitOk : kExitFailure;
        }
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const BudgetError& e) {
        err << "budget exceeded: " << e.what() << '\n';
        return kExitBudget;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitOk;
}

} // namespace pspin::cli
