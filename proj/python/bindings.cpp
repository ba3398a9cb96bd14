#include "pspin/config.hpp"
#include "pspin/dynamics.hpp"
#include "pspin/energy.hpp"
#include "pspin/errors.hpp"
#include "pspin/experiments.hpp"
#include "pspin/landscape.hpp"
#include "pspin/model.hpp"
#include "pspin/patterns.hpp"
#include "pspin/priors.hpp"
#include "pspin/stats.hpp"
#include "pspin/verify_suite.hpp"

#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace pspin;

namespace {

SpinState state_of(const std::vector<int>& values) { return SpinState::from_values(values); }

DescentPolicy make_policy(const std::string& rule, const std::string& order, std::size_t max_sweeps,
                          const std::string& convention) {
    DescentPolicy p;
    if (rule == "steepest") p.rule = DescentRule::steepest;
    else if (rule != "first_improvement") throw DomainError("rule must be first_improvement or steepest");
    if (order == "fixed") p.order = SweepOrder::fixed;
    else if (order != "random_permutation") throw DomainError("order must be random_permutation or fixed");
    if (convention == "weak") p.convention = MinimumConvention::weak;
    else if (convention != "strict") throw DomainError("convention must be strict or weak");
    p.max_sweeps = max_sweeps;
    p.validate();
    return p;
}

py::dict record_dict(const TrialRecord& r) {
    py::dict d;
    d["p"] = r.p;
    d["q"] = r.q;
    d["alpha"] = r.alpha;
    d["n1"] = r.n1;
    d["n2"] = r.n2;
    d["r"] = r.r;
    d["trial"] = r.trial;
    d["seed"] = r.seed;
    d["init_dist"] = r.init_dist;
    d["final_dist"] = r.final_dist;
    d["nearest_mu"] = r.nearest_mu;
    d["flips"] = r.flips;
    d["converged"] = r.converged;
    d["endpoint_energy"] = r.endpoint_energy;
    d["pattern_energy"] = r.pattern_energy;
    return d;
}

} // namespace

PYBIND11_MODULE(_pspin, m) {
    m.doc() = "p-spin associative memory simulator";
    m.attr("__version__") = PSPIN_VERSION;

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<BudgetError>(m, "BudgetError", PyExc_RuntimeError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::class_<ExponentSet>(m, "ExponentSet")
        .def_readonly("p", &ExponentSet::p)
        .def_readonly("q", &ExponentSet::q)
        .def_readonly("p_plus", &ExponentSet::p_plus)
        .def_readonly("q_minus", &ExponentSet::q_minus)
        .def_readonly("kappa", &ExponentSet::kappa)
        .def("__repr__", [](const ExponentSet& e) {
            std::ostringstream os;
            os << "ExponentSet(p=" << e.p << ", q=" << e.q << ", kappa=" << e.kappa << ")";
            return os.str();
        });

    m.def("exponents", [](double p) { return exponents(p, Given::p); }, py::arg("p"));
    m.def("exponents_from_q", [](double q) { return exponents(q, Given::q); }, py::arg("q"));
    m.def("entropy", &entropy, py::arg("r"));
    m.def("phi", &phi, py::arg("x"), py::arg("y"), py::arg("p"));
    m.def("phi_bar", &phi_bar, py::arg("r"), py::arg("p"));
    m.def("threshold_t", &threshold_t, py::arg("r"), py::arg("p"));
    m.def("d_constant", &d_constant, py::arg("p"));
    m.def("h_constant", &h_constant, py::arg("p"));

    py::class_<PatternMatrix>(m, "PatternMatrix")
        .def_static("generate", &PatternMatrix::generate, py::arg("n1"), py::arg("n2"), py::arg("seed"))
        .def_property_readonly("n1", &PatternMatrix::n1)
        .def_property_readonly("n2", &PatternMatrix::n2)
        .def_property_readonly("seed", &PatternMatrix::seed)
        .def("row", [](const PatternMatrix& xi, std::size_t mu) {
            if (mu >= xi.n2()) throw py::index_error("pattern index out of range");
            return xi.row(mu).values();
        })
        .def("overlap", [](const PatternMatrix& xi, std::size_t mu, const std::vector<int>& s) {
            if (mu >= xi.n2()) throw py::index_error("pattern index out of range");
            return xi.overlap(mu, state_of(s));
        })
        .def("save", [](const PatternMatrix& xi, const std::string& path) { save_patterns(xi, path); })
        .def_static("load", [](const std::string& path) { return load_patterns(path); })
        .def(py::self == py::self);

    m.def(
        "energy",
        [](const std::vector<int>& s, const PatternMatrix& xi, double p) {
            return energy_full(state_of(s), xi, exponents(p));
        },
        py::arg("state"), py::arg("patterns"), py::arg("p"));

    m.def(
        "descend",
        [](const std::vector<int>& start, const PatternMatrix& xi, double p, std::uint64_t seed,
           const std::string& rule, const std::string& order, std::size_t max_sweeps, const std::string& convention) {
            Rng rng(seed);
            const auto res =
                descend(state_of(start), xi, exponents(p), make_policy(rule, order, max_sweeps, convention), rng);
            py::dict d;
            d["endpoint"] = res.endpoint.values();
            d["flips"] = res.flips;
            d["sweeps"] = res.sweeps;
            d["converged"] = res.converged;
            d["stop"] = to_string(res.stop);
            d["energy_trace"] = res.energy_trace;
            return d;
        },
        py::arg("start"), py::arg("patterns"), py::arg("p"), py::arg("seed") = 0,
        py::arg("rule") = "first_improvement", py::arg("order") = "random_permutation",
        py::arg("max_sweeps") = 10000, py::arg("convention") = "strict");

    m.def(
        "perturb",
        [](const std::vector<int>& pattern, double r, std::uint64_t seed) {
            Rng rng(seed);
            return perturb(state_of(pattern), r, rng).values();
        },
        py::arg("pattern"), py::arg("r"), py::arg("seed") = 0);

    m.def(
        "is_local_min",
        [](const std::vector<int>& s, const PatternMatrix& xi, double p) {
            return certify_local_min(state_of(s), xi, exponents(p)).is_min;
        },
        py::arg("state"), py::arg("patterns"), py::arg("p"));

    m.def(
        "local_minima",
        [](const PatternMatrix& xi, double p, const std::string& convention) {
            const auto conv = convention == "weak" ? MinimumConvention::weak : MinimumConvention::strict;
            const auto set = enumerate_local_minima(xi, exponents(p), LocalMinScope::all_states(), std::nullopt, conv);
            std::vector<std::vector<int>> out;
            for (const auto& s : set.states) out.push_back(s.values());
            return out;
        },
        py::arg("patterns"), py::arg("p"), py::arg("convention") = "strict");

    m.def(
        "ground_state",
        [](const PatternMatrix& xi, double p) {
            Rng rng(0);
            const auto gs = ground_state(xi, exponents(p), GroundStateMode::exhaustive(), rng);
            return py::make_tuple(gs.state.values(), gs.energy);
        },
        py::arg("patterns"), py::arg("p"));

    m.def(
        "sphere_min_gap",
        [](const PatternMatrix& xi, double p, std::size_t mu, std::size_t radius, std::size_t samples,
           std::uint64_t seed) {
            Rng rng(seed);
            const auto mode = samples == 0 ? ScanMode::exhaustive() : ScanMode::sampled(samples);
            return sphere_scan(mu, radius, xi, exponents(p), mode, rng).min_gap;
        },
        py::arg("patterns"), py::arg("p"), py::arg("mu"), py::arg("radius"), py::arg("samples") = 0,
        py::arg("seed") = 0);

    m.def("u_eval", [](const std::string& prior, double x) { return u_eval(parse_prior(prior), x); },
          py::arg("prior"), py::arg("x"));
    m.def("psi_norm", [](const std::string& prior, double r) { return psi_norm(parse_prior(prior), r); },
          py::arg("prior"), py::arg("r"));
    m.def(
        "growth_ratio",
        [](const std::string& prior, double p) {
            const auto g = growth_ratio(parse_prior(prior), p);
            py::dict d;
            d["x"] = g.x;
            d["u"] = g.u;
            d["ratio"] = g.ratio;
            d["limit_estimate"] = g.limit_estimate;
            d["converged"] = g.converged;
            return d;
        },
        py::arg("prior"), py::arg("p"));

    m.def(
        "retrieval_sweep",
        [](const std::string& config_text, std::size_t threads) {
            auto cfg = sweep_config_from(Config::parse(config_text));
            cfg.threads = threads;
            py::gil_scoped_release release;
            auto res = retrieval_sweep(cfg);
            py::gil_scoped_acquire acquire;
            py::list out;
            for (const auto& r : res.records) out.append(record_dict(r));
            return out;
        },
        py::arg("config"), py::arg("threads") = 1,
        "Runs a retrieval sweep from config text in the same format as the CLI and returns one dict per trial.");

    m.def(
        "verify",
        [](std::uint64_t seed) {
            const auto results = run_verification_suite(seed);
            py::list out;
            for (const auto& r : results)
                out.append(py::make_tuple(r.name, to_string(r.status), r.worst_margin, r.location));
            return out;
        },
        py::arg("seed") = 0);
}
