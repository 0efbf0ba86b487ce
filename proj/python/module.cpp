#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <random>

#include "mvep/beat.hpp"
#include "mvep/config.hpp"
#include "mvep/ep_solver.hpp"
#include "mvep/error.hpp"
#include "mvep/kinematics.hpp"
#include "mvep/model.hpp"
#include "mvep/pipeline.hpp"
#include "mvep/random_system.hpp"
#include "mvep/realisations.hpp"
#include "mvep/spectral.hpp"

namespace py = pybind11;
using namespace mvep;

namespace {

CoupledSystem system_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    if (j.contains("system")) j = j.at("system");
    return build_system(parse_system_config(j));
}

py::dict residuals_dict(const IdentityResiduals& r) {
    py::dict d;
    d["dispersion"] = r.dispersion;
    d["partition"] = r.partition;
    d["action_balance"] = r.action_balance;
    d["time_product"] = r.time_product;
    d["frequency_product"] = r.frequency_product;
    d["retardation"] = r.retardation;
    d["de_broglie_chain"] = r.de_broglie_chain;
    d["rest_de_broglie_chain"] = r.rest_de_broglie_chain;
    d["wavelength_chain"] = r.wavelength_chain;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Effective-potential reduction, realisation statistics and beat kinematics";

    py::register_exception<Error>(m, "MvepError", PyExc_RuntimeError);

    // model
    py::class_<CoupledSystem>(m, "CoupledSystem")
        .def_property_readonly("points", [](const CoupledSystem& s) { return s.grid().points; })
        .def_property_readonly("weights", [](const CoupledSystem& s) { return s.grid().weights; })
        .def_property_readonly("energies",
                               [](const CoupledSystem& s) { return s.channels().energies; })
        .def_property_readonly("labels", [](const CoupledSystem& s) { return s.channels().labels; })
        .def_property_readonly("background", &CoupledSystem::background)
        .def("coupling", &CoupledSystem::coupling, py::arg("n"), py::arg("n_prime"))
        .def_property_readonly("channel_count", &CoupledSystem::channel_count)
        .def_property_readonly("point_count", &CoupledSystem::point_count)
        .def_property_readonly("dimension", &CoupledSystem::dimension);

    m.def("build_system", &system_from_json, py::arg("config_json"),
          "Build a system from a JSON document (bare system or run config)");
    m.def("random_system",
          [](std::uint64_t seed, std::size_t max_channels, std::size_t max_points) {
              std::mt19937_64 rng(seed);
              RandomSystemBounds b;
              b.max_channels = max_channels;
              b.max_points = max_points;
              return random_system(rng, b);
          },
          py::arg("seed"), py::arg("max_channels") = 6, py::arg("max_points") = 12);
    m.def("validate", [](const CoupledSystem& s) {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& d : validate(s)) out.emplace_back(d.code, d.message);
        return out;
    });

    // spectral-core
    py::class_<TruncatedMode>(m, "TruncatedMode")
        .def_readonly("pole", &TruncatedMode::pole)
        .def_readonly("eta0", &TruncatedMode::eta0)
        .def_readonly("channel", &TruncatedMode::channel)
        .def_readonly("vector", &TruncatedMode::vector);
    py::class_<TruncatedSpectrum>(m, "TruncatedSpectrum")
        .def_readonly("modes", &TruncatedSpectrum::modes)
        .def("component", &TruncatedSpectrum::component);
    py::class_<FullSpectrum>(m, "FullSpectrum")
        .def_readonly("eigenvalues", &FullSpectrum::eigenvalues)
        .def_readonly("eigenvectors", &FullSpectrum::eigenvectors)
        .def_readonly("residuals", &FullSpectrum::residuals)
        .def("component", &FullSpectrum::component);
    m.def("solve_truncated", &solve_truncated);
    m.def("solve_full", &solve_full);
    m.def("assemble_full", &assemble_full);

    // ep-solver
    py::class_<Pole>(m, "Pole")
        .def_readonly("location", &Pole::location)
        .def_readonly("residues", &Pole::residues);
    py::class_<EffectivePotential>(m, "EffectivePotential")
        .def_readonly("base", &EffectivePotential::base)
        .def_readonly("poles", &EffectivePotential::poles)
        .def_readonly("decoupled_levels", &EffectivePotential::decoupled_levels)
        .def_readonly("pole_guard", &EffectivePotential::pole_guard)
        .def("evaluate", &EffectivePotential::evaluate, py::arg("eta"));
    py::class_<RootRecord>(m, "RootRecord")
        .def_readonly("eta", &RootRecord::eta)
        .def_readonly("psi0", &RootRecord::psi0)
        .def_readonly("branch", &RootRecord::branch)
        .def_readonly("interval", &RootRecord::interval)
        .def_readonly("lower", &RootRecord::lower)
        .def_readonly("upper", &RootRecord::upper)
        .def_readonly("residual", &RootRecord::residual);
    py::class_<AssembledState>(m, "AssembledState")
        .def_readonly("eta", &AssembledState::eta)
        .def_readonly("state", &AssembledState::state)
        .def_readonly("density", &AssembledState::density)
        .def_readonly("marginal", &AssembledState::marginal)
        .def_readonly("centre", &AssembledState::centre)
        .def_readonly("normalizable", &AssembledState::normalizable);
    m.def("build_ep", [](const CoupledSystem& s, const TruncatedSpectrum& t) { return build_ep(s, t); });
    m.def("eigen_branches", &eigen_branches, py::arg("ep"), py::arg("background"), py::arg("eta"));
    m.def("find_all_roots", &find_all_roots, py::arg("ep"), py::arg("background"));
    m.def("reconciled_levels", &reconciled_levels, py::arg("roots"), py::arg("ep"), py::arg("eps0"));
    m.def("assemble_state",
          py::overload_cast<const CoupledSystem&, const TruncatedSpectrum&, const RootRecord&>(
              &assemble_state));

    // realisations
    py::class_<RealisationSet>(m, "RealisationSet")
        .def_readonly("groups", &RealisationSet::groups)
        .def_readonly("member_counts", &RealisationSet::member_counts)
        .def_readonly("centres", &RealisationSet::centres)
        .def_readonly("alpha_counting", &RealisationSet::alpha_counting)
        .def_readonly("alpha_born", &RealisationSet::alpha_born)
        .def_readonly("complexity", &RealisationSet::complexity);
    m.def("group_realisations",
          [](const std::vector<double>& centres, const std::string& policy) {
              return group_realisations(std::span<const double>(centres),
                                        GroupingPolicy::parse(policy));
          },
          py::arg("centres"), py::arg("policy") = "elementary");
    m.def("complexity", py::overload_cast<std::size_t>(&complexity));
    m.def("normalized_entropy",
          [](const std::vector<double>& a) { return normalized_entropy(a); });
    m.def("classify_regime",
          [](const std::vector<double>& a) { return to_string(classify_regime(a)); });

    py::class_<SolveResult>(m, "SolveResult")
        .def_readonly("system", &SolveResult::system)
        .def_readonly("truncated", &SolveResult::truncated)
        .def_readonly("full", &SolveResult::full)
        .def_readonly("roots", &SolveResult::roots)
        .def_readonly("states", &SolveResult::states)
        .def_readonly("realisations", &SolveResult::realisations)
        .def_readonly("expectation", &SolveResult::expectation)
        .def_property_readonly("oracle_max_relative",
                               [](const SolveResult& r) { return r.oracle.max_relative; })
        .def_property_readonly("regime_born",
                               [](const SolveResult& r) { return to_string(r.regime_born); })
        .def_property_readonly("regime_counting",
                               [](const SolveResult& r) { return to_string(r.regime_counting); });
    m.def("solve",
          [](const CoupledSystem& s, const std::string& policy, const std::string& reference) {
              RealisationOptions o;
              o.policy = GroupingPolicy::parse(policy);
              if (reference == "uniform") {
                  o.reference = ReferenceKind::Uniform;
              } else if (reference == "equal-weight") {
                  o.reference = ReferenceKind::EqualWeight;
              } else {
                  throw ConfigError("unknown reference '" + reference + "'");
              }
              return solve_system(s, o);
          },
          py::arg("system"), py::arg("policy") = "elementary", py::arg("reference") = "uniform");

    // beat-sim
    py::class_<BeatTrajectory>(m, "BeatTrajectory")
        .def_readonly("indices", &BeatTrajectory::indices)
        .def_readonly("times", &BeatTrajectory::times)
        .def_readonly("positions", &BeatTrajectory::positions)
        .def_readonly("actions", &BeatTrajectory::actions)
        .def_readonly("counts", &BeatTrajectory::counts)
        .def("frequencies", &BeatTrajectory::frequencies);
    m.def("simulate",
          [](std::vector<double> alpha, std::vector<double> centres, std::size_t steps,
             std::uint64_t seed, double period, double action_quantum, double initial_action) {
              BeatConfig c;
              c.alpha = std::move(alpha);
              c.centres = std::move(centres);
              c.steps = steps;
              c.seed = seed;
              c.period = period;
              c.action_quantum = action_quantum;
              c.initial_action = initial_action;
              return simulate(c);
          },
          py::arg("alpha"), py::arg("centres"), py::arg("steps"), py::arg("seed") = 0,
          py::arg("period") = 1.0, py::arg("action_quantum") = 1.0,
          py::arg("initial_action") = 0.0);
    m.def("drift_and_diffusion", [](const BeatTrajectory& t) {
        const auto d = drift_and_diffusion(t);
        return std::make_pair(d.drift, d.variance);
    });
    m.def("frequency_test",
          [](const BeatTrajectory& t, const std::vector<double>& alpha, double confidence) {
              const auto r = frequency_test(t, alpha, confidence);
              py::dict d;
              d["statistic"] = r.statistic;
              d["degrees_of_freedom"] = r.degrees_of_freedom;
              d["critical_value"] = r.critical_value;
              d["p_value"] = r.p_value;
              d["passed"] = r.passed;
              d["deviations"] = r.deviations;
              return d;
          },
          py::arg("trajectory"), py::arg("alpha"), py::arg("confidence") = 0.999);

    // kinematics
    py::class_<KinematicState>(m, "KinematicState")
        .def_readonly("rest_mass", &KinematicState::rest_mass)
        .def_readonly("speed", &KinematicState::speed)
        .def_readonly("beta", &KinematicState::beta)
        .def_readonly("gamma", &KinematicState::gamma)
        .def_readonly("rest_energy", &KinematicState::rest_energy)
        .def_readonly("energy", &KinematicState::energy)
        .def_readonly("mass", &KinematicState::mass)
        .def_readonly("momentum", &KinematicState::momentum)
        .def_readonly("rest_frequency", &KinematicState::rest_frequency)
        .def_readonly("rest_period", &KinematicState::rest_period)
        .def_readonly("total_frequency", &KinematicState::total_frequency)
        .def_readonly("total_period", &KinematicState::total_period)
        .def_readonly("internal_frequency", &KinematicState::internal_frequency)
        .def_readonly("internal_period", &KinematicState::internal_period)
        .def_readonly("de_broglie_frequency", &KinematicState::de_broglie_frequency)
        .def_readonly("rest_de_broglie_frequency", &KinematicState::rest_de_broglie_frequency)
        .def_readonly("wavelength", &KinematicState::wavelength)
        .def_readonly("rest_wavelength", &KinematicState::rest_wavelength);
    m.def("derive", [](double m0, double v) { return derive(m0, v); }, py::arg("m0"), py::arg("v"));
    m.def("energy_partition", [](const KinematicState& s) {
        const auto p = energy_partition(s);
        return std::make_pair(p.rest_term, p.motion_term);
    });
    m.def("de_broglie_wavelength", [](double mass, double v) { return de_broglie_wavelength(mass, v); },
          py::arg("mass"), py::arg("v"));
    m.def("identity_residuals",
          [](const KinematicState& s) { return residuals_dict(identity_residuals(s)); });
}
