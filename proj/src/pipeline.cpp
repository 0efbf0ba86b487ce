#include "mvep/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>

#include "mvep/csv.hpp"
#include "mvep/error.hpp"
#include "mvep/random_system.hpp"

namespace mvep {

using nlohmann::json;

OracleComparison compare_levels(const std::vector<double>& reduced, const Eigen::VectorXd& full) {
    OracleComparison out;
    out.reduced_count = reduced.size();
    out.full_count = static_cast<std::size_t>(full.size());
    if (!out.count_match()) {
        out.max_relative = std::numeric_limits<double>::infinity();
        return out;
    }
    double scale = full.size() > 0 ? full.cwiseAbs().maxCoeff() : 1.0;
    if (!(scale > 0.0)) scale = 1.0;
    for (std::size_t i = 0; i < reduced.size(); ++i) {
        out.max_relative = std::max(
            out.max_relative, std::abs(reduced[i] - full[static_cast<Eigen::Index>(i)]) / scale);
    }
    return out;
}

SolveResult solve_system(CoupledSystem system, const RealisationOptions& options,
                         const EpOptions& ep_options) {
    SolveResult r;
    r.system = std::move(system);
    const auto& sys = r.system;
    if (sys.channel_count() >= 2) {
        r.truncated = solve_truncated(sys);
    } else {
        r.truncated.channel_count = sys.channel_count();
        r.truncated.point_count = sys.point_count();
    }
    r.full = solve_full(sys);
    r.ep = build_ep(sys, r.truncated, ep_options);
    r.roots = find_all_roots(r.ep, sys.background());

    r.states.reserve(r.roots.size());
    for (std::size_t i = 0; i < r.roots.size(); ++i) {
        auto state = assemble_state(sys, r.truncated, r.roots[i], r.ep.pole_guard);
        if (!state.normalizable) {
            throw Error("ep-solver", "root " + std::to_string(i) + " at eta=" +
                                         csv::number(r.roots[i].eta) +
                                         " coincides with a pole; state is unnormalizable");
        }
        r.states.push_back(std::move(state));
    }
    // Every root lies inside the bounds, so this is a single chain: the whole set.
    orthonormalize_clusters(sys, r.states, r.ep.bounds.span());
    localize_degenerate(sys, r.states, 1e-9 * r.ep.bounds.span());

    r.oracle = compare_levels(reconciled_levels(r.roots, r.ep, sys.channels().energies[0]),
                              r.full.eigenvalues);

    r.realisations = group_realisations(r.states, options.policy);
    const Eigen::VectorXd reference = options.reference == ReferenceKind::Uniform
                                          ? uniform_reference(sys)
                                          : equal_weight_reference(r.states);
    r.projection = project_states(r.states, reference);
    born_probabilities(r.realisations, r.projection);
    r.expectation = expectation_density(r.realisations, r.realisations.alpha_born, r.states);
    r.regime_counting = classify_regime(r.realisations.alpha_counting, options.thresholds);
    r.regime_born = classify_regime(r.realisations.alpha_born, options.thresholds);
    return r;
}

std::uint64_t trial_seed(std::uint64_t campaign_seed, std::size_t trial) {
    return campaign_seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(trial + 1);
}

TrialResult verify_trial(std::size_t trial, const VerifyOptions& options,
                         const Tolerances& tolerances) {
    TrialResult t;
    t.trial = trial;
    t.seed = trial_seed(options.seed, trial);
    std::mt19937_64 rng(t.seed);
    try {
        const CoupledSystem system = random_system(rng, options.bounds);
        t.channels = system.channel_count();
        t.points = system.point_count();
        const auto truncated = solve_truncated(system);
        auto ep = build_ep(system, truncated);
        if (options.fault_trial && *options.fault_trial == trial && !ep.poles.empty()) {
            ep.poles.front().location += 1e-3 * ep.bounds.span();
        }
        const auto full = solve_full(system);
        const auto roots = find_all_roots(ep, system.background());
        t.roots = roots.size();
        t.decoupled = ep.decoupled_levels.size();
        const auto cmp = compare_levels(
            reconciled_levels(roots, ep, system.channels().energies[0]), full.eigenvalues);
        t.max_relative = cmp.max_relative;
        t.passed = cmp.count_match() && cmp.max_relative <= tolerances.oracle_relative;
        if (!cmp.count_match()) {
            t.message = "level count " + std::to_string(cmp.reduced_count) + " vs " +
                        std::to_string(cmp.full_count);
        } else if (!t.passed) {
            t.message = "deviation " + csv::number(cmp.max_relative) + " exceeds tolerance";
        }
    } catch (const RootCountError& e) {
        t.roots = e.found();
        t.max_relative = std::numeric_limits<double>::infinity();
        t.passed = false;
        t.message = e.what();
    } catch (const Error& e) {
        t.max_relative = std::numeric_limits<double>::infinity();
        t.passed = false;
        t.message = e.what();
    }
    return t;
}

std::vector<TrialResult> verify_campaign(const VerifyOptions& options,
                                         const Tolerances& tolerances) {
    std::vector<TrialResult> out;
    out.reserve(options.trials);
    for (std::size_t t = 0; t < options.trials; ++t) {
        out.push_back(verify_trial(t, options, tolerances));
    }
    return out;
}

BeatConfig beat_config(const SolveResult& result, const SimulationOptions& options) {
    BeatConfig c;
    c.alpha = options.estimator == Estimator::Born ? result.realisations.alpha_born
                                                   : result.realisations.alpha_counting;
    c.centres = result.realisations.centres;
    c.steps = options.steps;
    c.seed = options.seed;
    c.period = options.period;
    c.action_quantum = options.action_quantum;
    c.initial_action = options.initial_action;
    return c;
}

std::string digest(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void write_report(const std::filesystem::path& out, const json& report) {
    std::ofstream f(out / "report.json", std::ios::binary);
    if (!f) throw Error("cli", "cannot write report in '" + out.string() + "'");
    f << report.dump(2) << '\n';
}

json header(const std::string& command, const RunConfig& config) {
    const json merged = to_json(config);
    return {{"command", command}, {"config", merged}, {"input_digest", digest(merged.dump())}};
}

void write_solve_artifacts(const std::filesystem::path& out, const SolveResult& r) {
    using csv::number;
    const auto& sys = r.system;
    const std::size_t nq = sys.channel_count();
    const auto nx = static_cast<Eigen::Index>(sys.point_count());

    {
        csv::Writer w(out / "system.csv", {"block", "row", "col", "value"});
        for (Eigen::Index i = 0; i < nx; ++i) {
            for (Eigen::Index j = 0; j < nx; ++j) {
                w.row({"h_g", number(static_cast<std::size_t>(i)), number(static_cast<std::size_t>(j)),
                       number(sys.background()(i, j))});
            }
        }
        for (std::size_t a = 0; a < nq; ++a) {
            for (std::size_t b = 0; b < nq; ++b) {
                const auto& v = sys.coupling(a, b);
                const std::string name = "V" + std::to_string(a) + "_" + std::to_string(b);
                for (Eigen::Index i = 0; i < nx; ++i) {
                    for (Eigen::Index j = 0; j < nx; ++j) {
                        w.row({name, number(static_cast<std::size_t>(i)),
                               number(static_cast<std::size_t>(j)), number(v(i, j))});
                    }
                }
            }
        }
    }
    {
        csv::Writer w(out / "spectrum_full.csv", {"index", "eigenvalue", "residual"});
        for (std::size_t j = 0; j < r.full.size(); ++j) {
            const auto jj = static_cast<Eigen::Index>(j);
            w.row({number(j), number(r.full.eigenvalues[jj]), number(r.full.residuals[jj])});
        }
    }
    {
        csv::Writer w(out / "spectrum_truncated.csv", {"index", "pole", "eta0", "channel"});
        for (std::size_t k = 0; k < r.truncated.modes.size(); ++k) {
            const auto& m = r.truncated.modes[k];
            w.row({number(k), number(m.pole), number(m.eta0), number(m.channel)});
        }
    }
    {
        csv::Writer w(out / "roots.csv", {"index", "eta", "energy", "branch", "interval", "lower",
                                          "upper", "residual", "equation_residual"});
        const double e0 = sys.channels().energies[0];
        for (std::size_t i = 0; i < r.roots.size(); ++i) {
            const auto& root = r.roots[i];
            w.row({number(i), number(root.eta), number(root.eta + e0), number(root.branch),
                   number(root.interval), number(root.lower), number(root.upper),
                   number(root.residual), number(root.equation_residual)});
        }
    }
    {
        csv::Writer w(out / "densities.csv", {"root", "channel", "xi", "amplitude", "density"});
        for (std::size_t i = 0; i < r.states.size(); ++i) {
            const auto& s = r.states[i];
            for (std::size_t n = 0; n < nq; ++n) {
                for (Eigen::Index k = 0; k < nx; ++k) {
                    const auto row = static_cast<Eigen::Index>(n);
                    w.row({number(i), number(n), number(sys.grid().points[k]),
                           number(s.state[row * nx + k]), number(s.density(row, k))});
                }
            }
        }
    }
    {
        csv::Writer w(out / "realisations.csv",
                      {"group", "members", "size", "centre", "alpha_counting", "alpha_born"});
        const auto& set = r.realisations;
        for (std::size_t g = 0; g < set.size(); ++g) {
            std::string members;
            for (std::size_t i : set.groups[g]) {
                if (!members.empty()) members += ' ';
                members += std::to_string(i);
            }
            w.row({number(g), members, number(set.member_counts[g]), number(set.centres[g]),
                   number(set.alpha_counting[g]), number(set.alpha_born[g])});
        }
    }
    {
        csv::Writer w(out / "expectation_density.csv", {"channel", "xi", "density"});
        for (std::size_t n = 0; n < nq; ++n) {
            for (Eigen::Index k = 0; k < nx; ++k) {
                w.row({number(n), number(sys.grid().points[k]),
                       number(r.expectation(static_cast<Eigen::Index>(n), k))});
            }
        }
    }
}

json solve_summary(const SolveResult& r, const RunConfig& config, bool& ok) {
    const auto& set = r.realisations;
    double max_residual = 0.0;
    for (const auto& root : r.roots) max_residual = std::max(max_residual, root.residual);
    const double sum_counting =
        std::accumulate(set.alpha_counting.begin(), set.alpha_counting.end(), 0.0);
    const double sum_born = std::accumulate(set.alpha_born.begin(), set.alpha_born.end(), 0.0);

    double mass = 0.0;
    const auto& w = r.system.grid().weights;
    for (Eigen::Index k = 0; k < r.expectation.cols(); ++k) {
        mass += w[static_cast<std::size_t>(k)] * r.expectation.col(k).sum();
    }

    const bool oracle_ok =
        r.oracle.count_match() && r.oracle.max_relative <= config.tolerances.oracle_relative;
    const bool alpha_ok = std::abs(sum_counting - 1.0) <= 1e-12 && std::abs(sum_born - 1.0) <= 1e-12;
    ok = oracle_ok && alpha_ok;

    return {
        {"system",
         {{"channels", r.system.channel_count()},
          {"points", r.system.point_count()},
          {"dimension", r.system.dimension()},
          {"open_channel_energy", r.system.channels().energies[0]}}},
        {"roots",
         {{"count", r.roots.size()},
          {"expected", r.system.point_count() + r.ep.pole_rank()},
          {"decoupled_levels", r.ep.decoupled_levels.size()},
          {"poles", r.ep.poles.size()},
          {"min_eta", r.roots.empty() ? 0.0 : r.roots.front().eta},
          {"max_eta", r.roots.empty() ? 0.0 : r.roots.back().eta},
          {"max_branch_residual", max_residual}}},
        {"oracle",
         {{"max_relative", r.oracle.max_relative},
          {"tolerance", config.tolerances.oracle_relative},
          {"reduced_levels", r.oracle.reduced_count},
          {"full_levels", r.oracle.full_count},
          {"passed", oracle_ok}}},
        {"realisations",
         {{"policy", config.realisations.policy.to_string()},
          {"count", set.size()},
          {"elementary", set.total()},
          {"complexity", set.complexity},
          {"alpha_counting_sum", sum_counting},
          {"alpha_born_sum", sum_born},
          {"regime_counting", to_string(r.regime_counting)},
          {"regime_born", to_string(r.regime_born)},
          {"expectation_mass", mass}}},
        {"checks", {{"oracle", oracle_ok}, {"probability_sums", alpha_ok}}}};
}

CoupledSystem configured_system(const RunConfig& config) {
    if (!config.system) throw ConfigError("configuration has no 'system' section");
    return build_system(*config.system);
}

}  // namespace

RunOutcome run_solve(const RunConfig& config, const std::filesystem::path& out) {
    const auto start = Clock::now();
    std::filesystem::create_directories(out);
    const SolveResult r = solve_system(configured_system(config), config.realisations);
    write_solve_artifacts(out, r);

    RunOutcome outcome;
    outcome.report = header("solve", config);
    outcome.report.update(solve_summary(r, config, outcome.ok));
    outcome.report["wall_time_s"] = seconds_since(start);
    write_report(out, outcome.report);
    return outcome;
}

RunOutcome run_verify(const RunConfig& config, const std::filesystem::path& out) {
    const auto start = Clock::now();
    if (config.verify.trials < 1) throw ConfigError("verify.trials must be at least 1");
    std::filesystem::create_directories(out);
    const auto trials = verify_campaign(config.verify, config.tolerances);

    {
        csv::Writer w(out / "trials.csv", {"trial", "seed", "channels", "points", "roots",
                                           "decoupled", "max_relative", "passed"});
        for (const auto& t : trials) {
            w.row({csv::number(t.trial), std::to_string(t.seed), csv::number(t.channels),
                   csv::number(t.points), csv::number(t.roots), csv::number(t.decoupled),
                   csv::number(t.max_relative), t.passed ? "1" : "0"});
        }
    }

    RunOutcome outcome;
    outcome.report = header("verify", config);
    double worst = 0.0;
    json failures = json::array();
    for (const auto& t : trials) {
        if (std::isfinite(t.max_relative)) worst = std::max(worst, t.max_relative);
        if (!t.passed) failures.push_back({{"trial", t.trial}, {"seed", t.seed}, {"reason", t.message}});
    }
    outcome.ok = failures.empty();
    outcome.report["verify"] = {{"trials", trials.size()},
                                {"passed", trials.size() - failures.size()},
                                {"max_relative", worst},
                                {"tolerance", config.tolerances.oracle_relative},
                                {"failures", failures}};
    outcome.report["checks"] = {{"oracle", outcome.ok}};
    outcome.report["wall_time_s"] = seconds_since(start);
    write_report(out, outcome.report);
    return outcome;
}

RunOutcome run_simulate(const RunConfig& config, const std::filesystem::path& out) {
    const auto start = Clock::now();
    std::filesystem::create_directories(out);
    const SolveResult r = solve_system(configured_system(config), config.realisations);
    write_solve_artifacts(out, r);

    const BeatConfig bc = beat_config(r, config.simulation);
    const BeatTrajectory traj = simulate(bc);
    {
        csv::Writer w(out / "trajectory.csv", {"step", "time", "index", "position", "action"});
        for (std::size_t k = 0; k < traj.steps(); ++k) {
            w.row({csv::number(k + 1), csv::number(traj.times[k]), csv::number(traj.indices[k]),
                   csv::number(traj.positions[k]), csv::number(traj.actions[k])});
        }
    }
    const auto freq = traj.frequencies();
    {
        csv::Writer w(out / "frequencies.csv",
                      {"index", "centre", "alpha", "count", "frequency"});
        for (std::size_t i = 0; i < bc.alpha.size(); ++i) {
            w.row({csv::number(i), csv::number(bc.centres[i]), csv::number(bc.alpha[i]),
                   csv::number(traj.counts[i]), csv::number(freq[i])});
        }
    }

    RunOutcome outcome;
    outcome.report = header("simulate", config);
    bool solve_ok = false;
    outcome.report.update(solve_summary(r, config, solve_ok));

    bool ledger = true;
    for (std::size_t k = 0; k < traj.steps(); ++k) {
        const double expected =
            bc.initial_action - static_cast<double>(k + 1) * bc.action_quantum;
        if (traj.actions[k] != expected) ledger = false;
        if (k > 0 && !(traj.times[k] > traj.times[k - 1])) ledger = false;
    }
    const auto chi = frequency_test(traj, bc.alpha, config.simulation.confidence);
    const auto theory = expected_moments(bc.alpha, bc.centres);
    json sim = {{"steps", traj.steps()},
                {"seed", bc.seed},
                {"estimator", config.simulation.estimator == Estimator::Born ? "born" : "counting"},
                {"expected_drift", theory.drift},
                {"expected_variance", theory.variance},
                {"action_ledger_exact", ledger},
                {"final_action", traj.actions.back()},
                {"chi_square",
                 {{"statistic", chi.statistic},
                  {"degrees_of_freedom", chi.degrees_of_freedom},
                  {"critical_value", chi.critical_value},
                  {"p_value", chi.p_value},
                  {"confidence", chi.confidence},
                  {"passed", chi.passed},
                  {"deviations", chi.deviations}}}};
    if (traj.steps() >= 2) {
        const auto dd = drift_and_diffusion(traj);
        sim["drift"] = dd.drift;
        sim["variance"] = dd.variance;
    }
    outcome.report["simulation"] = sim;
    outcome.report["checks"]["action_ledger"] = ledger;
    outcome.report["checks"]["frequency_test"] = chi.passed;
    outcome.ok = solve_ok && ledger && chi.passed;
    outcome.report["wall_time_s"] = seconds_since(start);
    write_report(out, outcome.report);
    return outcome;
}

json kinematics_table(const KinematicState& s) {
    const auto res = identity_residuals(s);
    const auto part = energy_partition(s);
    json j = {{"m0_kg", s.rest_mass},
              {"v_m_per_s", s.speed},
              {"beta", s.beta},
              {"gamma", s.gamma},
              {"E0_J", s.rest_energy},
              {"E_J", s.energy},
              {"m_kg", s.mass},
              {"p_kg_m_per_s", s.momentum},
              {"nu0_Hz", s.rest_frequency},
              {"tau0_s", s.rest_period},
              {"nu_Hz", s.total_frequency},
              {"tau_s", s.total_period},
              {"N_Hz", s.internal_frequency},
              {"T_s", s.internal_period},
              {"nuB_Hz", s.de_broglie_frequency},
              {"nuB0_Hz", s.rest_de_broglie_frequency},
              {"lambdaB_m", s.wavelength ? json(*s.wavelength) : json(nullptr)},
              {"lambdaB0_m", s.rest_wavelength ? json(*s.rest_wavelength) : json(nullptr)},
              {"partition_rest_J", part.rest_term},
              {"partition_motion_J", part.motion_term}};
    j["residuals"] = {{"dispersion", res.dispersion},
                      {"partition", res.partition},
                      {"action_balance", res.action_balance},
                      {"time_product", res.time_product},
                      {"frequency_product", res.frequency_product},
                      {"retardation", res.retardation},
                      {"de_broglie_chain", res.de_broglie_chain},
                      {"rest_de_broglie_chain", res.rest_de_broglie_chain},
                      {"wavelength_chain", res.wavelength_chain}};
    return j;
}

void write_kinematics_sweep(const std::filesystem::path& path, double rest_mass,
                            std::span<const double> betas, const Constants& constants) {
    using csv::number;
    csv::Writer w(path, {"beta", "gamma", "E", "p", "nu0", "nu", "N", "tau", "T", "nuB",
                         "lambdaB", "rest_term", "motion_term", "max_residual"});
    for (const auto& s : sweep(rest_mass, betas, constants)) {
        const auto part = energy_partition(s);
        w.row({number(s.beta), number(s.gamma), number(s.energy), number(s.momentum),
               number(s.rest_frequency), number(s.total_frequency), number(s.internal_frequency),
               number(s.total_period), number(s.internal_period), number(s.de_broglie_frequency),
               s.wavelength ? number(*s.wavelength) : "", number(part.rest_term),
               number(part.motion_term), number(identity_residuals(s).max())});
    }
}

}  // namespace mvep
