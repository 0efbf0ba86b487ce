// Command-line front end: solve | verify | simulate | kinematics | report.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mvep/config.hpp"
#include "mvep/error.hpp"
#include "mvep/kinematics.hpp"
#include "mvep/pipeline.hpp"

namespace {

using nlohmann::json;

struct Flags {
    std::string config;
    std::string out = "mvep-out";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::optional<std::size_t> steps;
    std::optional<std::size_t> fault_trial;
    std::string policy;
    double m0 = 9.1093837015e-31;
    double v = 0.0;
    std::size_t sweep = 0;
    double beta_min = 0.01;
    double beta_max = 0.999;
};

mvep::RunConfig merged_config(const Flags& f, bool require_file) {
    mvep::RunConfig config;
    if (!f.config.empty()) {
        config = mvep::load_run_config(f.config);
    } else if (require_file) {
        throw mvep::ConfigError("--config is required for this command");
    }
    if (!f.policy.empty()) config.realisations.policy = mvep::GroupingPolicy::parse(f.policy);
    if (f.trials) config.verify.trials = *f.trials;
    if (f.steps) config.simulation.steps = *f.steps;
    if (f.fault_trial) config.verify.fault_trial = *f.fault_trial;
    return config;
}

void print_summary(const json& report) {
    const std::string cmd = report.value("command", "");
    std::cout << "command: " << cmd << "  digest: " << report.value("input_digest", "") << '\n';
    if (report.contains("roots")) {
        const auto& r = report["roots"];
        std::cout << "roots: " << r["count"] << " (expected " << r["expected"] << ", decoupled "
                  << r["decoupled_levels"] << ")\n";
    }
    if (report.contains("oracle")) {
        const auto& o = report["oracle"];
        std::cout << "oracle max relative deviation: " << o["max_relative"] << " (tolerance "
                  << o["tolerance"] << ")\n";
    }
    if (report.contains("realisations")) {
        const auto& r = report["realisations"];
        std::cout << "realisations: " << r["count"] << "  complexity: " << r["complexity"]
                  << "  regime (counting/born): " << r["regime_counting"].get<std::string>() << " / "
                  << r["regime_born"].get<std::string>() << '\n';
    }
    if (report.contains("verify")) {
        const auto& v = report["verify"];
        std::cout << "trials passed: " << v["passed"] << "/" << v["trials"]
                  << "  worst relative deviation: " << v["max_relative"] << '\n';
        for (const auto& f : v["failures"]) {
            std::cout << "  FAILED trial " << f["trial"] << ": " << f["reason"].get<std::string>()
                      << '\n';
        }
    }
    if (report.contains("simulation")) {
        const auto& s = report["simulation"];
        std::cout << "steps: " << s["steps"] << "  drift: " << s.value("drift", 0.0)
                  << " (expected " << s["expected_drift"] << ")  chi-square: "
                  << s["chi_square"]["statistic"] << " < " << s["chi_square"]["critical_value"]
                  << " : " << (s["chi_square"]["passed"].get<bool>() ? "pass" : "FAIL") << '\n';
    }
    if (report.contains("checks")) {
        for (const auto& [name, value] : report["checks"].items()) {
            std::cout << "check " << name << ": " << (value.get<bool>() ? "pass" : "FAIL") << '\n';
        }
    }
}

int finish(const mvep::RunOutcome& outcome) {
    print_summary(outcome.report);
    return outcome.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Effective-potential reduction, realisation statistics and beat kinematics"};
    app.require_subcommand(1);
    Flags f;

    auto* solve = app.add_subcommand("solve", "Solve a configured system and compare with the oracle");
    solve->add_option("--config", f.config, "JSON configuration file")->required();
    solve->add_option("--out", f.out, "Output directory");
    solve->add_option("--policy", f.policy, "elementary | cluster:<delta>");

    auto* verify = app.add_subcommand("verify", "Randomized oracle campaign");
    verify->add_option("--config", f.config, "JSON configuration file");
    verify->add_option("--out", f.out, "Output directory");
    verify->add_option("--seed", f.seed, "Campaign seed");
    verify->add_option("--trials", f.trials, "Number of random systems")->check(CLI::PositiveNumber);
    verify->add_option("--fault-trial", f.fault_trial,
                       "Test hook: perturb one pole in this trial");

    auto* sim = app.add_subcommand("simulate", "Solve, then simulate the realisation jump process");
    sim->add_option("--config", f.config, "JSON configuration file")->required();
    sim->add_option("--out", f.out, "Output directory");
    sim->add_option("--seed", f.seed, "Simulation seed");
    sim->add_option("--steps", f.steps, "Number of jumps")->check(CLI::PositiveNumber);
    sim->add_option("--policy", f.policy, "elementary | cluster:<delta>");

    auto* kin = app.add_subcommand("kinematics", "Derived kinematic table for (m0, v)");
    kin->add_option("--m0", f.m0, "Rest mass in kg (default: electron)");
    kin->add_option("--v", f.v, "Speed in m/s");
    kin->add_option("--sweep", f.sweep, "Write an N-point beta sweep to <out>/kinematics.csv");
    kin->add_option("--beta-min", f.beta_min, "Sweep start");
    kin->add_option("--beta-max", f.beta_max, "Sweep end");
    kin->add_option("--out", f.out, "Output directory for the sweep");

    auto* rep = app.add_subcommand("report", "Print the summary of a previous run");
    rep->add_option("--out", f.out, "Run output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) {
            return finish(mvep::run_solve(merged_config(f, true), f.out));
        }
        if (verify->parsed()) {
            auto config = merged_config(f, false);
            if (f.seed) config.verify.seed = *f.seed;
            return finish(mvep::run_verify(config, f.out));
        }
        if (sim->parsed()) {
            auto config = merged_config(f, true);
            if (f.seed) config.simulation.seed = *f.seed;
            return finish(mvep::run_simulate(config, f.out));
        }
        if (kin->parsed()) {
            const auto state = mvep::derive(f.m0, f.v);
            const auto table = mvep::kinematics_table(state);
            std::cout << table.dump(2) << '\n';
            if (f.sweep > 0) {
                std::filesystem::create_directories(f.out);
                const auto betas = mvep::linspace(f.beta_min, f.beta_max, f.sweep);
                mvep::write_kinematics_sweep(std::filesystem::path(f.out) / "kinematics.csv", f.m0,
                                             betas);
            }
            return mvep::identity_residuals(state).max() <= 1e-12 ? 0 : 1;
        }
        if (rep->parsed()) {
            const auto report = mvep::load_json(std::filesystem::path(f.out) / "report.json");
            print_summary(report);
            return 0;
        }
    } catch (const mvep::Error& e) {
        std::cerr << "error [" << e.module() << "]: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
