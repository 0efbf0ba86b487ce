#pragma once

// Orchestration behind the command-line tool: solve a configured system end
// to end, run the randomized oracle campaign, drive the beat simulator from
// solved probabilities, and write CSV artifacts plus a JSON run report.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mvep/beat.hpp"
#include "mvep/config.hpp"
#include "mvep/ep_solver.hpp"
#include "mvep/kinematics.hpp"
#include "mvep/realisations.hpp"
#include "mvep/spectral.hpp"

namespace mvep {

struct OracleComparison {
    double max_relative = 0.0;  // max |reduced - full| / max |full|
    std::size_t reduced_count = 0;
    std::size_t full_count = 0;
    bool count_match() const noexcept { return reduced_count == full_count; }
};

OracleComparison compare_levels(const std::vector<double>& reduced, const Eigen::VectorXd& full);

struct SolveResult {
    CoupledSystem system;
    TruncatedSpectrum truncated;
    FullSpectrum full;
    EffectivePotential ep;
    std::vector<RootRecord> roots;
    std::vector<AssembledState> states;
    RealisationSet realisations;
    ProjectionCoefficients projection;
    Eigen::MatrixXd expectation;  // from the Born probabilities
    Regime regime_counting = Regime::Intermediate;
    Regime regime_born = Regime::Intermediate;
    OracleComparison oracle;
};

SolveResult solve_system(CoupledSystem system, const RealisationOptions& options = {},
                         const EpOptions& ep_options = {});

struct TrialResult {
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    std::size_t channels = 0;
    std::size_t points = 0;
    std::size_t roots = 0;
    std::size_t decoupled = 0;
    double max_relative = 0.0;
    bool passed = false;
    std::string message;
};

// Seed of trial t; trials are independent so any one can be replayed.
std::uint64_t trial_seed(std::uint64_t campaign_seed, std::size_t trial);

TrialResult verify_trial(std::size_t trial, const VerifyOptions& options,
                         const Tolerances& tolerances);
std::vector<TrialResult> verify_campaign(const VerifyOptions& options,
                                         const Tolerances& tolerances);

BeatConfig beat_config(const SolveResult& result, const SimulationOptions& options);

struct RunOutcome {
    nlohmann::json report;
    bool ok = false;
};

// Each run writes its CSV artifacts and report.json into `out`.
RunOutcome run_solve(const RunConfig& config, const std::filesystem::path& out);
RunOutcome run_verify(const RunConfig& config, const std::filesystem::path& out);
RunOutcome run_simulate(const RunConfig& config, const std::filesystem::path& out);

// Table of derived quantities and identity residuals for one state.
nlohmann::json kinematics_table(const KinematicState& state);
void write_kinematics_sweep(const std::filesystem::path& path, double rest_mass,
                            std::span<const double> betas, const Constants& constants = {});

// 64-bit FNV-1a, hex encoded.
std::string digest(const std::string& text);

}  // namespace mvep
