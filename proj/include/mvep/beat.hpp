#pragma once

// Stochastic switching between realisation centres: one jump per period,
// one action quantum spent per jump.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace mvep {

// Optional jump policy: weights over centres given the current index. When
// unset, jumps are independent draws from alpha.
using JumpKernel = std::function<std::vector<double>(std::size_t current)>;

struct BeatConfig {
    std::vector<double> alpha;
    std::vector<double> centres;
    std::size_t steps = 1;
    std::uint64_t seed = 0;
    double period = 1.0;          // tau
    double action_quantum = 1.0;  // h_sim
    double initial_action = 0.0;  // A_0
    JumpKernel kernel;
};

struct BeatTrajectory {
    std::vector<std::size_t> indices;
    std::vector<double> times;      // t_k = k * tau, k = 1..steps
    std::vector<double> positions;  // centre of the visited realisation
    std::vector<double> actions;    // A_k = A_0 - k * h_sim
    std::vector<std::size_t> counts;  // visits per centre

    std::size_t steps() const noexcept { return indices.size(); }
    std::vector<double> frequencies() const;
};

// Throws BeatError for an invalid configuration.
void validate(const BeatConfig& config);

BeatTrajectory simulate(const BeatConfig& config);

struct DriftDiffusion {
    double drift = 0.0;     // mean position per step
    double variance = 0.0;  // spread of positions about the drift
};

DriftDiffusion drift_and_diffusion(const BeatTrajectory& trajectory);
// Exact moments of a single draw from alpha over centres.
DriftDiffusion expected_moments(std::span<const double> alpha, std::span<const double> centres);

struct ChiSquareReport {
    double statistic = 0.0;
    std::size_t degrees_of_freedom = 0;
    double critical_value = 0.0;
    double p_value = 1.0;
    double confidence = 0.999;
    bool passed = true;
    std::vector<double> deviations;  // empirical minus configured frequency
};

ChiSquareReport frequency_test(const BeatTrajectory& trajectory, std::span<const double> alpha,
                               double confidence = 0.999);

}  // namespace mvep
