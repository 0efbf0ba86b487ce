#pragma once

// JSON configuration schema for systems and runs. See README.md for the
// full key list.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "mvep/model.hpp"
#include "mvep/random_system.hpp"
#include "mvep/realisations.hpp"

namespace mvep {

SystemConfig parse_system_config(const nlohmann::json& j);
nlohmann::json to_json(const SystemConfig& config);

enum class ReferenceKind { Uniform, EqualWeight };
enum class Estimator { Born, Counting };

struct RealisationOptions {
    GroupingPolicy policy;
    ReferenceKind reference = ReferenceKind::Uniform;
    RegimeThresholds thresholds;
};

struct SimulationOptions {
    std::size_t steps = 100000;
    std::uint64_t seed = 1;
    double period = 1.0;
    double action_quantum = 1.0;
    double initial_action = 0.0;
    Estimator estimator = Estimator::Born;
    double confidence = 0.999;
};

struct VerifyOptions {
    std::size_t trials = 100;
    std::uint64_t seed = 1;
    RandomSystemBounds bounds;
    std::optional<std::size_t> fault_trial;  // perturb one pole in this trial
};

struct Tolerances {
    double oracle_relative = 1e-8;
};

struct RunConfig {
    std::optional<SystemConfig> system;
    RealisationOptions realisations;
    SimulationOptions simulation;
    VerifyOptions verify;
    Tolerances tolerances;
};

RunConfig parse_run_config(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& config);

// Reads a run configuration; a document without a "system" key whose top
// level looks like a system ("grid", "channels") is accepted as a bare system.
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json load_json(const std::filesystem::path& path);

}  // namespace mvep
