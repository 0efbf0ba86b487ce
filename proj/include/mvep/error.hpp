#pragma once

#include <stdexcept>
#include <string>

namespace mvep {

// Every library error carries the module it originated in so the CLI can
// attribute failures.
class Error : public std::runtime_error {
public:
    Error(std::string module, const std::string& what)
        : std::runtime_error(module + ": " + what), module_(std::move(module)) {}

    const std::string& module() const noexcept { return module_; }

private:
    std::string module_;
};

class ModelError : public Error {
public:
    explicit ModelError(const std::string& what) : Error("model", what) {}
};

class SpectralError : public Error {
public:
    explicit SpectralError(const std::string& what) : Error("spectral-core", what) {}
};

class PoleProximityError : public Error {
public:
    PoleProximityError(double eta, double pole)
        : Error("ep-solver", "eta=" + std::to_string(eta) + " lies within the pole guard of " +
                                 std::to_string(pole)),
          eta_(eta), pole_(pole) {}
    double eta() const noexcept { return eta_; }
    double pole() const noexcept { return pole_; }

private:
    double eta_;
    double pole_;
};

class RootCountError : public Error {
public:
    RootCountError(std::size_t found, std::size_t expected)
        : Error("ep-solver", "found " + std::to_string(found) + " roots, expected " +
                                 std::to_string(expected)),
          found_(found), expected_(expected) {}
    std::size_t found() const noexcept { return found_; }
    std::size_t expected() const noexcept { return expected_; }

private:
    std::size_t found_;
    std::size_t expected_;
};

class RealisationError : public Error {
public:
    explicit RealisationError(const std::string& what) : Error("realisations", what) {}
};

class BeatError : public Error {
public:
    explicit BeatError(const std::string& what) : Error("beat-sim", what) {}
};

class KinematicsError : public Error {
public:
    explicit KinematicsError(const std::string& what) : Error("kinematics", what) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error("config", what) {}
};

}  // namespace mvep
