#pragma once

// Seeded generator of random well-posed coupled systems, used by the oracle
// campaign and the test suites. Every draw goes through mt19937_64 directly,
// so a seed reproduces the same system on any standard library.

#include <cstddef>
#include <cstdint>
#include <random>

#include "mvep/model.hpp"

namespace mvep {

double uniform01(std::mt19937_64& rng);
double standard_normal(std::mt19937_64& rng);
// Uniform integer in [lo, hi].
std::size_t uniform_index(std::mt19937_64& rng, std::size_t lo, std::size_t hi);

struct RandomSystemBounds {
    std::size_t min_channels = 2;
    std::size_t max_channels = 6;
    std::size_t min_points = 2;
    std::size_t max_points = 12;
    double coupling_scale = 0.5;
    double energy_spread = 3.0;
    double min_pole_gap = 1e-6;  // relative to the spectral span
    std::size_t max_attempts = 1000;
};

CoupledSystem random_system(std::mt19937_64& rng, const RandomSystemBounds& bounds = {});

// Smallest gap between consecutive truncated-block eigenvalues divided by the
// spectral span (infinity with fewer than two poles).
double relative_pole_gap(const CoupledSystem& system);

}  // namespace mvep
