#include "mvep/random_system.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "mvep/error.hpp"
#include "mvep/spectral.hpp"

namespace mvep {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double standard_normal(std::mt19937_64& rng) {
    // Box-Muller, first variate only.
    const double u1 = 1.0 - uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t uniform_index(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
    if (hi < lo) std::swap(lo, hi);
    return lo + static_cast<std::size_t>(rng() % (hi - lo + 1));
}

namespace {

Eigen::MatrixXd random_matrix(std::mt19937_64& rng, Eigen::Index n, double scale) {
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = scale * standard_normal(rng);
    }
    return m;
}

Eigen::MatrixXd random_symmetric(std::mt19937_64& rng, Eigen::Index n, double scale) {
    const Eigen::MatrixXd m = random_matrix(rng, n, scale);
    return 0.5 * (m + m.transpose());
}

CoupledSystem draw(std::mt19937_64& rng, const RandomSystemBounds& b) {
    const std::size_t nq = uniform_index(rng, b.min_channels, b.max_channels);
    const std::size_t nx = uniform_index(rng, b.min_points, b.max_points);
    const auto n = static_cast<Eigen::Index>(nx);

    GridSpec grid;
    grid.label = "xi";
    for (std::size_t k = 0; k < nx; ++k) grid.points.push_back(static_cast<double>(k));
    grid.weights.assign(nx, 1.0);

    ChannelSet channels;
    for (std::size_t c = 0; c < nq; ++c) {
        channels.energies.push_back(b.energy_spread * uniform01(rng));
        channels.labels.push_back("ch" + std::to_string(c));
    }
    std::sort(channels.energies.begin(), channels.energies.end());

    Eigen::MatrixXd background = random_symmetric(rng, n, 1.0);
    std::vector<Eigen::MatrixXd> v(nq * nq);
    for (std::size_t a = 0; a < nq; ++a) {
        v[a * nq + a] = random_symmetric(rng, n, b.coupling_scale);
        for (std::size_t c = a + 1; c < nq; ++c) {
            v[a * nq + c] = random_matrix(rng, n, b.coupling_scale);
            v[c * nq + a] = v[a * nq + c].transpose();
        }
    }
    return CoupledSystem(std::move(grid), std::move(channels), std::move(background),
                         std::move(v));
}

}  // namespace

double relative_pole_gap(const CoupledSystem& system) {
    const auto t = solve_truncated(system);
    const double span = spectral_bounds(system).span();
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < t.modes.size(); ++k) {
        gap = std::min(gap, t.modes[k].pole - t.modes[k - 1].pole);
    }
    return gap / span;
}

CoupledSystem random_system(std::mt19937_64& rng, const RandomSystemBounds& bounds) {
    if (bounds.min_channels < 2 || bounds.max_channels < bounds.min_channels ||
        bounds.min_points < 1 || bounds.max_points < bounds.min_points) {
        throw ModelError("invalid random system bounds");
    }
    for (std::size_t attempt = 0; attempt < bounds.max_attempts; ++attempt) {
        CoupledSystem s = draw(rng, bounds);
        if (relative_pole_gap(s) >= bounds.min_pole_gap) return s;
    }
    throw ModelError("could not draw a system with the requested pole separation");
}

}  // namespace mvep
