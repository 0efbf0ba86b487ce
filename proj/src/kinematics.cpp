#include "mvep/kinematics.hpp"

#include <algorithm>
#include <cmath>

#include "mvep/error.hpp"

namespace mvep {

namespace {

double rel(double value, double reference) {
    return std::abs(value - reference) / std::abs(reference);
}

}  // namespace

KinematicState derive(double rest_mass, double speed, const Constants& constants) {
    if (!(constants.planck > 0.0) || !(constants.light_speed > 0.0)) {
        throw KinematicsError("constants must be positive");
    }
    if (!(rest_mass > 0.0) || !std::isfinite(rest_mass)) {
        throw KinematicsError("rest mass must be positive");
    }
    if (!(speed >= 0.0) || !std::isfinite(speed)) {
        throw KinematicsError("speed must be non-negative");
    }
    const double c = constants.light_speed;
    const double h = constants.planck;
    const double beta = speed / c;
    if (beta > max_beta) {
        throw KinematicsError("speed " + std::to_string(speed) + " m/s is not below c (beta cap " +
                              std::to_string(max_beta) + ")");
    }

    KinematicState s;
    s.constants = constants;
    s.rest_mass = rest_mass;
    s.speed = speed;
    s.beta = beta;
    const double contraction = std::sqrt((1.0 - beta) * (1.0 + beta));
    s.gamma = 1.0 / contraction;
    s.rest_energy = rest_mass * c * c;
    s.energy = s.gamma * s.rest_energy;
    s.mass = s.energy / (c * c);
    s.momentum = s.energy * speed / (c * c);
    s.rest_frequency = s.rest_energy / h;
    s.rest_period = 1.0 / s.rest_frequency;
    s.total_frequency = s.gamma * s.rest_frequency;
    s.total_period = s.rest_period * contraction;
    s.internal_frequency = s.rest_frequency * contraction;
    s.internal_period = s.gamma * s.rest_period;
    s.de_broglie_frequency = s.momentum * speed / h;
    s.rest_de_broglie_frequency = rest_mass * speed * speed / h;
    if (speed > 0.0) {
        s.wavelength = h / s.momentum;
        s.rest_wavelength = h / (rest_mass * speed);
    }
    return s;
}

EnergyPartition energy_partition(const KinematicState& state) {
    const double h = state.constants.planck;
    return {h * state.rest_frequency * std::sqrt((1.0 - state.beta) * (1.0 + state.beta)),
            h * state.de_broglie_frequency};
}

double de_broglie_wavelength(double mass, double speed, const Constants& constants) {
    if (!(mass > 0.0)) throw KinematicsError("mass must be positive");
    if (!(speed > 0.0)) throw KinematicsError("wavelength undefined at zero speed");
    return constants.planck / (mass * speed);
}

double IdentityResiduals::max() const noexcept {
    return std::max({dispersion, partition, action_balance, time_product, frequency_product,
                     retardation, de_broglie_chain, rest_de_broglie_chain, wavelength_chain});
}

IdentityResiduals identity_residuals(const KinematicState& s) {
    const double h = s.constants.planck;
    const double c = s.constants.light_speed;
    const double b2 = s.beta * s.beta;
    IdentityResiduals r;
    const double e2 = s.energy * s.energy;
    const double pc = s.momentum * c;
    r.dispersion = std::abs(e2 - pc * pc - s.rest_energy * s.rest_energy) / e2;
    r.partition = rel(energy_partition(s).total(), s.energy);
    r.action_balance = rel(h * s.internal_frequency + s.momentum * s.speed, s.energy);
    r.time_product = rel(s.internal_period * s.total_period, s.rest_period * s.rest_period);
    r.frequency_product =
        rel(s.internal_frequency * s.total_frequency, s.rest_frequency * s.rest_frequency);
    r.retardation = rel(s.internal_period * (1.0 - s.beta) * (1.0 + s.beta), s.total_period);
    if (s.speed > 0.0) {
        r.de_broglie_chain = rel(s.total_frequency * b2, s.de_broglie_frequency);
        r.rest_de_broglie_chain = rel(s.rest_frequency * b2, s.rest_de_broglie_frequency);
        r.wavelength_chain = rel(s.speed / s.de_broglie_frequency, *s.wavelength);
    }
    return r;
}

std::vector<KinematicState> sweep(double rest_mass, std::span<const double> betas,
                                  const Constants& constants) {
    std::vector<KinematicState> out;
    out.reserve(betas.size());
    for (double b : betas) out.push_back(derive(rest_mass, b * constants.light_speed, constants));
    return out;
}

std::vector<double> linspace(double first, double last, std::size_t n) {
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = first;
        return out;
    }
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = first + (last - first) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return out;
}

}  // namespace mvep
