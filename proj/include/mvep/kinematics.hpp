#pragma once

// Rest-frame beat frequency and the relativistic kinematics that follow from
// it for a particle of rest mass m0 moving at speed v (SI units throughout).

#include <optional>
#include <span>
#include <vector>

namespace mvep {

struct Constants {
    double planck = 6.62607015e-34;  // J s
    double light_speed = 299792458.0;  // m / s
};

inline constexpr double max_beta = 1.0 - 1e-12;

struct KinematicState {
    Constants constants;
    double rest_mass = 0.0;  // m0
    double speed = 0.0;      // v
    double beta = 0.0;
    double gamma = 1.0;
    double rest_energy = 0.0;   // E0 = m0 c^2 = h nu0
    double energy = 0.0;        // E = gamma m0 c^2
    double mass = 0.0;          // m = E / c^2
    double momentum = 0.0;      // p = E v / c^2
    double rest_frequency = 0.0;      // nu0 = E0 / h
    double rest_period = 0.0;         // tau0 = 1 / nu0
    double total_frequency = 0.0;     // nu = gamma nu0 = E / h
    double total_period = 0.0;        // tau = tau0 / gamma
    double internal_frequency = 0.0;  // N = nu0 / gamma
    double internal_period = 0.0;     // T = gamma tau0
    double de_broglie_frequency = 0.0;       // nu_B = p v / h
    double rest_de_broglie_frequency = 0.0;  // nu_B0 = m0 v^2 / h
    std::optional<double> wavelength;        // lambda_B = h / p, absent at rest
    std::optional<double> rest_wavelength;   // lambda_B0 = h / (m0 v), absent at rest
};

// Throws KinematicsError unless m0 > 0 and 0 <= v/c <= max_beta.
KinematicState derive(double rest_mass, double speed, const Constants& constants = {});

struct EnergyPartition {
    double rest_term = 0.0;    // h nu0 sqrt(1 - beta^2)
    double motion_term = 0.0;  // h nu_B
    double total() const noexcept { return rest_term + motion_term; }
};

EnergyPartition energy_partition(const KinematicState& state);

// h / (m v); throws KinematicsError for v <= 0 or m <= 0.
double de_broglie_wavelength(double mass, double speed, const Constants& constants = {});

// Relative residual of each identity linking the derived quantities.
struct IdentityResiduals {
    double dispersion = 0.0;         // E^2 - (pc)^2 = (m0 c^2)^2
    double partition = 0.0;          // rest_term + motion_term = E
    double action_balance = 0.0;     // E = h N + p v
    double time_product = 0.0;       // T tau = tau0^2
    double frequency_product = 0.0;  // N nu = nu0^2
    double retardation = 0.0;        // tau = T (1 - beta^2)
    double de_broglie_chain = 0.0;   // nu_B = nu beta^2
    double rest_de_broglie_chain = 0.0;  // nu_B0 = nu0 beta^2
    double wavelength_chain = 0.0;   // lambda_B = v / nu_B (zero at rest)

    double max() const noexcept;
};

IdentityResiduals identity_residuals(const KinematicState& state);

std::vector<KinematicState> sweep(double rest_mass, std::span<const double> betas,
                                  const Constants& constants = {});

// n points evenly spaced on [first, last].
std::vector<double> linspace(double first, double last, std::size_t n);

}  // namespace mvep
