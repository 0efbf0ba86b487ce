#pragma once

// Discretized two-subsystem interaction problem: a quadrature grid for the
// localized field coordinate, a set of channels of the other field, the
// background operator on the grid and the channel matrix elements V(n, n').

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mvep {

struct GridSpec {
    std::vector<double> points;
    std::vector<double> weights;
    std::string label;

    std::size_t size() const noexcept { return points.size(); }
};

struct ChannelSet {
    std::vector<double> energies;  // index 0 is the open channel
    std::vector<std::string> labels;

    std::size_t size() const noexcept { return energies.size(); }
    // epsilon_n - epsilon_0
    double relative_energy(std::size_t n) const { return energies.at(n) - energies.at(0); }
};

class CoupledSystem {
public:
    CoupledSystem() = default;
    CoupledSystem(GridSpec grid, ChannelSet channels, Eigen::MatrixXd background,
                  std::vector<Eigen::MatrixXd> couplings);

    const GridSpec& grid() const noexcept { return grid_; }
    const ChannelSet& channels() const noexcept { return channels_; }
    const Eigen::MatrixXd& background() const noexcept { return background_; }

    // V(n, n'), an N_xi x N_xi block.
    const Eigen::MatrixXd& coupling(std::size_t n, std::size_t np) const;
    const std::vector<Eigen::MatrixXd>& couplings() const noexcept { return couplings_; }

    std::size_t channel_count() const noexcept { return channels_.size(); }
    std::size_t point_count() const noexcept { return grid_.size(); }
    std::size_t dimension() const noexcept { return channel_count() * point_count(); }

private:
    GridSpec grid_;
    ChannelSet channels_;
    Eigen::MatrixXd background_;
    std::vector<Eigen::MatrixXd> couplings_;  // row-major over (n, n')
};

// ---------------------------------------------------------------------------
// Declarative configuration

struct GridConfig {
    // Either explicit points (with optional weights) or a uniform grid.
    std::vector<double> points;
    std::vector<double> weights;
    double start = 0.0;
    double stop = 0.0;
    std::size_t count = 0;
    std::string label = "xi";
};

struct ChannelConfig {
    std::vector<double> energies;
    std::vector<std::string> labels;
    std::optional<std::size_t> open_channel;  // default: the lowest energy
};

enum class PotentialKind { None, Harmonic, DoubleWell, Table };

struct PotentialConfig {
    PotentialKind kind = PotentialKind::None;
    double stiffness = 1.0;   // harmonic: stiffness * xi^2 / 2
    double depth = 1.0;       // double well: depth * ((xi / half_separation)^2 - 1)^2
    double half_separation = 1.0;
    std::vector<double> values;  // table: one value per grid point
};

enum class BackgroundKind { Zero, Laplacian, Table };

struct BackgroundConfig {
    BackgroundKind kind = BackgroundKind::Zero;
    double mass = 1.0;  // laplacian: -(1/2m) d^2/dxi^2, Dirichlet ends
    PotentialConfig potential;
    Eigen::MatrixXd table;
};

enum class KernelKind { Gaussian, Box, Table };

struct CouplingTable {
    std::size_t from = 0;
    std::size_t to = 0;
    Eigen::MatrixXd matrix;
};

struct KernelConfig {
    KernelKind kind = KernelKind::Gaussian;
    double strength = 0.0;            // g
    std::vector<double> form_factors;  // f_n, defaults to 1 for every channel
    double center = 0.0;
    double width = 1.0;  // gaussian sigma or box half-width
    std::vector<CouplingTable> tables;
};

struct SystemConfig {
    GridConfig grid;
    ChannelConfig channels;
    BackgroundConfig background;
    KernelConfig coupling;
};

// Spatial profile w(xi) of a separable kernel.
double kernel_profile(const KernelConfig& kernel, double xi);

CoupledSystem build_system(const SystemConfig& config);

// ---------------------------------------------------------------------------
// Diagnostics

struct Diagnostic {
    std::string code;  // e.g. "grid-order", "coupling-symmetry"
    std::string message;
};

std::vector<Diagnostic> validate(const CoupledSystem& system);

}  // namespace mvep
