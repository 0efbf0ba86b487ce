#pragma once

// Dense linear-algebra backbone: the truncated (closed-channel) block whose
// eigenpairs supply the poles of the effective potential, and the full
// coupled problem used as the exact oracle.

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "mvep/model.hpp"

namespace mvep {

struct SymmetricEigen {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXd vectors;  // columns, first non-negligible component positive
};

// Ascending eigenpairs of a real symmetric matrix with a deterministic sign
// convention.
SymmetricEigen symmetric_eigen(const Eigen::MatrixXd& a);

// Flip v so that its first component above 1e-12 in magnitude is positive.
void canonicalize_sign(Eigen::Ref<Eigen::VectorXd> v);

// Block matrix over all channels: diagonal blocks h_g + V(n,n) + eps_n,
// off-diagonal blocks V(n,n'). Layout is channel-major (n * N_xi + k).
Eigen::MatrixXd assemble_full(const CoupledSystem& system);

// Block matrix over channels n >= 1 with diagonal blocks
// h_g + V(n,n) + (eps_n - eps_0). Channel 0 is excluded.
Eigen::MatrixXd assemble_truncated(const CoupledSystem& system);

struct SpectralBounds {
    double lower = 0.0;
    double upper = 0.0;
    double span() const noexcept { return upper - lower; }
};

// Gershgorin enclosure of the full spectrum, relative to eps_0, widened so
// that span() > 0.
SpectralBounds spectral_bounds(const CoupledSystem& system);

struct TruncatedMode {
    double pole = 0.0;         // eigenvalue of the shifted truncated block
    double eta0 = 0.0;         // pole - (eps_c - eps_0) for the dominant channel c
    std::size_t channel = 1;   // dominant channel (system numbering, >= 1)
    Eigen::VectorXd vector;    // length (N_q - 1) * N_xi, unit norm
};

struct TruncatedSpectrum {
    std::size_t channel_count = 0;
    std::size_t point_count = 0;
    std::vector<TruncatedMode> modes;  // ascending by pole

    // Component of a mode on channel n >= 1.
    Eigen::VectorXd component(std::size_t mode, std::size_t n) const;
};

TruncatedSpectrum solve_truncated(const CoupledSystem& system);

struct FullSpectrum {
    std::size_t channel_count = 0;
    std::size_t point_count = 0;
    Eigen::VectorXd eigenvalues;   // ascending
    Eigen::MatrixXd eigenvectors;  // columns
    Eigen::VectorXd residuals;     // ||H v - E v||

    std::size_t size() const noexcept { return static_cast<std::size_t>(eigenvalues.size()); }
    Eigen::VectorXd component(std::size_t j, std::size_t n) const;
};

FullSpectrum solve_full(const CoupledSystem& system);

}  // namespace mvep
