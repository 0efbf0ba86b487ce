#pragma once

// Eigenvalue-dependent effective potential acting on the open channel,
//
//   V_eff(eta) = V(0,0) + sum_k u_k u_k^T / (eta - p_k),
//
// where p_k are the truncated-block eigenvalues (measured from eps_0) and
// u_k = sum_{n>=1} V(0,n) v_{k,n} the matching residue vectors. The
// self-consistent problem [h_g + V_eff(eta)] psi_0 = eta psi_0 has more
// roots than the open-channel dimension; find_all_roots returns every one.

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "mvep/model.hpp"
#include "mvep/spectral.hpp"

namespace mvep {

struct EpOptions {
    double pole_guard = 1e-11;        // relative to the spectral span
    double merge_tolerance = 1e-10;   // relative to the spectral span; keep above 4x pole_guard
    double residue_tolerance = 1e-12;
};

struct Pole {
    double location = 0.0;
    Eigen::MatrixXd residues;        // N_xi x rank; contributes R R^T / (eta - location)
    std::vector<std::size_t> modes;  // truncated modes merged into this pole
    Eigen::Index rank() const noexcept { return residues.cols(); }
};

struct EffectivePotential {
    Eigen::MatrixXd base;  // V(0,0)
    std::vector<Pole> poles;  // ascending
    // Truncated levels that do not couple to the open channel. They are
    // eigenvalues of the full problem (minus eps_0) but not roots of the
    // reduced equation.
    std::vector<double> decoupled_levels;
    SpectralBounds bounds;
    double pole_guard = 0.0;

    std::size_t pole_rank() const noexcept;
    // Throws PoleProximityError within pole_guard of any pole.
    Eigen::MatrixXd evaluate(double eta) const;
    void check_pole_distance(double eta) const;
};

EffectivePotential build_ep(const CoupledSystem& system, const TruncatedSpectrum& truncated,
                            const EpOptions& options = {});

// Residue vector u_k = sum_{n>=1} V(0,n) v_{k,n} of one truncated mode.
Eigen::VectorXd mode_residue(const CoupledSystem& system, const TruncatedSpectrum& truncated,
                             std::size_t mode);

// Sorted eigenvalues lambda_k(eta) of h_g + V_eff(eta).
Eigen::VectorXd eigen_branches(const EffectivePotential& ep, const Eigen::MatrixXd& background,
                               double eta);

struct RootRecord {
    double eta = 0.0;
    Eigen::VectorXd psi0;       // unit eigenvector on the open channel
    std::size_t branch = 0;     // index of lambda_k in the sorted branch list
    std::size_t interval = 0;   // pole interval, 0 = left of every pole
    double lower = 0.0;         // bracketing interval
    double upper = 0.0;
    double residual = 0.0;           // |lambda_k(eta) - eta|
    double equation_residual = 0.0;  // ||[h_g + V_eff(eta)] psi0 - eta psi0||
};

// All roots, ascending in eta. Throws RootCountError when the count differs
// from N_xi + pole_rank().
std::vector<RootRecord> find_all_roots(const EffectivePotential& ep,
                                       const Eigen::MatrixXd& background);

// {root eta} together with the decoupled levels, shifted by eps_0 and
// sorted: directly comparable with the full spectrum.
std::vector<double> reconciled_levels(const std::vector<RootRecord>& roots,
                                      const EffectivePotential& ep, double eps0);

struct AssembledState {
    double eta = 0.0;
    std::size_t channel_count = 0;
    std::size_t point_count = 0;
    Eigen::VectorXd state;     // unit vector over (n, xi), channel-major
    Eigen::MatrixXd density;   // N_q x N_xi, unit mass under the grid weights
    Eigen::VectorXd marginal;  // xi-marginal of density
    double centre = 0.0;       // weighted centroid of the marginal
    double open_weight = 0.0;  // squared norm carried by channel 0
    bool normalizable = true;

    Eigen::VectorXd channel(std::size_t n) const;
};

// Resolvent back-substitution psi_Q = sum_k v_k (u_k . psi0) / (eta - p_k).
// A root within the pole guard of a coupled mode yields normalizable=false.
AssembledState assemble_state(const CoupledSystem& system, const TruncatedSpectrum& truncated,
                              const RootRecord& root, double pole_guard);
AssembledState assemble_state(const CoupledSystem& system, const TruncatedSpectrum& truncated,
                              const RootRecord& root);

// Density, marginal and centroid of an arbitrary (not necessarily unit) state.
AssembledState make_state(const CoupledSystem& system, double eta, Eigen::VectorXd state);

// Within each chain of roots spaced no more than `tolerance` apart, replace
// the states by their symmetric (Loewdin) orthonormalization. Back-substituted
// states of close levels lose orthogonality in proportion to root error over
// level gap.
void orthonormalize_clusters(const CoupledSystem& system, std::vector<AssembledState>& states,
                             double tolerance);

// Within each group of roots whose eta agree to `tolerance`, rotate the
// states onto the basis that diagonalizes position. Degenerate levels then
// come out localized and reproducible.
void localize_degenerate(const CoupledSystem& system, std::vector<AssembledState>& states,
                         double tolerance);

}  // namespace mvep
