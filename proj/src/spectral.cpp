#include "mvep/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mvep/error.hpp"

namespace mvep {

void canonicalize_sign(Eigen::Ref<Eigen::VectorXd> v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) > 1e-12) {
            if (v[i] < 0.0) v = -v;
            return;
        }
    }
}

SymmetricEigen symmetric_eigen(const Eigen::MatrixXd& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
        throw SpectralError("symmetric eigensolver did not converge");
    }
    SymmetricEigen out{solver.eigenvalues(), solver.eigenvectors()};
    for (Eigen::Index j = 0; j < out.vectors.cols(); ++j) canonicalize_sign(out.vectors.col(j));
    return out;
}

Eigen::MatrixXd assemble_full(const CoupledSystem& system) {
    const auto nq = static_cast<Eigen::Index>(system.channel_count());
    const auto nx = static_cast<Eigen::Index>(system.point_count());
    Eigen::MatrixXd h(nq * nx, nq * nx);
    for (Eigen::Index a = 0; a < nq; ++a) {
        for (Eigen::Index b = 0; b < nq; ++b) {
            auto block = h.block(a * nx, b * nx, nx, nx);
            block = system.coupling(a, b);
            if (a == b) {
                block += system.background();
                block.diagonal().array() += system.channels().energies[a];
            }
        }
    }
    return h;
}

Eigen::MatrixXd assemble_truncated(const CoupledSystem& system) {
    const auto nq = static_cast<Eigen::Index>(system.channel_count());
    const auto nx = static_cast<Eigen::Index>(system.point_count());
    if (nq < 2) throw SpectralError("truncation needs at least one closed channel (N_q >= 2)");
    const Eigen::Index m = nq - 1;
    Eigen::MatrixXd k(m * nx, m * nx);
    for (Eigen::Index a = 1; a < nq; ++a) {
        for (Eigen::Index b = 1; b < nq; ++b) {
            auto block = k.block((a - 1) * nx, (b - 1) * nx, nx, nx);
            block = system.coupling(a, b);
            if (a == b) {
                block += system.background();
                block.diagonal().array() += system.channels().relative_energy(a);
            }
        }
    }
    return k;
}

SpectralBounds spectral_bounds(const CoupledSystem& system) {
    const Eigen::MatrixXd h = assemble_full(system);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (Eigen::Index i = 0; i < h.rows(); ++i) {
        const double radius = h.row(i).cwiseAbs().sum() - std::abs(h(i, i));
        lo = std::min(lo, h(i, i) - radius);
        hi = std::max(hi, h(i, i) + radius);
    }
    const double e0 = system.channels().energies.at(0);
    lo -= e0;
    hi -= e0;
    const double pad = 1e-3 * (hi - lo) + 1e-6 * std::max({1.0, std::abs(lo), std::abs(hi)});
    return {lo - pad, hi + pad};
}

Eigen::VectorXd TruncatedSpectrum::component(std::size_t mode, std::size_t n) const {
    if (n == 0 || n >= channel_count) {
        throw SpectralError("truncated component requested for channel " + std::to_string(n));
    }
    const auto nx = static_cast<Eigen::Index>(point_count);
    return modes.at(mode).vector.segment(static_cast<Eigen::Index>(n - 1) * nx, nx);
}

TruncatedSpectrum solve_truncated(const CoupledSystem& system) {
    const Eigen::MatrixXd k = assemble_truncated(system);
    const auto eig = symmetric_eigen(k);

    TruncatedSpectrum out;
    out.channel_count = system.channel_count();
    out.point_count = system.point_count();
    const auto nx = static_cast<Eigen::Index>(out.point_count);
    const auto m = static_cast<Eigen::Index>(out.channel_count - 1);
    out.modes.reserve(static_cast<std::size_t>(eig.values.size()));
    for (Eigen::Index j = 0; j < eig.values.size(); ++j) {
        TruncatedMode mode;
        mode.pole = eig.values[j];
        mode.vector = eig.vectors.col(j);
        Eigen::Index best = 0;
        double best_weight = -1.0;
        for (Eigen::Index c = 0; c < m; ++c) {
            const double w = mode.vector.segment(c * nx, nx).squaredNorm();
            if (w > best_weight + 1e-12) {
                best_weight = w;
                best = c;
            }
        }
        mode.channel = static_cast<std::size_t>(best + 1);
        mode.eta0 = mode.pole - system.channels().relative_energy(mode.channel);
        out.modes.push_back(std::move(mode));
    }
    return out;
}

Eigen::VectorXd FullSpectrum::component(std::size_t j, std::size_t n) const {
    const auto nx = static_cast<Eigen::Index>(point_count);
    return eigenvectors.col(static_cast<Eigen::Index>(j))
        .segment(static_cast<Eigen::Index>(n) * nx, nx);
}

FullSpectrum solve_full(const CoupledSystem& system) {
    const Eigen::MatrixXd h = assemble_full(system);
    auto eig = symmetric_eigen(h);
    FullSpectrum out;
    out.channel_count = system.channel_count();
    out.point_count = system.point_count();
    out.residuals.resize(eig.values.size());
    for (Eigen::Index j = 0; j < eig.values.size(); ++j) {
        out.residuals[j] = (h * eig.vectors.col(j) - eig.values[j] * eig.vectors.col(j)).norm();
    }
    out.eigenvalues = std::move(eig.values);
    out.eigenvectors = std::move(eig.vectors);
    return out;
}

}  // namespace mvep
