#pragma once

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "mvep/model.hpp"

namespace mvep::fixtures {

// One grid point, two channels at energies 0 and 1, h_g = 0, V01 = V10 = 1/2.
inline CoupledSystem d1(double v01 = 0.5) {
    GridSpec grid{{0.0}, {1.0}, "xi"};
    ChannelSet channels{{0.0, 1.0}, {"open", "closed"}};
    Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(1, 1);
    Eigen::MatrixXd v = Eigen::MatrixXd::Constant(1, 1, v01);
    return CoupledSystem(grid, channels, zero, {zero, v, v, zero});
}

inline Eigen::MatrixXd random_symmetric(std::mt19937_64& rng, Eigen::Index n, double scale) {
    std::normal_distribution<double> normal(0.0, scale);
    Eigen::MatrixXd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) a(i, j) = a(j, i) = normal(rng);
    }
    return a;
}

// Dense system with arbitrary blocks, built without the random_system generator.
inline CoupledSystem dense_system(std::uint64_t seed, std::size_t nq, std::size_t nx) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    GridSpec grid;
    for (std::size_t k = 0; k < nx; ++k) {
        grid.points.push_back(0.5 * static_cast<double>(k));
        grid.weights.push_back(0.5);
    }
    ChannelSet channels;
    double e = 0.0;
    for (std::size_t n = 0; n < nq; ++n) {
        channels.energies.push_back(e);
        channels.labels.push_back("c" + std::to_string(n));
        e += 0.5 + unit(rng);
    }
    const auto m = static_cast<Eigen::Index>(nx);
    Eigen::MatrixXd h = random_symmetric(rng, m, 1.0);
    std::vector<Eigen::MatrixXd> v(nq * nq);
    for (std::size_t a = 0; a < nq; ++a) {
        v[a * nq + a] = random_symmetric(rng, m, 0.3);
        for (std::size_t b = a + 1; b < nq; ++b) {
            Eigen::MatrixXd block(m, m);
            std::normal_distribution<double> normal(0.0, 0.4);
            for (Eigen::Index i = 0; i < m; ++i)
                for (Eigen::Index j = 0; j < m; ++j) block(i, j) = normal(rng);
            v[a * nq + b] = block;
            v[b * nq + a] = block.transpose();
        }
    }
    return CoupledSystem(grid, channels, h, v);
}

// Full block matrix written out entry by entry.
inline Eigen::MatrixXd dense_oracle(const CoupledSystem& s) {
    const std::size_t nq = s.channel_count();
    const std::size_t nx = s.point_count();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nq * nx),
                                              static_cast<Eigen::Index>(nq * nx));
    for (std::size_t a = 0; a < nq; ++a) {
        for (std::size_t b = 0; b < nq; ++b) {
            for (std::size_t i = 0; i < nx; ++i) {
                for (std::size_t j = 0; j < nx; ++j) {
                    double x = s.coupling(a, b)(static_cast<Eigen::Index>(i),
                                                static_cast<Eigen::Index>(j));
                    if (a == b) {
                        x += s.background()(static_cast<Eigen::Index>(i),
                                            static_cast<Eigen::Index>(j));
                        if (i == j) x += s.channels().energies[a];
                    }
                    h(static_cast<Eigen::Index>(a * nx + i),
                      static_cast<Eigen::Index>(b * nx + j)) = x;
                }
            }
        }
    }
    return h;
}

// V_eff(eta) from a direct linear solve against the closed-channel block:
// V00 + V0Q (eta - H_QQ)^{-1} VQ0, with H_QQ measured from eps_0.
inline Eigen::MatrixXd resolvent_ep(const CoupledSystem& s, double eta) {
    const std::size_t nq = s.channel_count();
    const auto nx = static_cast<Eigen::Index>(s.point_count());
    const Eigen::Index nc = static_cast<Eigen::Index>(nq - 1) * nx;
    Eigen::MatrixXd full = dense_oracle(s);
    full.diagonal().array() -= s.channels().energies[0];
    const Eigen::MatrixXd hqq = full.bottomRightCorner(nc, nc);
    const Eigen::MatrixXd vq0 = full.bottomLeftCorner(nc, nx);
    const Eigen::MatrixXd a = eta * Eigen::MatrixXd::Identity(nc, nc) - hqq;
    return s.coupling(0, 0) + vq0.transpose() * a.partialPivLu().solve(vq0);
}

inline double max_abs(const Eigen::VectorXd& v) { return v.cwiseAbs().maxCoeff(); }

}  // namespace mvep::fixtures
