#include "mvep/ep_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mvep/error.hpp"

namespace mvep {

std::size_t EffectivePotential::pole_rank() const noexcept {
    std::size_t r = 0;
    for (const auto& p : poles) r += static_cast<std::size_t>(p.rank());
    return r;
}

void EffectivePotential::check_pole_distance(double eta) const {
    for (const auto& p : poles) {
        if (std::abs(eta - p.location) < pole_guard) throw PoleProximityError(eta, p.location);
    }
}

Eigen::MatrixXd EffectivePotential::evaluate(double eta) const {
    check_pole_distance(eta);
    Eigen::MatrixXd v = base;
    for (const auto& p : poles) {
        v.noalias() += (p.residues * p.residues.transpose()) / (eta - p.location);
    }
    return v;
}

Eigen::VectorXd mode_residue(const CoupledSystem& system, const TruncatedSpectrum& truncated,
                             std::size_t mode) {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(system.point_count()));
    for (std::size_t n = 1; n < system.channel_count(); ++n) {
        u.noalias() += system.coupling(0, n) * truncated.component(mode, n);
    }
    return u;
}

EffectivePotential build_ep(const CoupledSystem& system, const TruncatedSpectrum& truncated,
                            const EpOptions& options) {
    EffectivePotential ep;
    ep.base = system.coupling(0, 0);
    ep.bounds = spectral_bounds(system);
    const double span = ep.bounds.span();
    ep.pole_guard = options.pole_guard * span;

    double coupling_scale = 1.0;
    for (std::size_t n = 1; n < system.channel_count(); ++n) {
        coupling_scale = std::max(coupling_scale, system.coupling(0, n).cwiseAbs().maxCoeff());
    }
    const double drop = options.residue_tolerance * coupling_scale;

    struct Raw {
        double pole;
        Eigen::VectorXd u;
        std::size_t mode;
    };
    std::vector<Raw> coupled;
    for (std::size_t k = 0; k < truncated.modes.size(); ++k) {
        Eigen::VectorXd u = mode_residue(system, truncated, k);
        if (u.norm() < drop) {
            ep.decoupled_levels.push_back(truncated.modes[k].pole);
        } else {
            coupled.push_back({truncated.modes[k].pole, std::move(u), k});
        }
    }

    const double merge_gap = options.merge_tolerance * span;
    const auto nx = static_cast<Eigen::Index>(system.point_count());
    for (std::size_t i = 0; i < coupled.size();) {
        std::size_t j = i + 1;
        while (j < coupled.size() && coupled[j].pole - coupled[j - 1].pole < merge_gap) ++j;
        const auto m = static_cast<Eigen::Index>(j - i);

        Pole pole;
        Eigen::MatrixXd u(nx, m);
        double location = 0.0;
        for (Eigen::Index c = 0; c < m; ++c) {
            const auto& raw = coupled[i + static_cast<std::size_t>(c)];
            u.col(c) = raw.u;
            location += raw.pole;
            pole.modes.push_back(raw.mode);
        }
        pole.location = location / static_cast<double>(m);

        if (m == 1) {
            pole.residues = std::move(u);
        } else {
            // Merged pole: keep only the independent residue directions.
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(u, Eigen::ComputeThinU);
            const auto& s = svd.singularValues();
            Eigen::Index rank = 0;
            while (rank < s.size() && s[rank] > drop * std::max(1.0, s[0])) ++rank;
            if (rank == m) {
                pole.residues = std::move(u);
            } else {
                pole.residues = svd.matrixU().leftCols(rank) * s.head(rank).asDiagonal();
                for (Eigen::Index c = rank; c < m; ++c) ep.decoupled_levels.push_back(pole.location);
            }
        }
        if (pole.rank() > 0) ep.poles.push_back(std::move(pole));
        i = j;
    }
    std::sort(ep.decoupled_levels.begin(), ep.decoupled_levels.end());
    return ep;
}

namespace {

Eigen::MatrixXd reduced_operator(const EffectivePotential& ep, const Eigen::MatrixXd& background,
                                 double eta) {
    Eigen::MatrixXd a = background + ep.evaluate(eta);
    // Symmetrize away rounding from the rank-one updates.
    return 0.5 * (a + a.transpose());
}

Eigen::VectorXd branch_values(const EffectivePotential& ep, const Eigen::MatrixXd& background,
                              double eta) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
        reduced_operator(ep, background, eta), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw SpectralError("eigensolver failed on the reduced operator");
    }
    return solver.eigenvalues();
}

double branch_gap(const EffectivePotential& ep, const Eigen::MatrixXd& background, double eta,
                  Eigen::Index branch) {
    return branch_values(ep, background, eta)[branch] - eta;
}

}  // namespace

Eigen::VectorXd eigen_branches(const EffectivePotential& ep, const Eigen::MatrixXd& background,
                               double eta) {
    return branch_values(ep, background, eta);
}

std::vector<RootRecord> find_all_roots(const EffectivePotential& ep,
                                       const Eigen::MatrixXd& background) {
    // Interval endpoints, inset by twice the guard around every pole. rank_left
    // and rank_right are the ranks of the poles bounding each interval.
    struct Interval {
        double lower;
        double upper;
        Eigen::Index rank_left;
        Eigen::Index rank_right;
    };
    std::vector<Interval> intervals;
    const double inset = 2.0 * ep.pole_guard;
    double left = ep.bounds.lower;
    Eigen::Index rank_left = 0;
    for (const auto& p : ep.poles) {
        intervals.push_back({left, p.location - inset, rank_left, p.rank()});
        left = p.location + inset;
        rank_left = p.rank();
    }
    intervals.push_back({left, ep.bounds.upper, rank_left, 0});

    std::vector<RootRecord> roots;
    for (std::size_t iv = 0; iv < intervals.size(); ++iv) {
        const auto [a0, b0, rl, rr] = intervals[iv];
        if (!(b0 > a0)) continue;
        const Eigen::VectorXd fa = branch_values(ep, background, a0).array() - a0;
        const Eigen::VectorXd fb = branch_values(ep, background, b0).array() - b0;
        const Eigen::Index nb = fa.size();

        // lambda_k(eta) - eta is strictly decreasing inside the interval, so a
        // sign change is the only way a branch can hold an interior root. The
        // lowest rr branches diverge to -inf at the right pole and the highest
        // rl branches come from +inf at the left pole; each of those owns a root
        // even when it sits inside the guard band.
        for (Eigen::Index k = 0; k < nb; ++k) {
            double eta = 0.0;
            if (fa[k] > 0.0 && fb[k] <= 0.0) {
                double a = a0;
                double b = b0;
                double ga = fa[k];
                double gb = fb[k];
                for (int it = 0; it < 200; ++it) {
                    const double mid = 0.5 * (a + b);
                    if (mid <= a || mid >= b) break;
                    const double gm = branch_gap(ep, background, mid, k);
                    if (gm > 0.0) {
                        a = mid;
                        ga = gm;
                    } else {
                        b = mid;
                        gb = gm;
                    }
                }
                // Secant polish inside the final bracket.
                eta = std::abs(ga) < std::abs(gb) ? a : b;
                double best = std::min(std::abs(ga), std::abs(gb));
                if (gb != ga) {
                    const double s = std::clamp(a - ga * (b - a) / (gb - ga), a, b);
                    const double gs = branch_gap(ep, background, s, k);
                    if (std::abs(gs) < best) eta = s;
                }
            } else if (fa[k] > 0.0 && k < rr) {
                eta = b0;
            } else if (fa[k] <= 0.0 && k >= nb - rl) {
                eta = a0;
            } else {
                continue;
            }

            RootRecord root;
            root.eta = eta;
            root.branch = static_cast<std::size_t>(k);
            root.interval = iv;
            root.lower = a0;
            root.upper = b0;
            const Eigen::MatrixXd op = reduced_operator(ep, background, eta);
            auto eig = symmetric_eigen(op);
            root.psi0 = eig.vectors.col(k);
            root.residual = std::abs(eig.values[k] - eta);
            root.equation_residual = (op * root.psi0 - eta * root.psi0).norm();
            roots.push_back(std::move(root));
        }
    }
    std::stable_sort(roots.begin(), roots.end(),
                     [](const RootRecord& x, const RootRecord& y) { return x.eta < y.eta; });

    // Coincident roots of one interval take their vectors from a single
    // decomposition, so a degenerate level gets an orthonormal set.
    const double coincide = 1e-10 * ep.bounds.span();
    for (std::size_t i = 0; i < roots.size();) {
        std::size_t j = i + 1;
        while (j < roots.size() && roots[j].interval == roots[i].interval &&
               roots[j].eta - roots[j - 1].eta <= coincide) {
            ++j;
        }
        if (j - i > 1) {
            double eta = 0.0;
            for (std::size_t c = i; c < j; ++c) eta += roots[c].eta;
            eta /= static_cast<double>(j - i);
            const Eigen::MatrixXd op = reduced_operator(ep, background, eta);
            const auto eig = symmetric_eigen(op);
            for (std::size_t c = i; c < j; ++c) {
                const auto k = static_cast<Eigen::Index>(roots[c].branch);
                roots[c].psi0 = eig.vectors.col(k);
                roots[c].residual = std::abs(eig.values[k] - roots[c].eta);
                roots[c].equation_residual =
                    (op * roots[c].psi0 - roots[c].eta * roots[c].psi0).norm();
            }
        }
        i = j;
    }

    const std::size_t expected = static_cast<std::size_t>(background.rows()) + ep.pole_rank();
    if (roots.size() != expected) throw RootCountError(roots.size(), expected);
    return roots;
}

std::vector<double> reconciled_levels(const std::vector<RootRecord>& roots,
                                      const EffectivePotential& ep, double eps0) {
    std::vector<double> out;
    out.reserve(roots.size() + ep.decoupled_levels.size());
    for (const auto& r : roots) out.push_back(r.eta + eps0);
    for (double d : ep.decoupled_levels) out.push_back(d + eps0);
    std::sort(out.begin(), out.end());
    return out;
}

Eigen::VectorXd AssembledState::channel(std::size_t n) const {
    const auto nx = static_cast<Eigen::Index>(point_count);
    return state.segment(static_cast<Eigen::Index>(n) * nx, nx);
}

AssembledState make_state(const CoupledSystem& system, double eta, Eigen::VectorXd state) {
    AssembledState out;
    out.eta = eta;
    out.channel_count = system.channel_count();
    out.point_count = system.point_count();
    const auto nq = static_cast<Eigen::Index>(out.channel_count);
    const auto nx = static_cast<Eigen::Index>(out.point_count);
    const auto& grid = system.grid();

    const double norm = state.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        out.state = std::move(state);
        out.density = Eigen::MatrixXd::Zero(nq, nx);
        out.marginal = Eigen::VectorXd::Zero(nx);
        out.normalizable = false;
        return out;
    }
    state /= norm;
    canonicalize_sign(state);
    out.state = std::move(state);

    out.density.resize(nq, nx);
    double mass = 0.0;
    for (Eigen::Index n = 0; n < nq; ++n) {
        for (Eigen::Index k = 0; k < nx; ++k) {
            const double a = out.state[n * nx + k];
            out.density(n, k) = a * a;
            mass += grid.weights[k] * a * a;
        }
    }
    out.density /= mass;
    out.marginal = out.density.colwise().sum().transpose();
    out.centre = 0.0;
    for (Eigen::Index k = 0; k < nx; ++k) {
        out.centre += grid.weights[k] * out.marginal[k] * grid.points[k];
    }
    out.open_weight = out.state.head(nx).squaredNorm();
    return out;
}

AssembledState assemble_state(const CoupledSystem& system, const TruncatedSpectrum& truncated,
                              const RootRecord& root, double pole_guard) {
    const auto nq = static_cast<Eigen::Index>(system.channel_count());
    const auto nx = static_cast<Eigen::Index>(system.point_count());
    Eigen::VectorXd psi = Eigen::VectorXd::Zero(nq * nx);
    psi.head(nx) = root.psi0;

    bool near_pole = false;
    for (std::size_t k = 0; k < truncated.modes.size(); ++k) {
        const double overlap = mode_residue(system, truncated, k).dot(root.psi0);
        if (overlap == 0.0) continue;
        const double denom = root.eta - truncated.modes[k].pole;
        if (std::abs(denom) < pole_guard) {
            near_pole = true;
            continue;
        }
        psi.tail((nq - 1) * nx) += truncated.modes[k].vector * (overlap / denom);
    }
    AssembledState out = make_state(system, root.eta, std::move(psi));
    if (near_pole) out.normalizable = false;
    return out;
}

AssembledState assemble_state(const CoupledSystem& system, const TruncatedSpectrum& truncated,
                              const RootRecord& root) {
    return assemble_state(system, truncated, root,
                          EpOptions{}.pole_guard * spectral_bounds(system).span());
}

void orthonormalize_clusters(const CoupledSystem& system, std::vector<AssembledState>& states,
                             double tolerance) {
    std::vector<std::size_t> order(states.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return states[a].eta < states[b].eta;
    });
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i + 1;
        while (j < order.size() &&
               states[order[j]].eta - states[order[j - 1]].eta <= tolerance) {
            ++j;
        }
        const auto m = static_cast<Eigen::Index>(j - i);
        bool usable = m > 1;
        for (std::size_t c = i; c < j && usable; ++c) usable = states[order[c]].normalizable;
        if (usable) {
            Eigen::MatrixXd q(states[order[i]].state.size(), m);
            for (Eigen::Index c = 0; c < m; ++c) q.col(c) = states[order[i + c]].state;
            // Symmetric orthonormalization: Q S^{-1/2} with S = Q^T Q.
            const auto eig = symmetric_eigen(q.transpose() * q);
            if (eig.values.minCoeff() > 0.0) {
                const Eigen::MatrixXd inv_sqrt = eig.vectors *
                                                 eig.values.cwiseSqrt().cwiseInverse().asDiagonal() *
                                                 eig.vectors.transpose();
                const Eigen::MatrixXd fixed = q * inv_sqrt;
                for (Eigen::Index c = 0; c < m; ++c) {
                    auto& st = states[order[i + c]];
                    st = make_state(system, st.eta, fixed.col(c));
                }
            }
        }
        i = j;
    }
}

void localize_degenerate(const CoupledSystem& system, std::vector<AssembledState>& states,
                         double tolerance) {
    const auto nq = static_cast<Eigen::Index>(system.channel_count());
    const auto nx = static_cast<Eigen::Index>(system.point_count());
    Eigen::VectorXd position(nq * nx);
    for (Eigen::Index n = 0; n < nq; ++n) {
        for (Eigen::Index k = 0; k < nx; ++k) position[n * nx + k] = system.grid().points[k];
    }

    std::vector<std::size_t> order(states.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return states[a].eta < states[b].eta;
    });

    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i + 1;
        while (j < order.size() &&
               states[order[j]].eta - states[order[j - 1]].eta <= tolerance) {
            ++j;
        }
        const auto m = static_cast<Eigen::Index>(j - i);
        bool usable = m > 1;
        for (std::size_t c = i; c < j && usable; ++c) usable = states[order[c]].normalizable;
        if (usable) {
            Eigen::MatrixXd s(nq * nx, m);
            for (Eigen::Index c = 0; c < m; ++c) s.col(c) = states[order[i + c]].state;
            Eigen::HouseholderQR<Eigen::MatrixXd> qr(s);
            const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(nq * nx, m);
            const Eigen::MatrixXd x = q.transpose() * position.asDiagonal() * q;
            const auto eig = symmetric_eigen(0.5 * (x + x.transpose()));
            const Eigen::MatrixXd rotated = q * eig.vectors;
            for (Eigen::Index c = 0; c < m; ++c) {
                auto& st = states[order[i + c]];
                st = make_state(system, st.eta, rotated.col(c));
            }
        }
        i = j;
    }
}

}  // namespace mvep
