#include "mvep/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "mvep/error.hpp"

namespace mvep {

CoupledSystem::CoupledSystem(GridSpec grid, ChannelSet channels, Eigen::MatrixXd background,
                             std::vector<Eigen::MatrixXd> couplings)
    : grid_(std::move(grid)),
      channels_(std::move(channels)),
      background_(std::move(background)),
      couplings_(std::move(couplings)) {}

const Eigen::MatrixXd& CoupledSystem::coupling(std::size_t n, std::size_t np) const {
    const std::size_t nq = channel_count();
    if (n >= nq || np >= nq || couplings_.size() != nq * nq) {
        throw ModelError("coupling index (" + std::to_string(n) + ", " + std::to_string(np) +
                         ") out of range");
    }
    return couplings_[n * nq + np];
}

double kernel_profile(const KernelConfig& kernel, double xi) {
    const double d = xi - kernel.center;
    switch (kernel.kind) {
        case KernelKind::Gaussian:
            return std::exp(-0.5 * d * d / (kernel.width * kernel.width));
        case KernelKind::Box:
            return std::abs(d) <= kernel.width ? 1.0 : 0.0;
        case KernelKind::Table:
            break;
    }
    return 0.0;
}

namespace {

bool all_finite(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

GridSpec make_grid(const GridConfig& config) {
    GridSpec grid;
    grid.label = config.label;
    if (!config.points.empty()) {
        grid.points = config.points;
        grid.weights = config.weights.empty() ? std::vector<double>(config.points.size(), 1.0)
                                              : config.weights;
        if (grid.weights.size() != grid.points.size()) {
            throw ModelError("inconsistent-dimensions: grid has " +
                             std::to_string(grid.points.size()) + " points but " +
                             std::to_string(grid.weights.size()) + " weights");
        }
        return grid;
    }
    if (config.count == 0) {
        throw ModelError("inconsistent-dimensions: grid needs at least one point");
    }
    if (!std::isfinite(config.start) || !std::isfinite(config.stop)) {
        throw ModelError("non-finite grid extent");
    }
    const std::size_t n = config.count;
    grid.points.resize(n);
    if (n == 1) {
        grid.points[0] = config.start;
        grid.weights.assign(1, 1.0);
        return grid;
    }
    const double h = (config.stop - config.start) / static_cast<double>(n - 1);
    for (std::size_t k = 0; k < n; ++k) {
        grid.points[k] = config.start + h * static_cast<double>(k);
    }
    grid.weights.assign(n, h);
    return grid;
}

// Permutation that puts the open channel first and keeps the others in order.
std::vector<std::size_t> channel_order(const ChannelConfig& config) {
    const std::size_t nq = config.energies.size();
    std::size_t open = 0;
    if (config.open_channel) {
        open = *config.open_channel;
        if (open >= nq) {
            throw ModelError("inconsistent-dimensions: open channel " + std::to_string(open) +
                             " out of range");
        }
    } else {
        open = static_cast<std::size_t>(
            std::min_element(config.energies.begin(), config.energies.end()) -
            config.energies.begin());
    }
    std::vector<std::size_t> order{open};
    for (std::size_t n = 0; n < nq; ++n) {
        if (n != open) order.push_back(n);
    }
    return order;
}

double potential_at(const PotentialConfig& p, std::size_t k, double xi) {
    switch (p.kind) {
        case PotentialKind::None:
            return 0.0;
        case PotentialKind::Harmonic:
            return 0.5 * p.stiffness * xi * xi;
        case PotentialKind::DoubleWell: {
            const double s = xi / p.half_separation;
            return p.depth * (s * s - 1.0) * (s * s - 1.0);
        }
        case PotentialKind::Table:
            return p.values.at(k);
    }
    return 0.0;
}

Eigen::MatrixXd make_background(const BackgroundConfig& config, const GridSpec& grid) {
    const auto n = static_cast<Eigen::Index>(grid.size());
    if (config.kind == BackgroundKind::Table) {
        if (config.table.rows() != n || config.table.cols() != n) {
            throw ModelError("inconsistent-dimensions: background table is " +
                             std::to_string(config.table.rows()) + "x" +
                             std::to_string(config.table.cols()) + ", grid has " +
                             std::to_string(n) + " points");
        }
        if (!config.table.allFinite()) throw ModelError("non-finite background table entry");
        return config.table;
    }

    const auto& pot = config.potential;
    if (pot.kind == PotentialKind::Table && pot.values.size() != grid.size()) {
        throw ModelError("inconsistent-dimensions: potential table length " +
                         std::to_string(pot.values.size()) + " does not match grid");
    }
    if (!std::isfinite(pot.stiffness) || !std::isfinite(pot.depth) ||
        !std::isfinite(pot.half_separation) || pot.half_separation == 0.0 ||
        !all_finite(pot.values)) {
        throw ModelError("non-finite potential parameter");
    }

    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    if (config.kind == BackgroundKind::Laplacian && n > 1) {
        if (!std::isfinite(config.mass) || config.mass <= 0.0) {
            throw ModelError("laplacian mass must be positive and finite");
        }
        const double spacing = grid.points[1] - grid.points[0];
        for (Eigen::Index k = 1; k + 1 < n; ++k) {
            const double s = grid.points[k + 1] - grid.points[k];
            if (std::abs(s - spacing) > 1e-9 * std::abs(spacing)) {
                throw ModelError("laplacian background requires a uniform grid");
            }
        }
        const double t = 1.0 / (2.0 * config.mass * spacing * spacing);
        for (Eigen::Index k = 0; k < n; ++k) {
            h(k, k) = 2.0 * t;
            if (k + 1 < n) {
                h(k, k + 1) = -t;
                h(k + 1, k) = -t;
            }
        }
    }
    for (Eigen::Index k = 0; k < n; ++k) {
        h(k, k) += potential_at(pot, static_cast<std::size_t>(k), grid.points[k]);
    }
    return h;
}

std::vector<Eigen::MatrixXd> make_couplings(const KernelConfig& kernel, const GridSpec& grid,
                                            const std::vector<std::size_t>& order) {
    const std::size_t nq = order.size();
    const auto nx = static_cast<Eigen::Index>(grid.size());
    std::vector<Eigen::MatrixXd> v(nq * nq, Eigen::MatrixXd::Zero(nx, nx));

    // old channel index -> new channel index
    std::vector<std::size_t> position(nq);
    for (std::size_t i = 0; i < nq; ++i) position[order[i]] = i;

    if (kernel.kind == KernelKind::Table) {
        std::vector<bool> seen(nq * nq, false);
        for (const auto& t : kernel.tables) {
            if (t.from >= nq || t.to >= nq) {
                throw ModelError("inconsistent-dimensions: coupling table (" +
                                 std::to_string(t.from) + ", " + std::to_string(t.to) +
                                 ") references a missing channel");
            }
            if (t.matrix.rows() != nx || t.matrix.cols() != nx) {
                throw ModelError("inconsistent-dimensions: coupling table (" +
                                 std::to_string(t.from) + ", " + std::to_string(t.to) +
                                 ") is not " + std::to_string(nx) + "x" + std::to_string(nx));
            }
            if (!t.matrix.allFinite()) throw ModelError("non-finite coupling table entry");
            const std::size_t a = position[t.from];
            const std::size_t b = position[t.to];
            const std::size_t ab = a * nq + b;
            const std::size_t ba = b * nq + a;
            if (seen[ab]) {
                throw ModelError("coupling table (" + std::to_string(t.from) + ", " +
                                 std::to_string(t.to) + ") given twice");
            }
            if (seen[ba] && v[ba].transpose() != t.matrix) {
                throw ModelError("coupling-symmetry: table (" + std::to_string(t.from) + ", " +
                                 std::to_string(t.to) + ") is not the transpose of its partner");
            }
            v[ab] = t.matrix;
            seen[ab] = true;
            if (!seen[ba]) v[ba] = t.matrix.transpose();
        }
        return v;
    }

    if (!std::isfinite(kernel.strength) || !std::isfinite(kernel.center) ||
        !std::isfinite(kernel.width) || !all_finite(kernel.form_factors)) {
        throw ModelError("non-finite kernel parameter");
    }
    if (kernel.width <= 0.0) throw ModelError("kernel width must be positive");
    std::vector<double> f = kernel.form_factors;
    if (f.empty()) f.assign(nq, 1.0);
    if (f.size() != nq) {
        throw ModelError("inconsistent-dimensions: " + std::to_string(f.size()) +
                         " form factors for " + std::to_string(nq) + " channels");
    }
    Eigen::VectorXd profile(nx);
    for (Eigen::Index k = 0; k < nx; ++k) profile[k] = kernel_profile(kernel, grid.points[k]);

    for (std::size_t a = 0; a < nq; ++a) {
        for (std::size_t b = a; b < nq; ++b) {
            const double amp = kernel.strength * (f[order[a]] * f[order[b]]);
            v[a * nq + b] = (amp * profile).asDiagonal();
            v[b * nq + a] = v[a * nq + b];
        }
    }
    return v;
}

}  // namespace

CoupledSystem build_system(const SystemConfig& config) {
    GridSpec grid = make_grid(config.grid);

    const auto& ch = config.channels;
    if (ch.energies.empty()) throw ModelError("inconsistent-dimensions: no channels");
    if (!all_finite(ch.energies)) throw ModelError("non-finite channel energy");
    if (!ch.labels.empty() && ch.labels.size() != ch.energies.size()) {
        throw ModelError("inconsistent-dimensions: " + std::to_string(ch.labels.size()) +
                         " labels for " + std::to_string(ch.energies.size()) + " channels");
    }
    const auto order = channel_order(ch);
    ChannelSet channels;
    for (std::size_t n : order) {
        channels.energies.push_back(ch.energies[n]);
        channels.labels.push_back(ch.labels.empty() ? "ch" + std::to_string(n) : ch.labels[n]);
    }

    Eigen::MatrixXd background = make_background(config.background, grid);
    auto couplings = make_couplings(config.coupling, grid, order);

    CoupledSystem system(std::move(grid), std::move(channels), std::move(background),
                         std::move(couplings));
    const auto report = validate(system);
    if (!report.empty()) {
        std::ostringstream os;
        os << report.front().code << ": " << report.front().message;
        if (report.size() > 1) os << " (+" << report.size() - 1 << " more)";
        throw ModelError(os.str());
    }
    return system;
}

std::vector<Diagnostic> validate(const CoupledSystem& system) {
    std::vector<Diagnostic> out;
    const auto& grid = system.grid();
    const std::size_t nx = grid.size();
    const std::size_t nq = system.channel_count();

    if (nx == 0) out.push_back({"grid-empty", "grid has no points"});
    if (grid.weights.size() != nx) {
        out.push_back({"grid-weights", "weights length " + std::to_string(grid.weights.size()) +
                                           " differs from points length " + std::to_string(nx)});
    }
    for (std::size_t k = 1; k < nx; ++k) {
        if (!(grid.points[k] > grid.points[k - 1])) {
            out.push_back({"grid-order", "grid points not strictly increasing at index " +
                                             std::to_string(k)});
            break;
        }
    }
    for (std::size_t k = 0; k < grid.weights.size(); ++k) {
        if (!(grid.weights[k] > 0.0) || !std::isfinite(grid.weights[k])) {
            out.push_back({"grid-weights", "weight " + std::to_string(k) + " is not positive"});
            break;
        }
    }
    if (!all_finite(grid.points)) out.push_back({"grid-finite", "non-finite grid point"});

    if (nq == 0) out.push_back({"channels-empty", "no channels"});
    if (!system.channels().labels.empty() && system.channels().labels.size() != nq) {
        out.push_back({"channel-labels", "label count differs from channel count"});
    }
    if (!all_finite(system.channels().energies)) {
        out.push_back({"channel-energy", "non-finite channel energy"});
    }

    const auto n = static_cast<Eigen::Index>(nx);
    const auto& h = system.background();
    if (h.rows() != n || h.cols() != n) {
        out.push_back({"background-shape", "background operator is " + std::to_string(h.rows()) +
                                               "x" + std::to_string(h.cols())});
    } else {
        if (!h.allFinite()) out.push_back({"background-finite", "non-finite background entry"});
        if (h != h.transpose()) {
            out.push_back({"background-symmetry", "background operator is not symmetric"});
        }
    }

    const auto& v = system.couplings();
    if (v.size() != nq * nq) {
        out.push_back({"coupling-count", std::to_string(v.size()) + " coupling blocks for " +
                                             std::to_string(nq) + " channels"});
        return out;
    }
    for (std::size_t a = 0; a < nq; ++a) {
        for (std::size_t b = 0; b < nq; ++b) {
            const auto& m = v[a * nq + b];
            const std::string name = "V(" + std::to_string(a) + "," + std::to_string(b) + ")";
            if (m.rows() != n || m.cols() != n) {
                out.push_back({"coupling-shape", name + " is " + std::to_string(m.rows()) + "x" +
                                                     std::to_string(m.cols())});
                continue;
            }
            if (!m.allFinite()) out.push_back({"coupling-finite", name + " has non-finite entries"});
            if (b < a) continue;
            const auto& partner = v[b * nq + a];
            if (partner.rows() == n && partner.cols() == n && m != partner.transpose()) {
                out.push_back({"coupling-symmetry", name + " is not the transpose of V(" +
                                                        std::to_string(b) + "," +
                                                        std::to_string(a) + ")"});
            }
        }
    }
    return out;
}

}  // namespace mvep
