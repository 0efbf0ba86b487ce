#include "mvep/realisations.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "mvep/error.hpp"

namespace mvep {

GroupingPolicy GroupingPolicy::parse(const std::string& text) {
    if (text == "elementary") return elementary();
    const std::string prefix = "cluster:";
    if (text.rfind(prefix, 0) == 0) {
        std::size_t used = 0;
        double delta = 0.0;
        try {
            delta = std::stod(text.substr(prefix.size()), &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != text.size() - prefix.size() || !(delta >= 0.0) ||
            !std::isfinite(delta)) {
            throw RealisationError("invalid cluster distance in policy '" + text + "'");
        }
        return cluster(delta);
    }
    throw RealisationError("unknown grouping policy '" + text + "'");
}

std::string GroupingPolicy::to_string() const {
    if (kind == Kind::Elementary) return "elementary";
    char buf[64];
    std::snprintf(buf, sizeof buf, "cluster:%.17g", delta);
    return buf;
}

std::size_t RealisationSet::total() const noexcept {
    return std::accumulate(member_counts.begin(), member_counts.end(), std::size_t{0});
}

RealisationSet group_realisations(std::span<const double> centres, const GroupingPolicy& policy) {
    const std::size_t n = centres.size();
    std::vector<std::vector<std::size_t>> groups;
    if (policy.kind == GroupingPolicy::Kind::Elementary) {
        for (std::size_t i = 0; i < n; ++i) groups.push_back({i});
    } else {
        // Single linkage along the sorted centroids.
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return centres[a] < centres[b]; });
        for (std::size_t i = 0; i < n; ++i) {
            if (i == 0 || centres[order[i]] - centres[order[i - 1]] > policy.delta) {
                groups.emplace_back();
            }
            groups.back().push_back(order[i]);
        }
        for (auto& g : groups) std::sort(g.begin(), g.end());
        std::sort(groups.begin(), groups.end(),
                  [](const auto& a, const auto& b) { return a.front() < b.front(); });
    }

    RealisationSet set;
    set.groups = std::move(groups);
    for (const auto& g : set.groups) {
        set.member_counts.push_back(g.size());
        double c = 0.0;
        for (std::size_t i : g) c += centres[i];
        set.centres.push_back(c / static_cast<double>(g.size()));
        set.alpha_counting.push_back(static_cast<double>(g.size()) / static_cast<double>(n));
    }
    set.complexity = set.groups.empty() ? 0.0 : complexity(set.groups.size());
    return set;
}

RealisationSet group_realisations(std::span<const AssembledState> states,
                                  const GroupingPolicy& policy) {
    std::vector<double> centres;
    centres.reserve(states.size());
    for (const auto& s : states) centres.push_back(s.centre);
    return group_realisations(centres, policy);
}

Eigen::VectorXd ProjectionCoefficients::normalized_weights() const {
    return coefficients.array().square() / total_weight;
}

Eigen::VectorXd uniform_reference(const CoupledSystem& system) {
    const auto d = static_cast<Eigen::Index>(system.dimension());
    return Eigen::VectorXd::Constant(d, 1.0 / std::sqrt(static_cast<double>(d)));
}

Eigen::VectorXd equal_weight_reference(std::span<const AssembledState> states) {
    if (states.empty()) throw RealisationError("no states to build a reference from");
    Eigen::VectorXd r = Eigen::VectorXd::Zero(states.front().state.size());
    for (const auto& s : states) r += s.state;
    const double norm = r.norm();
    if (!(norm > 0.0)) throw RealisationError("equal-weight reference vanishes");
    return r / norm;
}

ProjectionCoefficients project_states(std::span<const AssembledState> states,
                                      const Eigen::VectorXd& reference) {
    ProjectionCoefficients out;
    const double rn = reference.norm();
    if (!(rn > 0.0) || !std::isfinite(rn)) throw RealisationError("reference state has zero norm");
    out.reference = reference / rn;
    out.coefficients.resize(static_cast<Eigen::Index>(states.size()));
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (states[i].state.size() != out.reference.size()) {
            throw RealisationError("reference dimension does not match the states");
        }
        out.coefficients[static_cast<Eigen::Index>(i)] = states[i].state.dot(out.reference);
    }
    out.total_weight = out.coefficients.squaredNorm();
    if (!(out.total_weight > 1e-28)) {
        throw RealisationError("reference is orthogonal to every realisation");
    }
    return out;
}

std::vector<double> born_probabilities(RealisationSet& set,
                                       const ProjectionCoefficients& projection) {
    const Eigen::VectorXd w = projection.normalized_weights();
    std::vector<double> alpha;
    alpha.reserve(set.groups.size());
    for (const auto& g : set.groups) {
        double a = 0.0;
        for (std::size_t i : g) a += w[static_cast<Eigen::Index>(i)];
        alpha.push_back(a);
    }
    set.alpha_born = alpha;
    return alpha;
}

Eigen::MatrixXd expectation_density(const RealisationSet& set, std::span<const double> alpha,
                                    std::span<const AssembledState> states) {
    if (alpha.size() != set.groups.size()) {
        throw RealisationError("probability list does not match the group count");
    }
    if (states.empty()) throw RealisationError("no states");
    Eigen::MatrixXd rho = Eigen::MatrixXd::Zero(states.front().density.rows(),
                                                states.front().density.cols());
    for (std::size_t r = 0; r < set.groups.size(); ++r) {
        const auto& g = set.groups[r];
        Eigen::MatrixXd group = Eigen::MatrixXd::Zero(rho.rows(), rho.cols());
        for (std::size_t i : g) group += states[i].density;
        rho += alpha[r] * group / static_cast<double>(g.size());
    }
    return rho;
}

double complexity(std::size_t realisation_count) {
    if (realisation_count == 0) throw RealisationError("complexity of an empty realisation set");
    return std::log(static_cast<double>(realisation_count));
}

double complexity(const RealisationSet& set) { return complexity(set.size()); }

std::string to_string(Regime regime) {
    switch (regime) {
        case Regime::UniformChaos:
            return "uniform-chaos";
        case Regime::SelfOrganisedCriticality:
            return "soc";
        case Regime::Intermediate:
            return "intermediate";
    }
    return "unknown";
}

double normalized_entropy(std::span<const double> alpha) {
    if (alpha.size() <= 1) return 1.0;
    double h = 0.0;
    for (double a : alpha) {
        if (a > 0.0) h -= a * std::log(a);
    }
    return h / std::log(static_cast<double>(alpha.size()));
}

Regime classify_regime(std::span<const double> alpha, const RegimeThresholds& thresholds) {
    if (alpha.empty()) throw RealisationError("cannot classify an empty probability list");
    const double max_alpha = *std::max_element(alpha.begin(), alpha.end());
    if (max_alpha >= thresholds.soc_max_alpha) return Regime::SelfOrganisedCriticality;
    const double cap = std::min(thresholds.uniform_max_alpha_factor /
                                    static_cast<double>(alpha.size()),
                                thresholds.uniform_max_alpha);
    if (max_alpha <= cap && normalized_entropy(alpha) >= thresholds.uniform_min_entropy) {
        return Regime::UniformChaos;
    }
    return Regime::Intermediate;
}

}  // namespace mvep
