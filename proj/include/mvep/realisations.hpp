#pragma once

// Grouping of roots into realisations, the two probability estimators
// (member counting and squared projections), the expectation density, the
// complexity measure and the regime classification.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mvep/ep_solver.hpp"

namespace mvep {

struct GroupingPolicy {
    enum class Kind { Elementary, Cluster };
    Kind kind = Kind::Elementary;
    double delta = 0.0;  // cluster: merge centroids closer than delta (grid coordinate units)

    static GroupingPolicy elementary() { return {}; }
    static GroupingPolicy cluster(double delta) { return {Kind::Cluster, delta}; }
    // "elementary" or "cluster:<delta>"
    static GroupingPolicy parse(const std::string& text);
    std::string to_string() const;
};

struct RealisationSet {
    std::vector<std::vector<std::size_t>> groups;  // root indices, ascending
    std::vector<std::size_t> member_counts;        // N_r
    std::vector<double> centres;
    std::vector<double> alpha_counting;  // N_r / N
    std::vector<double> alpha_born;      // empty until born probabilities are attached
    double complexity = 0.0;

    std::size_t total() const noexcept;  // number of elementary realisations
    std::size_t size() const noexcept { return groups.size(); }
};

// Groups are ordered by their smallest member index.
RealisationSet group_realisations(std::span<const double> centres, const GroupingPolicy& policy);
RealisationSet group_realisations(std::span<const AssembledState> states,
                                  const GroupingPolicy& policy);

struct ProjectionCoefficients {
    Eigen::VectorXd coefficients;  // c_i = <Psi_i, reference>
    Eigen::VectorXd reference;
    double total_weight = 0.0;     // sum |c_i|^2 before normalization

    // |c_i|^2 / total_weight
    Eigen::VectorXd normalized_weights() const;
};

// Uniform unit vector over the full (n, xi) space.
Eigen::VectorXd uniform_reference(const CoupledSystem& system);
// Normalized equal-weight superposition of the given states.
Eigen::VectorXd equal_weight_reference(std::span<const AssembledState> states);

// Throws RealisationError when the reference is orthogonal to every state.
ProjectionCoefficients project_states(std::span<const AssembledState> states,
                                      const Eigen::VectorXd& reference);

// alpha_r = sum_{i in r} |c_i|^2 / sum_i |c_i|^2; stores the result in set.alpha_born.
std::vector<double> born_probabilities(RealisationSet& set,
                                       const ProjectionCoefficients& projection);

// sum_r alpha_r rho_r with rho_r the mean density of the members of group r.
Eigen::MatrixXd expectation_density(const RealisationSet& set, std::span<const double> alpha,
                                    std::span<const AssembledState> states);

// ln(number of realisations): zero only for a single realisation.
double complexity(std::size_t realisation_count);
double complexity(const RealisationSet& set);

enum class Regime { UniformChaos, SelfOrganisedCriticality, Intermediate };
std::string to_string(Regime regime);

struct RegimeThresholds {
    double soc_max_alpha = 0.5;          // SOC when max alpha >= this
    double uniform_min_entropy = 0.9;    // normalized entropy H / ln N
    double uniform_max_alpha_factor = 3.0;  // max alpha <= factor / N ...
    double uniform_max_alpha = 0.25;        // ... and <= this absolute cap
};

// Shannon entropy divided by ln N (1 for a single entry).
double normalized_entropy(std::span<const double> alpha);

Regime classify_regime(std::span<const double> alpha, const RegimeThresholds& thresholds = {});

}  // namespace mvep
