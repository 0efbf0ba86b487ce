#include "mvep/beat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <boost/math/distributions/chi_squared.hpp>

#include "mvep/error.hpp"

namespace mvep {

namespace {

// 53-bit uniform in [0, 1); spelled out so trajectories do not depend on the
// standard library's distribution implementations.
double next_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t draw(std::mt19937_64& rng, std::span<const double> weights) {
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    const double u = next_uniform(rng) * total;
    double acc = 0.0;
    std::size_t last = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0.0) continue;
        acc += weights[i];
        last = i;
        if (u < acc) return i;
    }
    return last;
}

}  // namespace

std::vector<double> BeatTrajectory::frequencies() const {
    std::vector<double> f(counts.size(), 0.0);
    if (indices.empty()) return f;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        f[i] = static_cast<double>(counts[i]) / static_cast<double>(indices.size());
    }
    return f;
}

void validate(const BeatConfig& config) {
    if (config.alpha.empty()) throw BeatError("empty probability list");
    if (config.centres.size() != config.alpha.size()) {
        throw BeatError(std::to_string(config.centres.size()) + " centres for " +
                        std::to_string(config.alpha.size()) + " probabilities");
    }
    double sum = 0.0;
    for (double a : config.alpha) {
        if (!std::isfinite(a) || a < 0.0) throw BeatError("negative or non-finite probability");
        sum += a;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        throw BeatError("probabilities sum to " + std::to_string(sum) + ", not 1");
    }
    for (double c : config.centres) {
        if (!std::isfinite(c)) throw BeatError("non-finite centre");
    }
    if (config.steps < 1) throw BeatError("steps must be at least 1");
    if (!(config.period > 0.0) || !std::isfinite(config.period)) {
        throw BeatError("period must be positive");
    }
    if (!(config.action_quantum > 0.0) || !std::isfinite(config.action_quantum)) {
        throw BeatError("action quantum must be positive");
    }
    if (!std::isfinite(config.initial_action)) throw BeatError("non-finite initial action");
}

BeatTrajectory simulate(const BeatConfig& config) {
    validate(config);
    std::mt19937_64 rng(config.seed);

    BeatTrajectory out;
    const std::size_t n = config.steps;
    out.indices.reserve(n);
    out.times.reserve(n);
    out.positions.reserve(n);
    out.actions.reserve(n);
    out.counts.assign(config.alpha.size(), 0);

    std::size_t current = 0;
    for (std::size_t k = 1; k <= n; ++k) {
        std::size_t next = 0;
        if (config.kernel && k > 1) {
            const auto w = config.kernel(current);
            if (w.size() != config.alpha.size()) {
                throw BeatError("jump kernel returned the wrong number of weights");
            }
            next = draw(rng, w);
        } else {
            next = draw(rng, config.alpha);
        }
        current = next;
        const double kd = static_cast<double>(k);
        out.indices.push_back(next);
        out.times.push_back(kd * config.period);
        out.positions.push_back(config.centres[next]);
        out.actions.push_back(config.initial_action - kd * config.action_quantum);
        ++out.counts[next];
    }
    return out;
}

DriftDiffusion drift_and_diffusion(const BeatTrajectory& trajectory) {
    const std::size_t n = trajectory.positions.size();
    if (n < 2) throw BeatError("drift and diffusion need at least two steps");
    DriftDiffusion out;
    out.drift = std::accumulate(trajectory.positions.begin(), trajectory.positions.end(), 0.0) /
                static_cast<double>(n);
    double ss = 0.0;
    for (double x : trajectory.positions) ss += (x - out.drift) * (x - out.drift);
    out.variance = ss / static_cast<double>(n);
    return out;
}

DriftDiffusion expected_moments(std::span<const double> alpha, std::span<const double> centres) {
    if (alpha.size() != centres.size()) throw BeatError("alpha and centres differ in length");
    DriftDiffusion out;
    for (std::size_t i = 0; i < alpha.size(); ++i) out.drift += alpha[i] * centres[i];
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        out.variance += alpha[i] * (centres[i] - out.drift) * (centres[i] - out.drift);
    }
    return out;
}

ChiSquareReport frequency_test(const BeatTrajectory& trajectory, std::span<const double> alpha,
                               double confidence) {
    if (alpha.size() != trajectory.counts.size()) {
        throw BeatError("alpha does not match the trajectory's centre count");
    }
    if (!(confidence > 0.0 && confidence < 1.0)) throw BeatError("confidence must be in (0, 1)");
    ChiSquareReport report;
    report.confidence = confidence;
    const auto n = static_cast<double>(trajectory.steps());
    const auto freq = trajectory.frequencies();

    std::size_t support = 0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        report.deviations.push_back(freq[i] - alpha[i]);
        const double observed = static_cast<double>(trajectory.counts[i]);
        if (alpha[i] <= 0.0) {
            if (observed > 0.0) report.statistic = std::numeric_limits<double>::infinity();
            continue;
        }
        ++support;
        const double expected = n * alpha[i];
        report.statistic += (observed - expected) * (observed - expected) / expected;
    }
    report.degrees_of_freedom = support > 0 ? support - 1 : 0;

    if (std::isinf(report.statistic)) {
        report.p_value = 0.0;
        report.passed = false;
        return report;
    }
    if (report.degrees_of_freedom == 0) {
        report.critical_value = 0.0;
        report.p_value = 1.0;
        report.passed = report.statistic == 0.0;
        return report;
    }
    const boost::math::chi_squared_distribution<double> dist(
        static_cast<double>(report.degrees_of_freedom));
    report.critical_value = boost::math::quantile(dist, confidence);
    report.p_value = boost::math::cdf(boost::math::complement(dist, report.statistic));
    report.passed = report.statistic < report.critical_value;
    return report;
}

}  // namespace mvep
