#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "mvep/config.hpp"
#include "mvep/error.hpp"
#include "mvep/pipeline.hpp"

using namespace mvep;
namespace fs = std::filesystem;

namespace {

fs::path config_path(const std::string& name) {
    return fs::path(MVEP_SOURCE_DIR) / "configs" / name;
}

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("mvep_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Pipeline, SolveD1) {
    const auto out = scratch("d1");
    const auto rc = load_run_config(config_path("d1.json"));
    const auto o = run_solve(rc, out);
    EXPECT_TRUE(o.ok);
    EXPECT_EQ(o.report["roots"]["count"], 2);
    EXPECT_NEAR(o.report["realisations"]["complexity"].get<double>(), std::log(2.0), 1e-15);
    for (const char* f : {"system.csv", "spectrum_full.csv", "spectrum_truncated.csv", "roots.csv",
                          "densities.csv", "realisations.csv", "expectation_density.csv",
                          "report.json"})
        EXPECT_TRUE(fs::exists(out / f)) << f;
    EXPECT_NE(slurp(out / "roots.csv").find("index,eta,energy"), std::string::npos);
}

TEST(Pipeline, UncoupledHasZeroComplexity) {
    const auto rc = load_run_config(config_path("d1_uncoupled.json"));
    const auto o = run_solve(rc, scratch("d1u"));
    EXPECT_TRUE(o.ok);
    EXPECT_EQ(o.report["roots"]["count"], 1);
    EXPECT_EQ(o.report["roots"]["decoupled_levels"], 1);
    EXPECT_EQ(o.report["realisations"]["complexity"].get<double>(), 0.0);
}

TEST(Pipeline, SolveWithoutSystemFails) {
    RunConfig rc;
    EXPECT_THROW(run_solve(rc, scratch("nosys")), ConfigError);
}

TEST(Pipeline, CompareLevels) {
    Eigen::VectorXd full(3);
    full << -2.0, 0.0, 4.0;
    const auto a = compare_levels({-2.0, 1e-8, 4.0}, full);
    EXPECT_TRUE(a.count_match());
    EXPECT_NEAR(a.max_relative, 2.5e-9, 1e-20);
    const auto b = compare_levels({-2.0, 4.0}, full);
    EXPECT_FALSE(b.count_match());
}

TEST(Pipeline, TrialSeedsAreIndependent) {
    EXPECT_NE(trial_seed(1, 0), trial_seed(1, 1));
    EXPECT_NE(trial_seed(1, 0), trial_seed(2, 0));
    EXPECT_EQ(trial_seed(5, 3), trial_seed(5, 3));
}

TEST(Pipeline, VerifyCampaign) {
    VerifyOptions v;
    v.trials = 20;
    v.seed = 77;
    const auto trials = verify_campaign(v, {});
    ASSERT_EQ(trials.size(), 20u);
    for (const auto& t : trials) {
        EXPECT_TRUE(t.passed) << t.trial << ": " << t.message;
        EXPECT_EQ(t.roots, t.channels * t.points);
        EXPECT_LE(t.max_relative, 1e-8);
    }
    const auto replay = verify_trial(13, v, {});
    EXPECT_EQ(replay.seed, trials[13].seed);
    EXPECT_EQ(replay.max_relative, trials[13].max_relative);
}

TEST(Pipeline, FaultInjectionIsNamed) {
    RunConfig rc;
    rc.verify.trials = 6;
    rc.verify.seed = 3;
    rc.verify.fault_trial = 4;
    const auto o = run_verify(rc, scratch("fault"));
    EXPECT_FALSE(o.ok);
    const auto& failures = o.report["verify"]["failures"];
    ASSERT_EQ(failures.size(), 1u);
    EXPECT_EQ(failures[0]["trial"], 4);
}

TEST(Pipeline, VerifyArtifactsRepeat) {
    RunConfig rc;
    rc.verify.trials = 10;
    rc.verify.seed = 5;
    const auto a = scratch("verify_a");
    const auto b = scratch("verify_b");
    EXPECT_TRUE(run_verify(rc, a).ok);
    EXPECT_TRUE(run_verify(rc, b).ok);
    EXPECT_EQ(slurp(a / "trials.csv"), slurp(b / "trials.csv"));
}

TEST(Pipeline, SimulateArtifactsRepeat) {
    auto rc = load_run_config(config_path("d1.json"));
    rc.simulation.steps = 2000;
    const auto a = scratch("sim_a");
    const auto b = scratch("sim_b");
    const auto oa = run_simulate(rc, a);
    run_simulate(rc, b);
    EXPECT_TRUE(oa.report["checks"]["action_ledger"].get<bool>());
    for (const char* f : {"trajectory.csv", "frequencies.csv", "roots.csv", "realisations.csv"})
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    rc.simulation.seed += 1;
    const auto c = scratch("sim_c");
    run_simulate(rc, c);
    EXPECT_NE(slurp(a / "trajectory.csv"), slurp(c / "trajectory.csv"));
}

TEST(Pipeline, BeatConfigFromSolve) {
    const auto rc = load_run_config(config_path("d1.json"));
    const auto r = solve_system(build_system(*rc.system), rc.realisations);
    SimulationOptions sim;
    sim.estimator = Estimator::Counting;
    const auto bc = beat_config(r, sim);
    EXPECT_EQ(bc.alpha, (std::vector<double>{0.5, 0.5}));
    sim.estimator = Estimator::Born;
    EXPECT_EQ(beat_config(r, sim).alpha, r.realisations.alpha_born);
}

TEST(Pipeline, Digest) {
    EXPECT_EQ(digest(""), "cbf29ce484222325");
    EXPECT_EQ(digest("a"), "af63dc4c8601ec8c");
}

TEST(Pipeline, SolvedStatesOrthonormalAndAccurate) {
    const auto rc = load_run_config(config_path("double_well.json"));
    const auto r = solve_system(build_system(*rc.system), rc.realisations);
    const auto n = static_cast<Eigen::Index>(r.states.size());
    Eigen::MatrixXd s(r.states.front().state.size(), n);
    for (Eigen::Index i = 0; i < n; ++i) s.col(i) = r.states[static_cast<std::size_t>(i)].state;
    EXPECT_LE((s.transpose() * s - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-13);

    // Each state lies in the oracle eigenspace of its level.
    const double e0 = r.system.channels().energies[0];
    const double window = 1e-4 * r.ep.bounds.span();
    for (Eigen::Index i = 0; i < n; ++i) {
        const double e = r.states[static_cast<std::size_t>(i)].eta + e0;
        double captured = 0.0;
        for (Eigen::Index j = 0; j < r.full.eigenvalues.size(); ++j) {
            if (std::abs(r.full.eigenvalues[j] - e) <= window) {
                const double c = r.full.eigenvectors.col(j).dot(s.col(i));
                captured += c * c;
            }
        }
        EXPECT_NEAR(captured, 1.0, 1e-9) << "state " << i;
    }
}
