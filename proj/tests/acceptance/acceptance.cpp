// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
// Usage: acceptance [path-to-mvep-cli]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mvep/beat.hpp"
#include "mvep/config.hpp"
#include "mvep/ep_solver.hpp"
#include "mvep/kinematics.hpp"
#include "mvep/pipeline.hpp"
#include "mvep/random_system.hpp"

namespace fs = std::filesystem;
using namespace mvep;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool passed = false;
    std::string detail;
};

double seconds(Clock::time_point since) {
    return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("mvep_acceptance_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

// Compares every CSV in two run directories byte for byte.
bool same_csvs(const fs::path& a, const fs::path& b, std::size_t& compared) {
    compared = 0;
    std::vector<fs::path> names;
    for (const auto& e : fs::directory_iterator(a))
        if (e.path().extension() == ".csv") names.push_back(e.path().filename());
    std::size_t other = 0;
    for (const auto& e : fs::directory_iterator(b))
        if (e.path().extension() == ".csv") ++other;
    if (names.empty() || names.size() != other) return false;
    for (const auto& n : names) {
        if (!fs::exists(b / n) || slurp(a / n) != slurp(b / n)) return false;
        ++compared;
    }
    return true;
}

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

const double electron_mass = 9.1093837015e-31;  // kg

// 1. Reduced roots reproduce the full spectrum on random systems.
Outcome reduction_exactness() {
    const auto start = Clock::now();
    VerifyOptions v;
    v.trials = 100;
    v.seed = 2024;
    v.bounds = RandomSystemBounds{};  // N_q in [2,6], N_xi in [2,12], gap >= 1e-6 span
    const auto trials = verify_campaign(v, Tolerances{1e-8});
    double worst = 0.0;
    std::size_t good = 0;
    for (const auto& t : trials) {
        worst = std::max(worst, t.max_relative);
        if (t.passed && t.roots == t.channels * t.points && t.decoupled == 0 &&
            t.max_relative <= 1e-8)
            ++good;
    }
    const double wall = seconds(start);
    return {good == 100 && wall <= 30.0,
            std::to_string(good) + "/100 trials, max rel dev " + fmt("%.3g", worst) +
                " (tol 1e-8), " + fmt("%.2f", wall) + " s (limit 30 s)"};
}

// 2. D1 roots and the zero-coupling limit.
Outcome multivaluedness_onset() {
    auto rc = load_run_config(fs::path(MVEP_SOURCE_DIR) / "configs" / "d1.json");
    const auto r = solve_system(build_system(*rc.system), rc.realisations);
    const double lo = (1.0 - std::sqrt(2.0)) / 2.0;
    const double hi = (1.0 + std::sqrt(2.0)) / 2.0;
    bool ok = r.roots.size() == 2 && std::abs(r.roots[0].eta - lo) <= 1e-10 &&
              std::abs(r.roots[1].eta - hi) <= 1e-10;
    std::string detail = "D1 roots " + std::to_string(r.roots.size());
    if (r.roots.size() == 2) {
        detail += " err " + fmt("%.2g", std::abs(r.roots[0].eta - lo)) + "," +
                  fmt("%.2g", std::abs(r.roots[1].eta - hi));
    }

    rc.system->coupling.tables.clear();
    const auto u = solve_system(build_system(*rc.system), rc.realisations);
    ok = ok && u.roots.size() == 1 && u.realisations.complexity == 0.0;
    detail += "; uncoupled roots " + std::to_string(u.roots.size()) + " C=" +
              fmt("%.3g", u.realisations.complexity);
    return {ok, detail};
}

// 3. Both estimators sum to one; equal-weight reference matches counting.
Outcome probability_laws() {
    double worst_sum = 0.0;
    double worst_agree = 0.0;
    std::size_t systems = 0;
    auto check = [&](const CoupledSystem& s, const GroupingPolicy& policy) {
        for (auto ref : {ReferenceKind::Uniform, ReferenceKind::EqualWeight}) {
            RealisationOptions opt;
            opt.policy = policy;
            opt.reference = ref;
            const auto r = solve_system(s, opt);
            worst_sum = std::max({worst_sum, std::abs(sum(r.realisations.alpha_counting) - 1.0),
                                  std::abs(sum(r.realisations.alpha_born) - 1.0)});
            if (ref == ReferenceKind::EqualWeight &&
                policy.kind == GroupingPolicy::Kind::Elementary) {
                for (std::size_t i = 0; i < r.realisations.size(); ++i)
                    worst_agree = std::max(worst_agree, std::abs(r.realisations.alpha_born[i] -
                                                                 r.realisations.alpha_counting[i]));
            }
        }
        ++systems;
    };
    for (const char* name : {"d1.json", "gaussian16.json", "double_well.json"}) {
        const auto rc = load_run_config(fs::path(MVEP_SOURCE_DIR) / "configs" / name);
        const auto s = build_system(*rc.system);
        check(s, GroupingPolicy::elementary());
        check(s, GroupingPolicy::cluster(0.25));
    }
    std::mt19937_64 rng(99);
    for (int i = 0; i < 50; ++i) {
        const auto s = random_system(rng);
        check(s, GroupingPolicy::elementary());
        check(s, GroupingPolicy::cluster(0.5));
    }
    return {worst_sum <= 1e-12 && worst_agree <= 1e-12,
            std::to_string(systems) + " solves, max |sum-1| " + fmt("%.2g", worst_sum) +
                ", max |born-counting| " + fmt("%.2g", worst_agree) + " (tol 1e-12)"};
}

// 4. Frequencies pass chi-square in >= 97 of 100 seeds; exact action ledger.
Outcome beat_statistics() {
    const auto rc = load_run_config(fs::path(MVEP_SOURCE_DIR) / "configs" / "double_well.json");
    RealisationOptions opt;
    opt.policy = GroupingPolicy::cluster(1.0);
    const auto solved = solve_system(build_system(*rc.system), opt);
    SimulationOptions sim;
    sim.steps = 100000;
    auto bc = beat_config(solved, sim);

    const auto start = Clock::now();
    std::size_t passed = 0;
    bool ledger = true;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        bc.seed = seed;
        const auto t = simulate(bc);
        if (frequency_test(t, bc.alpha, 0.999).passed) ++passed;
        double previous = bc.initial_action;
        for (double a : t.actions) {
            if (previous - a != bc.action_quantum) ledger = false;
            previous = a;
        }
    }
    const double wall = seconds(start);
    return {passed >= 97 && ledger && wall <= 10.0,
            std::to_string(passed) + "/100 seeds pass at 99.9% (" +
                std::to_string(bc.alpha.size()) + " centres, need 97), ledger " +
                (ledger ? "exact" : "broken") + ", " + fmt("%.2f", wall) + " s (limit 10 s)"};
}

// 5. Kinematic identities across a 1000-point velocity sweep.
Outcome kinematics_identities() {
    const auto start = Clock::now();
    const auto states = sweep(electron_mass, linspace(0.01, 0.999, 1000));
    double worst = 0.0;
    for (const auto& s : states) {
        const auto r = identity_residuals(s);
        worst = std::max({worst, r.partition, r.time_product, r.action_balance, r.dispersion});
    }
    const double wall = seconds(start);
    return {states.size() == 1000 && worst <= 1e-12 && wall <= 1.0,
            "max rel residual " + fmt("%.2g", worst) + " (tol 1e-12), " + fmt("%.4f", wall) +
                " s (limit 1 s)"};
}

// 6. Electron rest frequency.
Outcome electron_frequency() {
    const double codata = electron_mass * 299792458.0 * 299792458.0 / 6.62607015e-34;
    const double nu0 = derive(electron_mass, 0.0).rest_frequency;
    const double vs_codata = std::abs(nu0 - codata) / codata;
    const double vs_stated = std::abs(1.2356e20 - codata) / codata;
    const bool order = std::floor(std::log10(nu0)) == 20.0;
    return {vs_codata <= 1e-3 && vs_stated <= 1e-3 && order,
            "nu0 = " + fmt("%.10g", nu0) + " Hz, rel to CODATA " + fmt("%.2g", vs_codata) +
                ", 1.2356e20 within " + fmt("%.2g", vs_stated) + " (tol 1e-3), order 1e" +
                fmt("%.0f", std::floor(std::log10(nu0)))};
}

// 7. Repeat runs give byte-identical CSV artifacts.
Outcome reproducibility(const std::string& cli) {
    const fs::path configs = fs::path(MVEP_SOURCE_DIR) / "configs";
    std::size_t files = 0;
    std::size_t n = 0;
    bool ok = true;

    const auto verify_rc = load_run_config(configs / "verify.json");
    const auto va = scratch("verify_a");
    const auto vb = scratch("verify_b");
    run_verify(verify_rc, va);
    run_verify(verify_rc, vb);
    ok = ok && same_csvs(va, vb, n);
    files += n;

    auto sim_rc = load_run_config(configs / "d1.json");
    const auto sa = scratch("simulate_a");
    const auto sb = scratch("simulate_b");
    run_simulate(sim_rc, sa);
    run_simulate(sim_rc, sb);
    ok = ok && same_csvs(sa, sb, n);
    files += n;

    std::string detail = "library: " + std::to_string(files) + " CSVs identical";
    if (!cli.empty()) {
        std::size_t cli_files = 0;
        for (const auto& [cmd, cfg] : {std::pair{"verify", "verify.json"},
                                       std::pair{"simulate", "double_well.json"}}) {
            const auto a = scratch(std::string("cli_") + cmd + "_a");
            const auto b = scratch(std::string("cli_") + cmd + "_b");
            for (const auto& dir : {a, b}) {
                const std::string line = "\"" + cli + "\" " + cmd + " --config \"" +
                                         (configs / cfg).string() + "\" --out \"" +
                                         dir.string() + "\" > /dev/null";
                if (std::system(line.c_str()) != 0) ok = false;
            }
            ok = ok && same_csvs(a, b, n);
            cli_files += n;
        }
        detail += "; cli: " + std::to_string(cli_files) + " CSVs identical";
    }
    return {ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
    const std::string cli = argc > 1 ? argv[1] : "";
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"reduction-exactness", reduction_exactness},
        {"multivaluedness-onset", multivaluedness_onset},
        {"probability-laws", probability_laws},
        {"beat-statistics", beat_statistics},
        {"kinematics-identities", kinematics_identities},
        {"electron-frequency", electron_frequency},
        {"reproducibility", [&] { return reproducibility(cli); }},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.passed) ++failures;
        std::printf("[%s] %zu %s: %s\n", o.passed ? "PASS" : "FAIL", i + 1,
                    criteria[i].first.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
                criteria.size());
    return failures == 0 ? 0 : 1;
}
