#include <cmath>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "mvep/config.hpp"
#include "mvep/error.hpp"
#include "mvep/model.hpp"

using namespace mvep;

namespace {

bool has_code(const std::vector<Diagnostic>& d, const std::string& code) {
    for (const auto& x : d)
        if (x.code == code) return true;
    return false;
}

SystemConfig gaussian_config() {
    SystemConfig c;
    c.grid.start = -2.0;
    c.grid.stop = 2.0;
    c.grid.count = 16;
    c.channels.energies = {0.0, 1.0, 2.5};
    c.background.kind = BackgroundKind::Laplacian;
    c.background.mass = 1.5;
    c.background.potential.kind = PotentialKind::Harmonic;
    c.background.potential.stiffness = 2.0;
    c.coupling.kind = KernelKind::Gaussian;
    c.coupling.strength = 0.6;
    c.coupling.form_factors = {1.0, 0.7, 0.4};
    c.coupling.center = 0.3;
    c.coupling.width = 0.8;
    return c;
}

}  // namespace

TEST(Model, D1TableConfig) {
    SystemConfig c;
    c.grid.points = {0.0};
    c.channels.energies = {0.0, 1.0};
    c.background.kind = BackgroundKind::Table;
    c.background.table = Eigen::MatrixXd::Zero(1, 1);
    c.coupling.kind = KernelKind::Table;
    c.coupling.tables.push_back({0, 1, Eigen::MatrixXd::Constant(1, 1, 0.5)});
    const auto s = build_system(c);
    EXPECT_EQ(s.channel_count(), 2u);
    EXPECT_EQ(s.point_count(), 1u);
    EXPECT_EQ(s.dimension(), 2u);
    EXPECT_EQ(s.coupling(0, 1)(0, 0), 0.5);
    EXPECT_EQ(s.coupling(1, 0)(0, 0), 0.5);
    EXPECT_EQ(s.coupling(0, 0)(0, 0), 0.0);
    EXPECT_EQ(s.coupling(1, 1)(0, 0), 0.0);
    EXPECT_DOUBLE_EQ(s.channels().relative_energy(1), 1.0);
    EXPECT_TRUE(validate(s).empty());
}

TEST(Model, ZeroStrengthGivesZeroCouplings) {
    auto c = gaussian_config();
    c.coupling.strength = 0.0;
    const auto s = build_system(c);
    for (const auto& v : s.couplings()) EXPECT_EQ(v.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Model, GaussianKernelMatchesClosedForm) {
    const auto c = gaussian_config();
    const auto s = build_system(c);
    const double h = 4.0 / 15.0;
    ASSERT_EQ(s.point_count(), 16u);
    for (std::size_t a = 0; a < 3; ++a) {
        for (std::size_t b = 0; b < 3; ++b) {
            const auto& v = s.coupling(a, b);
            for (int i = 0; i < 16; ++i) {
                const double xi = -2.0 + h * i;
                const double d = xi - 0.3;
                const double expect = 0.6 * c.coupling.form_factors[a] *
                                      c.coupling.form_factors[b] * std::exp(-d * d / (2 * 0.64));
                EXPECT_NEAR(v(i, i), expect, 1e-12);
                for (int j = 0; j < 16; ++j)
                    if (j != i) EXPECT_EQ(v(i, j), 0.0);
            }
        }
    }
    // Background: finite-difference kinetic term plus the harmonic potential.
    const double t = 1.0 / (2.0 * 1.5 * h * h);
    for (int i = 0; i < 16; ++i) {
        const double xi = -2.0 + h * i;
        EXPECT_NEAR(s.background()(i, i), 2 * t + xi * xi, 1e-12);
        if (i + 1 < 16) EXPECT_NEAR(s.background()(i, i + 1), -t, 1e-12);
    }
    EXPECT_TRUE(validate(s).empty());
}

TEST(Model, OpenChannelReordering) {
    auto c = gaussian_config();
    c.channels.energies = {2.0, -1.0, 0.5};
    c.channels.labels = {"a", "b", "c"};
    const auto s = build_system(c);
    EXPECT_EQ(s.channels().labels[0], "b");
    EXPECT_EQ(s.channels().energies[0], -1.0);
    EXPECT_EQ(s.channels().energies[1], 2.0);
    EXPECT_NEAR(s.coupling(0, 1)(0, 0) / s.coupling(1, 1)(0, 0), 0.7 / 1.0, 1e-12);

    c.channels.open_channel = 2;
    const auto s2 = build_system(c);
    EXPECT_EQ(s2.channels().labels[0], "c");
}

TEST(Model, UniformGridWeights) {
    auto c = gaussian_config();
    const auto s = build_system(c);
    for (double w : s.grid().weights) EXPECT_NEAR(w, 4.0 / 15.0, 1e-15);
}

TEST(Model, ValidateReportsProblems) {
    GridSpec grid{{0.0, 1.0}, {1.0, -1.0}, "xi"};
    ChannelSet ch{{0.0, 1.0}, {}};
    Eigen::MatrixXd h(2, 2);
    h << 0, 1, 2, 0;
    Eigen::MatrixXd z = Eigen::MatrixXd::Zero(2, 2);
    Eigen::MatrixXd v(2, 2);
    v << 1, 2, 3, 4;
    CoupledSystem s(grid, ch, h, {z, v, v, z});
    const auto d = validate(s);
    EXPECT_TRUE(has_code(d, "grid-weights"));
    EXPECT_TRUE(has_code(d, "background-symmetry"));
    EXPECT_TRUE(has_code(d, "coupling-symmetry"));
}

TEST(Model, ValidateGridOrderAndFinite) {
    GridSpec grid{{1.0, 0.0}, {1.0, 1.0}, "xi"};
    ChannelSet ch{{0.0, NAN}, {}};
    Eigen::MatrixXd z = Eigen::MatrixXd::Zero(2, 2);
    CoupledSystem s(grid, ch, z, {z, z, z, z});
    const auto d = validate(s);
    EXPECT_TRUE(has_code(d, "grid-order"));
    EXPECT_TRUE(has_code(d, "channel-energy"));
}

TEST(Model, CouplingOutOfRangeThrows) {
    const auto s = fixtures::d1();
    EXPECT_THROW(s.coupling(2, 0), ModelError);
}

TEST(Model, BuildRejectsBadInput) {
    auto c = gaussian_config();
    c.coupling.form_factors = {1.0, 2.0};
    EXPECT_THROW(build_system(c), ModelError);

    c = gaussian_config();
    c.coupling.width = 0.0;
    EXPECT_THROW(build_system(c), ModelError);

    c = gaussian_config();
    c.grid.count = 0;
    EXPECT_THROW(build_system(c), ModelError);

    c = gaussian_config();
    c.grid = {};
    c.grid.points = {0.0, 0.5, 2.0};
    EXPECT_THROW(build_system(c), ModelError);  // laplacian on a non-uniform grid

    c = gaussian_config();
    c.channels.energies.clear();
    EXPECT_THROW(build_system(c), ModelError);
}

TEST(Model, AsymmetricTablesRejected) {
    SystemConfig c;
    c.grid.points = {0.0, 1.0};
    c.channels.energies = {0.0, 1.0};
    c.coupling.kind = KernelKind::Table;
    Eigen::MatrixXd a(2, 2);
    a << 1, 2, 3, 4;
    c.coupling.tables.push_back({0, 1, a});
    c.coupling.tables.push_back({1, 0, a});
    EXPECT_THROW(build_system(c), ModelError);

    c.coupling.tables.pop_back();
    c.coupling.tables.push_back({1, 1, a});
    EXPECT_THROW(build_system(c), ModelError);
}

TEST(Config, RoundTrip) {
    const auto c = gaussian_config();
    const auto j = to_json(c);
    const auto back = parse_system_config(j);
    const auto s1 = build_system(c);
    const auto s2 = build_system(back);
    EXPECT_EQ(s1.background(), s2.background());
    for (std::size_t i = 0; i < s1.couplings().size(); ++i)
        EXPECT_EQ(s1.couplings()[i], s2.couplings()[i]);
}

TEST(Config, UnknownKeysAndKindsRejected) {
    auto j = nlohmann::json::parse(R"({"grid": {"points": [0]}, "channels": {"energies": [0, 1]},
                                       "coupling": {"kind": "spiral"}})");
    EXPECT_THROW(parse_system_config(j), ConfigError);
    j = nlohmann::json::parse(R"({"grid": {"points": [0], "colour": 1},
                                  "channels": {"energies": [0, 1]}})");
    EXPECT_THROW(parse_system_config(j), ConfigError);
}

TEST(Config, MalformedFileRejected) {
    EXPECT_THROW(load_run_config(std::string(MVEP_SOURCE_DIR) + "/tests/data/malformed.json"),
                 ConfigError);
}

TEST(Config, ShippedConfigsBuild) {
    for (const char* name : {"d1", "d1_uncoupled", "gaussian16", "double_well"}) {
        const auto rc =
            load_run_config(std::string(MVEP_SOURCE_DIR) + "/configs/" + name + ".json");
        ASSERT_TRUE(rc.system.has_value()) << name;
        const auto s = build_system(*rc.system);
        EXPECT_TRUE(validate(s).empty()) << name;
    }
}
