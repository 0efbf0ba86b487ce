#include "mvep/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "mvep/error.hpp"

namespace mvep {

using nlohmann::json;

namespace {

void expect_object(const json& j, const std::string& where, std::set<std::string> allowed) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [key, _] : j.items()) {
        if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

template <typename T>
T get(const json& j, const std::string& key, const std::string& where) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback, const std::string& where) {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    return get<T>(j, key, where);
}

Eigen::MatrixXd parse_matrix(const json& j, const std::string& where) {
    if (!j.is_array()) throw ConfigError(where + " must be an array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    if (rows == 0) return {};
    if (!j.front().is_array()) throw ConfigError(where + " must be an array of rows");
    const auto cols = static_cast<Eigen::Index>(j.front().size());
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
            throw ConfigError(where + " has ragged rows");
        }
        for (Eigen::Index c = 0; c < cols; ++c) {
            const auto& v = row[static_cast<std::size_t>(c)];
            if (!v.is_number()) throw ConfigError(where + " has a non-numeric entry");
            m(r, c) = v.get<double>();
        }
    }
    return m;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

GridConfig parse_grid(const json& j) {
    const std::string w = "system.grid";
    expect_object(j, w, {"points", "weights", "start", "stop", "count", "label"});
    GridConfig g;
    g.label = get_or<std::string>(j, "label", "xi", w);
    g.weights = get_or<std::vector<double>>(j, "weights", {}, w);
    if (j.contains("points") && j.at("points").is_array()) {
        g.points = get<std::vector<double>>(j, "points", w);
        if (g.points.empty()) throw ConfigError(w + ".points is empty");
        return g;
    }
    g.start = get<double>(j, "start", w);
    g.stop = get<double>(j, "stop", w);
    if (j.contains("points")) {
        g.count = get<std::size_t>(j, "points", w);
    } else {
        g.count = get<std::size_t>(j, "count", w);
    }
    return g;
}

PotentialConfig parse_potential(const json& j) {
    const std::string w = "system.background.potential";
    expect_object(j, w, {"kind", "stiffness", "depth", "half_separation", "values"});
    PotentialConfig p;
    const auto kind = get_or<std::string>(j, "kind", "none", w);
    if (kind == "none") {
        p.kind = PotentialKind::None;
    } else if (kind == "harmonic") {
        p.kind = PotentialKind::Harmonic;
    } else if (kind == "double_well") {
        p.kind = PotentialKind::DoubleWell;
    } else if (kind == "table") {
        p.kind = PotentialKind::Table;
    } else {
        throw ConfigError(w + ".kind: unknown potential '" + kind + "'");
    }
    p.stiffness = get_or<double>(j, "stiffness", 1.0, w);
    p.depth = get_or<double>(j, "depth", 1.0, w);
    p.half_separation = get_or<double>(j, "half_separation", 1.0, w);
    p.values = get_or<std::vector<double>>(j, "values", {}, w);
    return p;
}

BackgroundConfig parse_background(const json& j) {
    const std::string w = "system.background";
    expect_object(j, w, {"kind", "mass", "potential", "matrix"});
    BackgroundConfig b;
    const auto kind = get_or<std::string>(j, "kind", "zero", w);
    if (kind == "zero") {
        b.kind = BackgroundKind::Zero;
    } else if (kind == "laplacian") {
        b.kind = BackgroundKind::Laplacian;
    } else if (kind == "table") {
        b.kind = BackgroundKind::Table;
        if (!j.contains("matrix")) throw ConfigError(w + ".matrix is required for kind 'table'");
        b.table = parse_matrix(j.at("matrix"), w + ".matrix");
    } else {
        throw ConfigError(w + ".kind: unknown background '" + kind + "'");
    }
    b.mass = get_or<double>(j, "mass", 1.0, w);
    if (j.contains("potential")) b.potential = parse_potential(j.at("potential"));
    return b;
}

KernelConfig parse_kernel(const json& j) {
    const std::string w = "system.coupling";
    expect_object(j, w, {"kind", "strength", "form_factors", "center", "width", "tables"});
    KernelConfig k;
    const auto kind = get<std::string>(j, "kind", w);
    if (kind == "gaussian") {
        k.kind = KernelKind::Gaussian;
    } else if (kind == "box") {
        k.kind = KernelKind::Box;
    } else if (kind == "table") {
        k.kind = KernelKind::Table;
    } else {
        throw ConfigError(w + ".kind: unknown kernel '" + kind + "'");
    }
    k.strength = get_or<double>(j, "strength", 0.0, w);
    k.form_factors = get_or<std::vector<double>>(j, "form_factors", {}, w);
    k.center = get_or<double>(j, "center", 0.0, w);
    k.width = get_or<double>(j, "width", 1.0, w);
    if (j.contains("tables")) {
        const auto& tables = j.at("tables");
        if (!tables.is_array()) throw ConfigError(w + ".tables must be an array");
        for (std::size_t i = 0; i < tables.size(); ++i) {
            const std::string tw = w + ".tables[" + std::to_string(i) + "]";
            expect_object(tables[i], tw, {"from", "to", "matrix", "diagonal"});
            CouplingTable t;
            t.from = get<std::size_t>(tables[i], "from", tw);
            t.to = get<std::size_t>(tables[i], "to", tw);
            if (tables[i].contains("matrix")) {
                t.matrix = parse_matrix(tables[i].at("matrix"), tw + ".matrix");
            } else if (tables[i].contains("diagonal")) {
                const auto d = get<std::vector<double>>(tables[i], "diagonal", tw);
                t.matrix = Eigen::Map<const Eigen::VectorXd>(d.data(),
                                                             static_cast<Eigen::Index>(d.size()))
                               .asDiagonal();
            } else {
                throw ConfigError(tw + " needs 'matrix' or 'diagonal'");
            }
            k.tables.push_back(std::move(t));
        }
    }
    if (k.kind == KernelKind::Table && k.tables.empty() && j.contains("strength")) {
        throw ConfigError(w + ": table kernels take 'tables', not 'strength'");
    }
    return k;
}

std::string kind_name(PotentialKind k) {
    switch (k) {
        case PotentialKind::None: return "none";
        case PotentialKind::Harmonic: return "harmonic";
        case PotentialKind::DoubleWell: return "double_well";
        case PotentialKind::Table: return "table";
    }
    return "none";
}

std::string kind_name(BackgroundKind k) {
    switch (k) {
        case BackgroundKind::Zero: return "zero";
        case BackgroundKind::Laplacian: return "laplacian";
        case BackgroundKind::Table: return "table";
    }
    return "zero";
}

std::string kind_name(KernelKind k) {
    switch (k) {
        case KernelKind::Gaussian: return "gaussian";
        case KernelKind::Box: return "box";
        case KernelKind::Table: return "table";
    }
    return "gaussian";
}

}  // namespace

SystemConfig parse_system_config(const json& j) {
    expect_object(j, "system", {"grid", "channels", "background", "coupling"});
    SystemConfig c;
    if (!j.contains("grid")) throw ConfigError("system.grid is required");
    if (!j.contains("channels")) throw ConfigError("system.channels is required");
    if (!j.contains("coupling")) throw ConfigError("system.coupling is required");
    c.grid = parse_grid(j.at("grid"));

    const auto& ch = j.at("channels");
    expect_object(ch, "system.channels", {"energies", "labels", "open_channel"});
    c.channels.energies = get<std::vector<double>>(ch, "energies", "system.channels");
    c.channels.labels = get_or<std::vector<std::string>>(ch, "labels", {}, "system.channels");
    if (ch.contains("open_channel") && !ch.at("open_channel").is_null()) {
        c.channels.open_channel = get<std::size_t>(ch, "open_channel", "system.channels");
    }
    if (j.contains("background")) c.background = parse_background(j.at("background"));
    c.coupling = parse_kernel(j.at("coupling"));
    return c;
}

json to_json(const SystemConfig& c) {
    json j;
    json grid;
    grid["label"] = c.grid.label;
    if (!c.grid.points.empty()) {
        grid["points"] = c.grid.points;
        if (!c.grid.weights.empty()) grid["weights"] = c.grid.weights;
    } else {
        grid["start"] = c.grid.start;
        grid["stop"] = c.grid.stop;
        grid["count"] = c.grid.count;
    }
    j["grid"] = grid;

    json ch;
    ch["energies"] = c.channels.energies;
    if (!c.channels.labels.empty()) ch["labels"] = c.channels.labels;
    if (c.channels.open_channel) ch["open_channel"] = *c.channels.open_channel;
    j["channels"] = ch;

    json bg;
    bg["kind"] = kind_name(c.background.kind);
    bg["mass"] = c.background.mass;
    if (c.background.kind == BackgroundKind::Table) bg["matrix"] = matrix_to_json(c.background.table);
    const auto& p = c.background.potential;
    bg["potential"] = {{"kind", kind_name(p.kind)},
                       {"stiffness", p.stiffness},
                       {"depth", p.depth},
                       {"half_separation", p.half_separation}};
    if (!p.values.empty()) bg["potential"]["values"] = p.values;
    j["background"] = bg;

    json k;
    k["kind"] = kind_name(c.coupling.kind);
    if (c.coupling.kind == KernelKind::Table) {
        json tables = json::array();
        for (const auto& t : c.coupling.tables) {
            tables.push_back({{"from", t.from}, {"to", t.to}, {"matrix", matrix_to_json(t.matrix)}});
        }
        k["tables"] = tables;
    } else {
        k["strength"] = c.coupling.strength;
        k["center"] = c.coupling.center;
        k["width"] = c.coupling.width;
        if (!c.coupling.form_factors.empty()) k["form_factors"] = c.coupling.form_factors;
    }
    j["coupling"] = k;
    return j;
}

RunConfig parse_run_config(const json& j) {
    if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
    if (!j.contains("system") && (j.contains("grid") || j.contains("channels"))) {
        RunConfig rc;
        rc.system = parse_system_config(j);
        return rc;
    }
    expect_object(j, "config", {"system", "realisations", "simulation", "verify", "tolerances"});
    RunConfig rc;
    if (j.contains("system")) rc.system = parse_system_config(j.at("system"));

    if (j.contains("realisations")) {
        const auto& r = j.at("realisations");
        const std::string w = "realisations";
        expect_object(r, w, {"policy", "reference", "thresholds"});
        rc.realisations.policy = GroupingPolicy::parse(get_or<std::string>(r, "policy", "elementary", w));
        const auto ref = get_or<std::string>(r, "reference", "uniform", w);
        if (ref == "uniform") {
            rc.realisations.reference = ReferenceKind::Uniform;
        } else if (ref == "equal-weight") {
            rc.realisations.reference = ReferenceKind::EqualWeight;
        } else {
            throw ConfigError(w + ".reference: unknown reference '" + ref + "'");
        }
        if (r.contains("thresholds")) {
            const auto& t = r.at("thresholds");
            const std::string tw = w + ".thresholds";
            expect_object(t, tw, {"soc_max_alpha", "uniform_min_entropy",
                                  "uniform_max_alpha_factor", "uniform_max_alpha"});
            auto& th = rc.realisations.thresholds;
            th.soc_max_alpha = get_or<double>(t, "soc_max_alpha", th.soc_max_alpha, tw);
            th.uniform_min_entropy = get_or<double>(t, "uniform_min_entropy", th.uniform_min_entropy, tw);
            th.uniform_max_alpha_factor =
                get_or<double>(t, "uniform_max_alpha_factor", th.uniform_max_alpha_factor, tw);
            th.uniform_max_alpha = get_or<double>(t, "uniform_max_alpha", th.uniform_max_alpha, tw);
        }
    }

    if (j.contains("simulation")) {
        const auto& s = j.at("simulation");
        const std::string w = "simulation";
        expect_object(s, w, {"steps", "seed", "period", "action_quantum", "initial_action",
                             "estimator", "confidence"});
        auto& o = rc.simulation;
        o.steps = get_or<std::size_t>(s, "steps", o.steps, w);
        o.seed = get_or<std::uint64_t>(s, "seed", o.seed, w);
        o.period = get_or<double>(s, "period", o.period, w);
        o.action_quantum = get_or<double>(s, "action_quantum", o.action_quantum, w);
        o.initial_action = get_or<double>(s, "initial_action", o.initial_action, w);
        o.confidence = get_or<double>(s, "confidence", o.confidence, w);
        const auto est = get_or<std::string>(s, "estimator", "born", w);
        if (est == "born") {
            o.estimator = Estimator::Born;
        } else if (est == "counting") {
            o.estimator = Estimator::Counting;
        } else {
            throw ConfigError(w + ".estimator: unknown estimator '" + est + "'");
        }
    }

    if (j.contains("verify")) {
        const auto& v = j.at("verify");
        const std::string w = "verify";
        expect_object(v, w, {"trials", "seed", "min_channels", "max_channels", "min_points",
                             "max_points", "coupling_scale", "energy_spread", "min_pole_gap",
                             "fault_trial"});
        auto& o = rc.verify;
        o.trials = get_or<std::size_t>(v, "trials", o.trials, w);
        o.seed = get_or<std::uint64_t>(v, "seed", o.seed, w);
        o.bounds.min_channels = get_or<std::size_t>(v, "min_channels", o.bounds.min_channels, w);
        o.bounds.max_channels = get_or<std::size_t>(v, "max_channels", o.bounds.max_channels, w);
        o.bounds.min_points = get_or<std::size_t>(v, "min_points", o.bounds.min_points, w);
        o.bounds.max_points = get_or<std::size_t>(v, "max_points", o.bounds.max_points, w);
        o.bounds.coupling_scale = get_or<double>(v, "coupling_scale", o.bounds.coupling_scale, w);
        o.bounds.energy_spread = get_or<double>(v, "energy_spread", o.bounds.energy_spread, w);
        o.bounds.min_pole_gap = get_or<double>(v, "min_pole_gap", o.bounds.min_pole_gap, w);
        if (v.contains("fault_trial") && !v.at("fault_trial").is_null()) {
            o.fault_trial = get<std::size_t>(v, "fault_trial", w);
        }
    }

    if (j.contains("tolerances")) {
        const auto& t = j.at("tolerances");
        expect_object(t, "tolerances", {"oracle_relative"});
        rc.tolerances.oracle_relative =
            get_or<double>(t, "oracle_relative", rc.tolerances.oracle_relative, "tolerances");
        if (!(rc.tolerances.oracle_relative > 0.0)) {
            throw ConfigError("tolerances.oracle_relative must be positive");
        }
    }
    return rc;
}

json to_json(const RunConfig& c) {
    json j;
    if (c.system) j["system"] = to_json(*c.system);
    const auto& r = c.realisations;
    j["realisations"] = {
        {"policy", r.policy.to_string()},
        {"reference", r.reference == ReferenceKind::Uniform ? "uniform" : "equal-weight"},
        {"thresholds",
         {{"soc_max_alpha", r.thresholds.soc_max_alpha},
          {"uniform_min_entropy", r.thresholds.uniform_min_entropy},
          {"uniform_max_alpha_factor", r.thresholds.uniform_max_alpha_factor},
          {"uniform_max_alpha", r.thresholds.uniform_max_alpha}}}};
    const auto& s = c.simulation;
    j["simulation"] = {{"steps", s.steps},
                       {"seed", s.seed},
                       {"period", s.period},
                       {"action_quantum", s.action_quantum},
                       {"initial_action", s.initial_action},
                       {"estimator", s.estimator == Estimator::Born ? "born" : "counting"},
                       {"confidence", s.confidence}};
    const auto& v = c.verify;
    j["verify"] = {{"trials", v.trials},
                   {"seed", v.seed},
                   {"min_channels", v.bounds.min_channels},
                   {"max_channels", v.bounds.max_channels},
                   {"min_points", v.bounds.min_points},
                   {"max_points", v.bounds.max_points},
                   {"coupling_scale", v.bounds.coupling_scale},
                   {"energy_spread", v.bounds.energy_spread},
                   {"min_pole_gap", v.bounds.min_pole_gap}};
    if (v.fault_trial) j["verify"]["fault_trial"] = *v.fault_trial;
    j["tolerances"] = {{"oracle_relative", c.tolerances.oracle_relative}};
    return j;
}

json load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

RunConfig load_run_config(const std::filesystem::path& path) {
    return parse_run_config(load_json(path));
}

}  // namespace mvep
