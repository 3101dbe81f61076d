// scenario.hpp — strict JSON scenario files.  Units are encoded in key names
// (_GHz, _MHz, _us, _ns) and converted to internal angular rad/ns exactly once,
// here.  Unknown keys are rejected with their JSON path.

#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mist/csv.hpp"
#include "mist/errors.hpp"
#include "mist/fluxonium.hpp"
#include "mist/units.hpp"

namespace mist {

using nlohmann::json;

struct SweepSpec {
    double start_mhz = 0.0;
    double stop_mhz = 0.0;
    int count = 0;

    std::vector<double> grid_rad() const {
        std::vector<double> g;
        g.reserve(count);
        for (int i = 0; i < count; ++i)
            g.push_back(mhz_to_rad(start_mhz +
                                   (stop_mhz - start_mhz) * i / (count - 1)));
        return g;
    }
};

struct Scenario {
    FluxoniumSpec qubit;

    double omega_r = 0.0;  // rad/ns
    double omega_d = 0.0;
    double g = 0.0;
    double kappa = 0.0;    // 1/ns
    std::optional<double> epsilon_d;          // rad/ns
    std::optional<SweepSpec> epsilon_sweep;
    std::optional<SweepSpec> delta_a_sweep;

    int resonance_k = 2;
    std::optional<Index> h_level;

    Index n_max = 100;
    Index j_max = 4;
    Index sw_levels = 12;

    double t_end_ns = 5000.0;
    double dt_ns = 2.5;
    std::vector<std::string> models{"reduced"};
    std::uint64_t seed = 1234;
    int trajectories = 0;  // 0 = resolved by scale policy

    std::string out_dir = "out";
    bool entanglement = false;
    bool plots = false;

    std::string hash;  // FNV-1a of the raw file bytes

    double epsilon_d_required(const char* who) const {
        if (!epsilon_d)
            throw ScenarioError(std::string(who) + ": scenario needs circuit.epsilon_d_MHz");
        return *epsilon_d;
    }
    std::vector<double> epsilon_grid_required(const char* who) const {
        if (epsilon_sweep) return epsilon_sweep->grid_rad();
        if (epsilon_d) return {*epsilon_d};
        throw ScenarioError(std::string(who) +
                            ": scenario needs circuit.epsilon_d_MHz or epsilon_d_sweep_MHz");
    }
};

namespace scenario_detail {

inline void require_keys(const json& obj, const std::string& path,
                         const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw ScenarioError(path + ": expected a JSON object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ScenarioError(path + "." + it.key() + ": unknown key (strict mode)");
}

inline double get_number(const json& obj, const std::string& path, const std::string& key) {
    if (!obj.contains(key)) throw ScenarioError(path + "." + key + ": missing required field");
    const json& v = obj.at(key);
    if (!v.is_number()) throw ScenarioError(path + "." + key + ": expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ScenarioError(path + "." + key + ": non-finite value");
    return x;
}

inline double get_number_or(const json& obj, const std::string& path, const std::string& key,
                            double fallback) {
    return obj.contains(key) ? get_number(obj, path, key) : fallback;
}

inline double get_positive(const json& obj, const std::string& path, const std::string& key) {
    const double x = get_number(obj, path, key);
    if (x <= 0.0) throw ScenarioError(path + "." + key + ": must be > 0");
    return x;
}

inline SweepSpec get_sweep(const json& obj, const std::string& path) {
    require_keys(obj, path, {"start", "stop", "count"});
    SweepSpec s;
    s.start_mhz = get_number(obj, path, "start");
    s.stop_mhz = get_number(obj, path, "stop");
    if (!obj.contains("count") || !obj.at("count").is_number_integer())
        throw ScenarioError(path + ".count: expected an integer");
    s.count = obj.at("count").get<int>();
    if (s.count < 2) throw ScenarioError(path + ".count: must be >= 2");
    return s;
}

} // namespace scenario_detail

inline Scenario parse_scenario_json(const std::string& text, const std::string& origin) {
    using namespace scenario_detail;
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ScenarioError(origin + ": JSON parse error: " + e.what());
    }
    require_keys(root, origin, {"qubit", "circuit", "resonance", "truncations", "run", "outputs"});

    Scenario s;
    s.hash = hash_hex(fnv1a_hash(text));

    if (!root.contains("qubit")) throw ScenarioError(origin + ".qubit: missing required block");
    const json& q = root.at("qubit");
    require_keys(q, origin + ".qubit", {"E_C_GHz", "E_J_GHz", "E_L_GHz"});
    s.qubit.E_C_GHz = get_positive(q, origin + ".qubit", "E_C_GHz");
    s.qubit.E_J_GHz = get_number(q, origin + ".qubit", "E_J_GHz");
    s.qubit.E_L_GHz = get_positive(q, origin + ".qubit", "E_L_GHz");
    if (s.qubit.E_J_GHz < 0.0)
        throw ScenarioError(origin + ".qubit.E_J_GHz: must be >= 0");

    if (!root.contains("circuit")) throw ScenarioError(origin + ".circuit: missing required block");
    const json& c = root.at("circuit");
    require_keys(c, origin + ".circuit",
                 {"omega_r_GHz", "omega_d_GHz", "g_GHz", "kappa_MHz", "epsilon_d_MHz",
                  "epsilon_d_sweep_MHz", "delta_a_sweep_MHz", "phi_ext", "phi_ext_over_2pi"});
    s.omega_r = ghz_to_rad(get_positive(c, origin + ".circuit", "omega_r_GHz"));
    s.omega_d = ghz_to_rad(get_positive(c, origin + ".circuit", "omega_d_GHz"));
    s.g = ghz_to_rad(get_number(c, origin + ".circuit", "g_GHz"));
    s.kappa = mhz_to_rad(get_positive(c, origin + ".circuit", "kappa_MHz"));
    if (c.contains("phi_ext") && c.contains("phi_ext_over_2pi"))
        throw ScenarioError(origin + ".circuit: give phi_ext (radians) or "
                            "phi_ext_over_2pi (flux fraction), not both");
    if (c.contains("phi_ext"))
        s.qubit.phi_ext = get_number(c, origin + ".circuit", "phi_ext");
    else if (c.contains("phi_ext_over_2pi"))
        s.qubit.phi_ext = two_pi * get_number(c, origin + ".circuit", "phi_ext_over_2pi");
    else
        throw ScenarioError(origin + ".circuit: missing phi_ext or phi_ext_over_2pi");
    if (c.contains("epsilon_d_MHz"))
        s.epsilon_d = mhz_to_rad(get_number(c, origin + ".circuit", "epsilon_d_MHz"));
    if (c.contains("epsilon_d_sweep_MHz"))
        s.epsilon_sweep = get_sweep(c.at("epsilon_d_sweep_MHz"),
                                    origin + ".circuit.epsilon_d_sweep_MHz");
    if (c.contains("delta_a_sweep_MHz"))
        s.delta_a_sweep = get_sweep(c.at("delta_a_sweep_MHz"),
                                    origin + ".circuit.delta_a_sweep_MHz");

    if (root.contains("resonance")) {
        const json& r = root.at("resonance");
        require_keys(r, origin + ".resonance", {"k", "h_level"});
        if (r.contains("k")) {
            if (!r.at("k").is_number_integer())
                throw ScenarioError(origin + ".resonance.k: expected an integer");
            s.resonance_k = r.at("k").get<int>();
            if (s.resonance_k < 2)
                throw ScenarioError(origin + ".resonance.k: must be >= 2");
        }
        if (r.contains("h_level")) {
            if (!r.at("h_level").is_number_integer())
                throw ScenarioError(origin + ".resonance.h_level: expected an integer");
            s.h_level = r.at("h_level").get<Index>();
            if (*s.h_level < 1)
                throw ScenarioError(origin + ".resonance.h_level: must be >= 1");
        }
    }

    if (!root.contains("truncations"))
        throw ScenarioError(origin + ".truncations: missing required block");
    const json& t = root.at("truncations");
    require_keys(t, origin + ".truncations", {"n_max", "j_max", "ho_truncation", "sw_levels"});
    s.n_max = static_cast<Index>(get_positive(t, origin + ".truncations", "n_max"));
    s.j_max = static_cast<Index>(get_positive(t, origin + ".truncations", "j_max"));
    s.qubit.ho_truncation =
        static_cast<Index>(get_positive(t, origin + ".truncations", "ho_truncation"));
    s.sw_levels = static_cast<Index>(
        get_number_or(t, origin + ".truncations", "sw_levels", 12.0));
    if (s.qubit.ho_truncation < 20)
        throw ScenarioError(origin + ".truncations.ho_truncation: must be >= 20");
    if (s.sw_levels > s.qubit.ho_truncation / 4)
        throw ScenarioError(origin + ".truncations.sw_levels: must be <= ho_truncation/4");
    if (s.j_max > s.sw_levels)
        throw ScenarioError(origin + ".truncations.j_max: must be <= sw_levels");

    if (root.contains("run")) {
        const json& r = root.at("run");
        require_keys(r, origin + ".run",
                     {"t_end_us", "dt_ns", "models", "seed", "trajectories"});
        s.t_end_ns = us_to_ns(get_number_or(r, origin + ".run", "t_end_us", 5.0));
        s.dt_ns = get_number_or(r, origin + ".run", "dt_ns", 2.5);
        if (s.t_end_ns <= 0 || s.dt_ns <= 0)
            throw ScenarioError(origin + ".run: t_end_us and dt_ns must be > 0");
        if (r.contains("models")) {
            if (!r.at("models").is_array())
                throw ScenarioError(origin + ".run.models: expected an array");
            s.models.clear();
            for (const auto& m : r.at("models")) {
                const std::string name = m.get<std::string>();
                if (name != "reduced" && name != "full" && name != "semiclassical")
                    throw ScenarioError(origin + ".run.models: unknown model '" + name + "'");
                s.models.push_back(name);
            }
        }
        if (r.contains("seed")) s.seed = r.at("seed").get<std::uint64_t>();
        if (r.contains("trajectories")) {
            s.trajectories = r.at("trajectories").get<int>();
            if (s.trajectories < 0)
                throw ScenarioError(origin + ".run.trajectories: must be >= 0");
        }
    }

    if (root.contains("outputs")) {
        const json& o = root.at("outputs");
        require_keys(o, origin + ".outputs", {"directory", "entanglement", "plots"});
        if (o.contains("directory")) s.out_dir = o.at("directory").get<std::string>();
        if (o.contains("entanglement")) s.entanglement = o.at("entanglement").get<bool>();
        if (o.contains("plots")) s.plots = o.at("plots").get<bool>();
    }

    s.qubit.validate();
    return s;
}

inline Scenario parse_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ScenarioError("scenario file not found: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario_json(buf.str(), path);
}

} // namespace mist
