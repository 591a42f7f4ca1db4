// Run configuration: structured-text (JSON) parsing with field-level
// validation, dotted-path overrides, and an exact serialize/parse
// round trip for the metadata echo.
#pragma once

#include <cstdint>
#include <cstdlib>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "breatherlab/evolve.hpp"
#include "breatherlab/io.hpp"
#include "breatherlab/solver.hpp"

namespace breatherlab {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class Pipeline { evolve, solve, sweep, analyze, fermi, accept };

inline std::string to_string(Pipeline p) {
    switch (p) {
        case Pipeline::evolve: return "evolve";
        case Pipeline::solve: return "solve";
        case Pipeline::sweep: return "sweep";
        case Pipeline::analyze: return "analyze";
        case Pipeline::fermi: return "fermi";
        case Pipeline::accept: return "accept";
    }
    return "?";
}

inline Pipeline pipeline_from_string(const std::string& s) {
    if (s == "evolve") return Pipeline::evolve;
    if (s == "solve") return Pipeline::solve;
    if (s == "sweep") return Pipeline::sweep;
    if (s == "analyze") return Pipeline::analyze;
    if (s == "fermi") return Pipeline::fermi;
    if (s == "accept") return Pipeline::accept;
    throw ConfigError("pipeline: unknown value '" + s + "'");
}

struct RunConfig {
    Pipeline pipeline = Pipeline::solve;
    std::string model_name = "sine_gordon";
    std::map<std::string, double> model_params;

    double grid_L = 0.0;  // 0 = choose from eps via the grid policy
    int grid_N = 0;       // 0 = choose from the target spacing
    double grid_h = 0.1;

    int n_max = 8;
    int M = 64;

    double eps = 0.2;
    std::vector<double> eps_list;

    NewtonConfig solver;
    EvolveConfig evolve;

    double virial_A = 0.0;       // 0 = L/4
    double fermi_L_window = 5.0;
    std::string input_dir;       // existing solution directory for analyze/fermi
    std::string output_dir;
    std::uint64_t rng_seed = 1;
};

inline Grid config_grid(const RunConfig& cfg, double eps) {
    if (cfg.grid_L > 0.0 && cfg.grid_N > 0) return make_grid(cfg.grid_L, cfg.grid_N);
    GridPolicy pol;
    pol.h = cfg.grid_h;
    if (cfg.grid_L > 0.0) {
        pol.L_min = cfg.grid_L;
        pol.L_over_eps = 0.0;
    }
    return auto_grid(eps, pol);
}

inline json to_json(const RunConfig& c) {
    json j;
    j["pipeline"] = to_string(c.pipeline);
    j["model"] = {{"name", c.model_name}, {"params", json::object()}};
    for (const auto& [k, v] : c.model_params) j["model"]["params"][k] = v;
    j["grid"] = {{"L", c.grid_L}, {"N", c.grid_N}, {"h", c.grid_h}};
    j["modes"] = {{"n_max", c.n_max}, {"M", c.M}};
    j["eps"] = c.eps;
    j["eps_list"] = c.eps_list;
    j["solver"] = {{"tol", c.solver.tol},
                   {"max_iter", c.solver.max_iter},
                   {"damping", c.solver.damping},
                   {"pin_b_fundamental", c.solver.pin_b_fundamental},
                   {"even_x", c.solver.even_x},
                   {"centroid_anchor", c.solver.centroid_anchor},
                   {"boundary", c.solver.boundary == Boundary::sponge ? "sponge" : "dirichlet"}};
    j["evolve"] = {{"steps_per_period", c.evolve.steps_per_period},
                   {"scheme", c.evolve.scheme == Scheme::strang ? "strang" : "leapfrog"},
                   {"snapshot_every", c.evolve.snapshot_every}};
    j["virial_A"] = c.virial_A;
    j["fermi_L_window"] = c.fermi_L_window;
    j["input_dir"] = c.input_dir;
    j["output_dir"] = c.output_dir;
    j["rng_seed"] = c.rng_seed;
    return j;
}

namespace detail {
template <typename T>
T get_field(const json& j, const std::string& key, T dflt, std::vector<std::string>& errors,
            const std::string& scope) {
    if (!j.contains(key)) return dflt;
    try {
        return j.at(key).get<T>();
    } catch (const std::exception&) {
        errors.push_back(scope + key + ": wrong type");
        return dflt;
    }
}
}  // namespace detail

inline RunConfig config_from_json(const json& j) {
    std::vector<std::string> errors;
    RunConfig c;
    using detail::get_field;

    if (j.contains("pipeline")) {
        try {
            c.pipeline = pipeline_from_string(j.at("pipeline").get<std::string>());
        } catch (const std::exception& e) {
            errors.push_back(e.what());
        }
    }
    if (j.contains("model")) {
        const json& m = j.at("model");
        c.model_name = get_field<std::string>(m, "name", c.model_name, errors, "model.");
        if (m.contains("params")) {
            for (auto it = m.at("params").begin(); it != m.at("params").end(); ++it) {
                if (!it.value().is_number())
                    errors.push_back("model.params." + it.key() + ": must be a number");
                else
                    c.model_params[it.key()] = it.value().get<double>();
            }
        }
    }
    if (j.contains("grid")) {
        const json& g = j.at("grid");
        c.grid_L = get_field<double>(g, "L", c.grid_L, errors, "grid.");
        c.grid_N = get_field<int>(g, "N", c.grid_N, errors, "grid.");
        c.grid_h = get_field<double>(g, "h", c.grid_h, errors, "grid.");
        if (c.grid_L < 0.0) errors.push_back("grid.L: must be nonnegative");
        if (c.grid_N != 0 && (c.grid_N < 16 || c.grid_N % 2 == 0))
            errors.push_back("grid.N: must be odd and at least 17 (or 0 for automatic)");
        if (!(c.grid_h > 0.0)) errors.push_back("grid.h: must be positive");
    }
    if (j.contains("modes")) {
        const json& m = j.at("modes");
        c.n_max = get_field<int>(m, "n_max", c.n_max, errors, "modes.");
        c.M = get_field<int>(m, "M", c.M, errors, "modes.");
        if (c.n_max < 1) errors.push_back("modes.n_max: must be at least 1");
        if (c.M < 4 * c.n_max) errors.push_back("modes.M: must be at least 4 n_max");
    }
    c.eps = get_field<double>(j, "eps", c.eps, errors, "");
    if (!(c.eps > 0.0 && c.eps < 1.0)) errors.push_back("eps: must lie in (0,1)");
    if (j.contains("eps_list")) {
        try {
            c.eps_list = j.at("eps_list").get<std::vector<double>>();
        } catch (const std::exception&) {
            errors.push_back("eps_list: must be an array of numbers");
        }
        for (double e : c.eps_list)
            if (!(e > 0.0 && e < 1.0)) {
                errors.push_back("eps_list: entries must lie in (0,1)");
                break;
            }
    }
    if (j.contains("solver")) {
        const json& s = j.at("solver");
        c.solver.tol = get_field<double>(s, "tol", c.solver.tol, errors, "solver.");
        c.solver.max_iter = get_field<int>(s, "max_iter", c.solver.max_iter, errors, "solver.");
        c.solver.damping = get_field<double>(s, "damping", c.solver.damping, errors, "solver.");
        c.solver.pin_b_fundamental =
            get_field<bool>(s, "pin_b_fundamental", c.solver.pin_b_fundamental, errors, "solver.");
        c.solver.even_x = get_field<bool>(s, "even_x", c.solver.even_x, errors, "solver.");
        c.solver.centroid_anchor =
            get_field<bool>(s, "centroid_anchor", c.solver.centroid_anchor, errors, "solver.");
        const std::string bd = get_field<std::string>(s, "boundary", "dirichlet", errors, "solver.");
        if (bd == "dirichlet")
            c.solver.boundary = Boundary::dirichlet;
        else if (bd == "sponge")
            c.solver.boundary = Boundary::sponge;
        else
            errors.push_back("solver.boundary: must be 'dirichlet' or 'sponge'");
        if (!(c.solver.tol > 0.0)) errors.push_back("solver.tol: must be positive");
        if (!(c.solver.damping > 0.0 && c.solver.damping <= 1.0))
            errors.push_back("solver.damping: must lie in (0,1]");
        if (c.solver.max_iter < 1) errors.push_back("solver.max_iter: must be positive");
    }
    if (j.contains("evolve")) {
        const json& e = j.at("evolve");
        c.evolve.steps_per_period =
            get_field<int>(e, "steps_per_period", c.evolve.steps_per_period, errors, "evolve.");
        const std::string sc = get_field<std::string>(e, "scheme", "leapfrog", errors, "evolve.");
        if (sc == "leapfrog")
            c.evolve.scheme = Scheme::leapfrog;
        else if (sc == "strang")
            c.evolve.scheme = Scheme::strang;
        else
            errors.push_back("evolve.scheme: must be 'leapfrog' or 'strang'");
        c.evolve.snapshot_every =
            get_field<int>(e, "snapshot_every", c.evolve.snapshot_every, errors, "evolve.");
        if (c.evolve.steps_per_period < 1) errors.push_back("evolve.steps_per_period: must be positive");
        if (c.evolve.snapshot_every < 0) errors.push_back("evolve.snapshot_every: must be nonnegative");
    }
    c.virial_A = get_field<double>(j, "virial_A", c.virial_A, errors, "");
    c.fermi_L_window = get_field<double>(j, "fermi_L_window", c.fermi_L_window, errors, "");
    c.input_dir = get_field<std::string>(j, "input_dir", c.input_dir, errors, "");
    c.output_dir = get_field<std::string>(j, "output_dir", c.output_dir, errors, "");
    c.rng_seed = get_field<std::uint64_t>(j, "rng_seed", c.rng_seed, errors, "");

    if (!errors.empty()) {
        std::string msg = "config validation failed:";
        for (const std::string& e : errors) msg += "\n  - " + e;
        throw ConfigError(msg);
    }
    return c;
}

inline RunConfig load_config(const std::string& path) {
    json j;
    try {
        j = load_json(path);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("cannot parse config: ") + e.what());
    }
    return config_from_json(j);
}

/// Apply a dotted-path override "a.b.c=value"; the value is parsed as
/// JSON when possible, as a string otherwise.
inline void apply_override(json& j, const std::string& spec) {
    const size_t eq = spec.find('=');
    if (eq == std::string::npos) throw ConfigError("override must have the form key.path=value: " + spec);
    const std::string path = spec.substr(0, eq);
    const std::string value = spec.substr(eq + 1);
    json* node = &j;
    size_t pos = 0;
    while (true) {
        const size_t dot = path.find('.', pos);
        const std::string key = path.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
        if (key.empty()) throw ConfigError("override has an empty path segment: " + spec);
        if (dot == std::string::npos) {
            try {
                (*node)[key] = json::parse(value);
            } catch (const std::exception&) {
                (*node)[key] = value;
            }
            break;
        }
        node = &(*node)[key];
        pos = dot + 1;
    }
}

/// Default output root: $BREATHERLAB_OUT or "out".
inline std::string default_output_root() {
    const char* env = std::getenv("BREATHERLAB_OUT");
    return env && *env ? env : "out";
}

}  // namespace breatherlab
