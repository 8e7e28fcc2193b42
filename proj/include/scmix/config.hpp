#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "scmix/sampler.hpp"
#include "scmix/types.hpp"

namespace scmix {

using nlohmann::json;

namespace detail {

inline std::string join_path(const std::string& base, const std::string& key) {
    return base.empty() ? key : base + "." + key;
}

inline const json& require_field(const json& j, const std::string& key,
                                 const std::string& base) {
    if (!j.is_object() || !j.contains(key))
        throw ConfigError("config: missing required field '" + join_path(base, key) + "'");
    return j.at(key);
}

inline double require_number(const json& j, const std::string& key, const std::string& base) {
    const json& v = require_field(j, key, base);
    if (!v.is_number())
        throw ConfigError("config: field '" + join_path(base, key) + "' must be a number");
    return v.get<double>();
}

inline int require_int(const json& j, const std::string& key, const std::string& base) {
    const json& v = require_field(j, key, base);
    if (!v.is_number_integer())
        throw ConfigError("config: field '" + join_path(base, key) + "' must be an integer");
    return v.get<int>();
}

inline std::uint64_t require_u64(const json& j, const std::string& key,
                                 const std::string& base) {
    const json& v = require_field(j, key, base);
    const bool ok = v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0);
    if (!ok)
        throw ConfigError("config: field '" + join_path(base, key) +
                          "' must be a nonnegative integer");
    return v.get<std::uint64_t>();
}

inline std::string require_string(const json& j, const std::string& key,
                                  const std::string& base) {
    const json& v = require_field(j, key, base);
    if (!v.is_string())
        throw ConfigError("config: field '" + join_path(base, key) + "' must be a string");
    return v.get<std::string>();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Sampler (de)serialization.
// law objects: {"type": "rayleigh", "sigma": s} | {"type": "uniform", "a":, "b":}
//   | {"type": "constant", "value": v} | {"type": "constant", "matrix": [[..]]}
//   | {"type": "bernoulli_scaled", "p":, "c":} | {"type": "exponential", "lambda":}
// ---------------------------------------------------------------------------

inline EntryLaw entry_law_from_json(const json& j, const std::string& path) {
    const std::string type = detail::require_string(j, "type", path);
    try {
        if (type == "rayleigh") return RayleighLaw{detail::require_number(j, "sigma", path)};
        if (type == "uniform")
            return UniformLaw{detail::require_number(j, "a", path),
                              detail::require_number(j, "b", path)};
        if (type == "constant") return ConstantLaw(detail::require_number(j, "value", path));
        if (type == "bernoulli_scaled")
            return BernoulliScaledLaw{detail::require_number(j, "p", path),
                                      detail::require_number(j, "c", path)};
        if (type == "exponential")
            return ExponentialLaw{detail::require_number(j, "lambda", path)};
    } catch (const ConfigError&) {
        throw;
    }
    throw ConfigError("config: field '" + detail::join_path(path, "type") +
                      "' has unknown law type '" + type + "'");
}

inline json entry_law_to_json(const EntryLaw& law) {
    json j;
    std::visit(
        [&j](const auto& l) {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, RayleighLaw>) {
                j = {{"type", "rayleigh"}, {"sigma", l.sigma}};
            } else if constexpr (std::is_same_v<T, UniformLaw>) {
                j = {{"type", "uniform"}, {"a", l.a}, {"b", l.b}};
            } else if constexpr (std::is_same_v<T, ConstantLaw>) {
                j = {{"type", "constant"}, {"value", l.value}};
            } else if constexpr (std::is_same_v<T, BernoulliScaledLaw>) {
                j = {{"type", "bernoulli_scaled"}, {"p", l.p}, {"c", l.c}};
            } else {
                j = {{"type", "exponential"}, {"lambda", l.lambda}};
            }
        },
        law);
    return j;
}

inline ProfileSampler sampler_from_json(const json& j, int d, const std::string& path) {
    const json& law_json = detail::require_field(j, "law", path);
    const std::string law_path = detail::join_path(path, "law");

    // whole-matrix constant law: a matrix of fixed values
    if (law_json.is_object() && law_json.contains("type") && law_json.at("type") == "constant" &&
        law_json.contains("matrix")) {
        const json& rows = law_json.at("matrix");
        if (!rows.is_array() || static_cast<int>(rows.size()) != d)
            throw ConfigError("config: field '" + detail::join_path(law_path, "matrix") +
                              "' must be a " + std::to_string(d) + "x" + std::to_string(d) +
                              " array");
        std::vector<double> flat;
        flat.reserve(static_cast<std::size_t>(d) * d);
        for (const auto& row : rows) {
            if (!row.is_array() || static_cast<int>(row.size()) != d)
                throw ConfigError("config: field '" + detail::join_path(law_path, "matrix") +
                                  "' must be a " + std::to_string(d) + "x" + std::to_string(d) +
                                  " array");
            for (const auto& v : row) {
                if (!v.is_number())
                    throw ConfigError("config: field '" +
                                      detail::join_path(law_path, "matrix") +
                                      "' must contain numbers");
                flat.push_back(v.get<double>());
            }
        }
        VarianceProfile profile = VarianceProfile::from_magnitudes(d, std::move(flat));
        ProfileSampler sampler = ProfileSampler::constant_profile(profile);
        return sampler;
    }

    ProfileSampler sampler(d, entry_law_from_json(law_json, law_path));
    if (j.contains("overrides")) {
        const json& ov = j.at("overrides");
        if (!ov.is_array())
            throw ConfigError("config: field '" + detail::join_path(path, "overrides") +
                              "' must be an array");
        for (std::size_t k = 0; k < ov.size(); ++k) {
            const std::string op = detail::join_path(path, "overrides[" + std::to_string(k) + "]");
            const int i = detail::require_int(ov[k], "i", op);
            const int jj = detail::require_int(ov[k], "j", op);
            if (i < 0 || jj < 0 || i >= d || jj >= d)
                throw ConfigError("config: field '" + op + "' has entry index out of range");
            sampler.set_entry_law(i, jj,
                                  entry_law_from_json(detail::require_field(ov[k], "law", op),
                                                      detail::join_path(op, "law")));
        }
    }
    return sampler;
}

// ---------------------------------------------------------------------------
// RunConfig: the full CLI configuration.
// ---------------------------------------------------------------------------

struct GridConfig {
    double x_min = -4.0;
    double x_max = 4.0;
    double step = 0.01;
    double epsilon = 1e-3;
};

struct MonteCarloConfig {
    int draws = 1000;
    std::uint64_t seed = 1;
};

struct SimulateConfig {
    int block_N = 100;
    int n_matrices = 200;
};

struct CltConfig {
    std::vector<int> n_sums = {1, 4, 16, 64};
    int matrix_N = 200;
    int trials = 50;
    std::vector<int> moments = {2, 4};
};

struct RunConfig {
    int d = 1;
    json sampler_json;  // retained for canonical serialization
    GridConfig grid;
    SolverSettings solver;
    MonteCarloConfig monte_carlo;
    std::optional<SimulateConfig> simulate;
    std::optional<CltConfig> clt;
    std::vector<int> moment_orders = {2, 4, 6};
    double histogram_bin = 0.1;
    double work_guard = kDefaultWorkGuard;

    ProfileSampler make_sampler() const { return sampler_from_json(sampler_json, d, "sampler"); }

    std::vector<double> make_xs() const { return make_grid(grid.x_min, grid.x_max, grid.step); }

    static RunConfig from_json(const json& j) {
        RunConfig cfg;
        cfg.d = detail::require_int(j, "d", "");
        if (cfg.d <= 0) throw ConfigError("config: field 'd' must be positive");

        cfg.sampler_json = detail::require_field(j, "sampler", "");
        (void)cfg.make_sampler();  // validate eagerly

        const json& grid = detail::require_field(j, "grid", "");
        cfg.grid.x_min = detail::require_number(grid, "x_min", "grid");
        cfg.grid.x_max = detail::require_number(grid, "x_max", "grid");
        cfg.grid.step = detail::require_number(grid, "step", "grid");
        cfg.grid.epsilon = detail::require_number(grid, "epsilon", "grid");
        if (!(cfg.grid.step > 0.0)) throw ConfigError("config: field 'grid.step' must be positive");
        if (!(cfg.grid.x_min < cfg.grid.x_max))
            throw ConfigError("config: field 'grid.x_min' must be below 'grid.x_max'");
        if (!(cfg.grid.epsilon > 0.0))
            throw ConfigError("config: field 'grid.epsilon' must be positive");

        const json& solver = detail::require_field(j, "solver", "");
        cfg.solver.tol = detail::require_number(solver, "tol", "solver");
        cfg.solver.max_iter = detail::require_int(solver, "max_iter", "solver");
        cfg.solver.epsilon = cfg.grid.epsilon;
        if (!(cfg.solver.tol > 0.0)) throw ConfigError("config: field 'solver.tol' must be positive");
        if (cfg.solver.max_iter < 1)
            throw ConfigError("config: field 'solver.max_iter' must be >= 1");

        const json& mc = detail::require_field(j, "monte_carlo", "");
        cfg.monte_carlo.draws = detail::require_int(mc, "M", "monte_carlo");
        cfg.monte_carlo.seed = detail::require_u64(mc, "seed", "monte_carlo");
        if (cfg.monte_carlo.draws < 1)
            throw ConfigError("config: field 'monte_carlo.M' must be >= 1");

        if (j.contains("simulate")) {
            const json& sim = j.at("simulate");
            SimulateConfig sc;
            sc.block_N = detail::require_int(sim, "block_N", "simulate");
            sc.n_matrices = detail::require_int(sim, "n_matrices", "simulate");
            if (sc.block_N < 1) throw ConfigError("config: field 'simulate.block_N' must be >= 1");
            if (sc.n_matrices < 1)
                throw ConfigError("config: field 'simulate.n_matrices' must be >= 1");
            cfg.simulate = sc;
        }

        if (j.contains("clt")) {
            const json& cj = j.at("clt");
            CltConfig cc;
            cc.n_sums.clear();
            for (const auto& v : detail::require_field(cj, "N_sums", "clt")) {
                if (!v.is_number_integer() || v.get<int>() < 1)
                    throw ConfigError("config: field 'clt.N_sums' must hold positive integers");
                cc.n_sums.push_back(v.get<int>());
            }
            if (cc.n_sums.empty())
                throw ConfigError("config: field 'clt.N_sums' must be nonempty");
            cc.matrix_N = detail::require_int(cj, "matrix_N", "clt");
            cc.trials = detail::require_int(cj, "trials", "clt");
            if (cc.matrix_N < 1) throw ConfigError("config: field 'clt.matrix_N' must be >= 1");
            if (cc.trials < 1) throw ConfigError("config: field 'clt.trials' must be >= 1");
            cc.moments.clear();
            for (const auto& v : detail::require_field(cj, "moments", "clt")) {
                if (!v.is_number_integer() || v.get<int>() < 0)
                    throw ConfigError("config: field 'clt.moments' must hold nonnegative integers");
                cc.moments.push_back(v.get<int>());
            }
            if (cc.moments.empty())
                throw ConfigError("config: field 'clt.moments' must be nonempty");
            cfg.clt = cc;
        }

        if (j.contains("moments")) {
            const json& mj = j.at("moments");
            cfg.moment_orders.clear();
            for (const auto& v : detail::require_field(mj, "orders", "moments")) {
                if (!v.is_number_integer() || v.get<int>() < 0)
                    throw ConfigError("config: field 'moments.orders' must hold nonnegative integers");
                cfg.moment_orders.push_back(v.get<int>());
            }
            if (cfg.moment_orders.empty())
                throw ConfigError("config: field 'moments.orders' must be nonempty");
        }

        if (j.contains("histogram")) {
            cfg.histogram_bin = detail::require_number(j.at("histogram"), "bin_width", "histogram");
            if (!(cfg.histogram_bin > 0.0))
                throw ConfigError("config: field 'histogram.bin_width' must be positive");
        }

        if (j.contains("work_guard")) {
            cfg.work_guard = detail::require_number(j, "work_guard", "");
            if (!(cfg.work_guard > 0.0))
                throw ConfigError("config: field 'work_guard' must be positive");
        }

        return cfg;
    }

    static RunConfig load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("config: cannot open file '" + path + "'");
        json j;
        try {
            in >> j;
        } catch (const json::parse_error& e) {
            throw ConfigError(std::string("config: JSON parse error: ") + e.what());
        }
        return from_json(j);
    }

    /// Canonical serialization (nlohmann orders keys), used for hashing.
    json to_json() const {
        json j;
        j["d"] = d;
        j["sampler"] = sampler_json;
        j["grid"] = {{"x_min", grid.x_min},
                     {"x_max", grid.x_max},
                     {"step", grid.step},
                     {"epsilon", grid.epsilon}};
        j["solver"] = {{"tol", solver.tol}, {"max_iter", solver.max_iter}};
        j["monte_carlo"] = {{"M", monte_carlo.draws}, {"seed", monte_carlo.seed}};
        if (simulate)
            j["simulate"] = {{"block_N", simulate->block_N}, {"n_matrices", simulate->n_matrices}};
        if (clt)
            j["clt"] = {{"N_sums", clt->n_sums},
                        {"matrix_N", clt->matrix_N},
                        {"trials", clt->trials},
                        {"moments", clt->moments}};
        j["moments"] = {{"orders", moment_orders}};
        j["histogram"] = {{"bin_width", histogram_bin}};
        j["work_guard"] = work_guard;
        return j;
    }

    std::uint64_t config_hash() const {
        const std::string dump = to_json().dump();
        // FNV-1a, stable across platforms
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (const char c : dump) {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ull;
        }
        return h;
    }
};

}  // namespace scmix
