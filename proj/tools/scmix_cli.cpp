// scmix command-line front-end: solve mean Cauchy transforms, emit spectral
// densities and moment tables, run finite random-matrix simulations and CLT
// checks, and compare theory against simulation.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure,
// 4 work-guard violation.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "scmix/scmix.hpp"

namespace {

using namespace scmix;

struct GlobalOptions {
    std::string config_path;
    std::string out_dir = ".";
    int threads = 0;  // 0 = hardware
    std::optional<std::uint64_t> seed_override;
    std::vector<std::string> set_overrides;
};

json apply_overrides(json j, const std::vector<std::string>& overrides) {
    for (const std::string& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: --set expects <json-pointer>=<value>, got '" + kv + "'");
        std::string ptr = kv.substr(0, eq);
        const std::string value = kv.substr(eq + 1);
        if (!ptr.empty() && ptr.front() != '/') {
            // dotted paths are accepted and translated to JSON pointers
            std::string translated = "/";
            for (const char c : ptr) translated += (c == '.') ? '/' : c;
            ptr = translated;
        }
        json parsed;
        try {
            parsed = json::parse(value);
        } catch (const json::parse_error&) {
            parsed = value;  // treat as a plain string
        }
        try {
            j[json::json_pointer(ptr)] = parsed;
        } catch (const json::exception& e) {
            throw ConfigError("config: cannot apply override '" + kv + "': " + e.what());
        }
    }
    return j;
}

RunConfig load_config(const GlobalOptions& opts) {
    std::ifstream in(opts.config_path);
    if (!in) throw ConfigError("config: cannot open file '" + opts.config_path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: JSON parse error: ") + e.what());
    }
    j = apply_overrides(j, opts.set_overrides);
    RunConfig cfg = RunConfig::from_json(j);
    if (opts.seed_override) cfg.monte_carlo.seed = *opts.seed_override;
    return cfg;
}

std::string out_path(const GlobalOptions& opts, const std::string& name) {
    std::filesystem::create_directories(opts.out_dir);
    return (std::filesystem::path(opts.out_dir) / name).string();
}

std::string stamp(const RunConfig& cfg, const std::string& subcommand) {
    return "scmix " + subcommand + " config_hash=" + fmt_u64_hex(cfg.config_hash()) +
           " seed=" + std::to_string(cfg.monte_carlo.seed);
}

MeanTransformResult run_mean_cauchy(const RunConfig& cfg, int threads) {
    const ProfileSampler sampler = cfg.make_sampler();
    return mean_cauchy(sampler, cfg.make_xs(), cfg.solver, cfg.monte_carlo.draws,
                       cfg.monte_carlo.seed, threads);
}

void write_curve_csv(const std::string& path, const std::string& comment,
                     const MeanTransformResult& result, bool with_density) {
    std::vector<std::string> header = {"x", "re_g", "im_g"};
    if (with_density) header.push_back("density");
    header.push_back("stderr");
    CsvWriter csv(path, comment, header);
    const SpectralCurve& curve = result.curve;
    for (std::size_t k = 0; k < curve.xs.size(); ++k) {
        std::vector<std::string> row = {fmt_double(curve.xs[k]),
                                        fmt_double(curve.g_values[k].real()),
                                        fmt_double(curve.g_values[k].imag())};
        if (with_density) row.push_back(fmt_double(curve.density[k]));
        row.push_back(fmt_double(result.per_point_std_error[k]));
        csv.write_row(row);
    }
}

int cmd_solve(const GlobalOptions& opts, bool with_density) {
    const RunConfig cfg = load_config(opts);
    const MeanTransformResult result = run_mean_cauchy(cfg, opts.threads);
    const std::string name = with_density ? "density.csv" : "solve.csv";
    write_curve_csv(out_path(opts, name), stamp(cfg, with_density ? "density" : "solve"),
                    result, with_density);
    std::cout << "wrote " << out_path(opts, name) << " (draws=" << result.draws
              << " discarded=" << result.discarded << ")\n";
    return 0;
}

int cmd_moments(const GlobalOptions& opts) {
    const RunConfig cfg = load_config(opts);
    const ProfileSampler sampler = cfg.make_sampler();
    CsvWriter csv(out_path(opts, "moments.csv"), stamp(cfg, "moments"),
                  {"m", "mean_moment", "stderr"});
    for (const int m : cfg.moment_orders) {
        const MomentEstimate est =
            mean_moment(sampler, m, cfg.monte_carlo.draws, cfg.monte_carlo.seed);
        csv.write_row({std::to_string(m), fmt_double(est.value), fmt_double(est.std_error)});
    }
    std::cout << "wrote " << out_path(opts, "moments.csv") << "\n";
    return 0;
}

struct HistogramData {
    std::vector<double> edges;
    std::vector<double> counts;
};

HistogramData histogram_of(const EmpiricalDistribution& emp, double bin_width) {
    const double lo = std::floor(emp.min() / bin_width) * bin_width;
    const auto n = static_cast<std::size_t>(std::ceil((emp.max() - lo) / bin_width)) + 1;
    HistogramData h;
    h.edges.resize(n + 1);
    for (std::size_t b = 0; b <= n; ++b)
        h.edges[b] = lo + static_cast<double>(b) * bin_width;
    h.counts.assign(n, 0.0);
    for (const double x : emp.samples()) {
        auto b = static_cast<long long>(std::floor((x - lo) / bin_width));
        if (b < 0) b = 0;
        if (b >= static_cast<long long>(n)) b = static_cast<long long>(n) - 1;
        h.counts[static_cast<std::size_t>(b)] += 1.0;
    }
    return h;
}

EmpiricalDistribution run_simulation(const RunConfig& cfg, int threads) {
    if (!cfg.simulate)
        throw ConfigError("config: missing required field 'simulate'");
    const ProfileSampler sampler = cfg.make_sampler();
    const BlockMatrixSpec spec{cfg.d, cfg.simulate->block_N};
    return ensemble_spectrum(sampler, spec, cfg.simulate->n_matrices, cfg.monte_carlo.seed,
                             threads, cfg.work_guard);
}

int cmd_simulate(const GlobalOptions& opts) {
    const RunConfig cfg = load_config(opts);
    const EmpiricalDistribution emp = run_simulation(cfg, opts.threads);

    {
        CsvWriter csv(out_path(opts, "eigenvalues.csv"), stamp(cfg, "simulate"),
                      {"eigenvalue"});
        for (const double v : emp.samples()) csv.write_row({fmt_double(v)});
    }
    {
        const HistogramData h = histogram_of(emp, cfg.histogram_bin);
        const double total = emp.total_count();
        CsvWriter csv(out_path(opts, "histogram.csv"), stamp(cfg, "simulate"),
                      {"bin_left", "bin_right", "count", "density"});
        for (std::size_t b = 0; b < h.counts.size(); ++b)
            csv.write_row({fmt_double(h.edges[b]), fmt_double(h.edges[b + 1]),
                           fmt_double(h.counts[b]),
                           fmt_double(h.counts[b] / (total * cfg.histogram_bin))});
    }
    std::cout << "wrote " << out_path(opts, "eigenvalues.csv") << " and "
              << out_path(opts, "histogram.csv") << " (" << emp.samples().size()
              << " eigenvalues)\n";
    return 0;
}

int cmd_clt_check(const GlobalOptions& opts) {
    const RunConfig cfg = load_config(opts);
    if (!cfg.clt) throw ConfigError("config: missing required field 'clt'");
    const ProfileSampler sampler = cfg.make_sampler();
    const MeanCovarianceProfile cov = MeanCovarianceProfile::from_sampler(sampler);

    CsvWriter csv(out_path(opts, "clt_check.csv"), stamp(cfg, "clt-check"),
                  {"N_sum", "m", "empirical", "limit", "stderr"});
    for (const int n_sum : cfg.clt->n_sums) {
        const auto estimates =
            empirical_clt_moments(sampler, n_sum, cfg.clt->matrix_N, cfg.clt->moments,
                                  cfg.clt->trials, cfg.monte_carlo.seed, opts.threads,
                                  cfg.work_guard);
        for (std::size_t q = 0; q < cfg.clt->moments.size(); ++q) {
            const int m = cfg.clt->moments[q];
            const double limit = normalized_trace(clt_limit_moment(cov, m)).real();
            csv.write_row({std::to_string(n_sum), std::to_string(m),
                           fmt_double(estimates[q].value), fmt_double(limit),
                           fmt_double(estimates[q].std_error)});
        }
    }
    std::cout << "wrote " << out_path(opts, "clt_check.csv") << "\n";
    return 0;
}

int cmd_compare(const GlobalOptions& opts) {
    const RunConfig cfg = load_config(opts);
    const MeanTransformResult theory = run_mean_cauchy(cfg, opts.threads);
    const EmpiricalDistribution emp = run_simulation(cfg, opts.threads);

    const double l1 = l1_density_distance(theory.curve, emp, cfg.histogram_bin);
    const double ks = ks_distance(theory.curve, emp);

    {
        // side-by-side densities on the comparison binning
        const auto binning = detail::common_binning(
            std::min(theory.curve.xs.front(), emp.min()),
            std::max(theory.curve.xs.back(), emp.max()), cfg.histogram_bin);
        const auto emp_dens = emp.bin_densities(binning.lo, binning.width, binning.n);
        const auto theory_dens = detail::curve_bin_densities(theory.curve, binning);
        CsvWriter csv(out_path(opts, "compare_curve.csv"), stamp(cfg, "compare"),
                      {"bin_center", "density_theory", "density_empirical"});
        for (std::size_t b = 0; b < binning.n; ++b) {
            const double center = binning.lo + (static_cast<double>(b) + 0.5) * binning.width;
            csv.write_row({fmt_double(center), fmt_double(theory_dens[b]),
                           fmt_double(emp_dens[b])});
        }
    }
    {
        CsvWriter csv(out_path(opts, "compare_metrics.csv"), stamp(cfg, "compare"),
                      {"metric", "value"});
        csv.write_row({"l1_density_distance", fmt_double(l1)});
        csv.write_row({"ks_distance", fmt_double(ks)});
        csv.write_row({"draws", std::to_string(theory.draws)});
        csv.write_row({"discarded", std::to_string(theory.discarded)});
        csv.write_row({"eigenvalues", std::to_string(emp.samples().size())});
    }
    std::cout << "l1_density_distance=" << fmt_double(l1) << " ks_distance=" << fmt_double(ks)
              << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"semicircular-mixture spectral toolkit"};
    app.require_subcommand(1);

    GlobalOptions opts;
    app.add_option("--out-dir", opts.out_dir, "directory for output files");
    app.add_option("--threads", opts.threads, "worker count (0 = hardware)");
    std::uint64_t seed_value = 0;
    auto* seed_opt = app.add_option("--seed", seed_value, "override monte_carlo.seed");
    app.add_option("--set", opts.set_overrides,
                   "config override, e.g. --set grid.step=0.05 (repeatable)");

    const auto add_config = [&opts](CLI::App* cmd) {
        cmd->add_option("--config", opts.config_path, "JSON configuration file")->required();
    };

    CLI::App* solve = app.add_subcommand("solve", "mean Cauchy transform curve");
    CLI::App* density = app.add_subcommand("density", "transform curve with density column");
    CLI::App* moments = app.add_subcommand("moments", "Monte-Carlo mean moment table");
    CLI::App* simulate = app.add_subcommand("simulate", "eigenvalue simulation + histogram");
    CLI::App* clt_check = app.add_subcommand("clt-check", "empirical vs limiting CLT moments");
    CLI::App* compare = app.add_subcommand("compare", "theory vs simulation distances");
    for (CLI::App* cmd : {solve, density, moments, simulate, clt_check, compare}) {
        add_config(cmd);
        cmd->fallthrough();  // global flags may follow the subcommand
    }

    CLI11_PARSE(app, argc, argv);
    if (seed_opt->count() > 0) opts.seed_override = seed_value;

    try {
        if (solve->parsed()) return cmd_solve(opts, false);
        if (density->parsed()) return cmd_solve(opts, true);
        if (moments->parsed()) return cmd_moments(opts);
        if (simulate->parsed()) return cmd_simulate(opts);
        if (clt_check->parsed()) return cmd_clt_check(opts);
        if (compare->parsed()) return cmd_compare(opts);
    } catch (const scmix::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const scmix::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const scmix::WorkGuardError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const scmix::NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
