// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// fail. Each criterion pins its tolerances and seeds; runtime budgets are
// enforced alongside the numerical thresholds.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "scmix/scmix.hpp"

using namespace scmix;

namespace {

struct Criterion {
    int id;
    std::string name;
    bool pass;
    std::string detail;
    double seconds;
};

std::vector<Criterion> g_results;

class Timer {
public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

void record(int id, const std::string& name, bool pass, const std::string& detail,
            double seconds) {
    g_results.push_back({id, name, pass, detail, seconds});
    std::printf("[%s] criterion %d: %s (%s; %.1f s)\n", pass ? "PASS" : "FAIL", id,
                name.c_str(), detail.c_str(), seconds);
    std::fflush(stdout);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

// Invariant bookkeeping for criterion 9, fed by every solver output the other
// criteria produce.
struct InvariantRecorder {
    double worst_im = -1.0;        // max over outputs of max_i Im(g_i); must stay < 0
    double worst_norm_ratio = 0.0; // max of ||g||_1 * eps / d; must stay <= 1 (+eps)
    double worst_residual_ratio = 0.0;  // max of residual / tol; must stay <= 10
    std::vector<double> normalizations;
    long long outputs = 0;

    void add_fixed_point(const FixedPointResult& r, const SolverSettings& s, int d) {
        ++outputs;
        for (const cplx v : r.g) worst_im = std::max(worst_im, v.imag());
        worst_norm_ratio =
            std::max(worst_norm_ratio, l1_norm(r.g) * s.epsilon / static_cast<double>(d));
        worst_residual_ratio = std::max(worst_residual_ratio, r.residual / s.tol);
    }

    void add_mean_transform(const MeanTransformResult& r, const SolverSettings& s, int d) {
        for (const auto& diag : r.mean_diagonal) {
            ++outputs;
            for (const cplx v : diag) worst_im = std::max(worst_im, v.imag());
            worst_norm_ratio =
                std::max(worst_norm_ratio, l1_norm(diag) * s.epsilon / static_cast<double>(d));
        }
        worst_residual_ratio = std::max(worst_residual_ratio, r.max_residual / s.tol);
        normalizations.push_back(quadrature_moment(r.curve, 0));
    }

    void add_normalization(const SpectralCurve& curve) {
        normalizations.push_back(quadrature_moment(curve, 0));
    }
};

InvariantRecorder g_invariants;

SpectralCurve curve_from_results(const std::vector<double>& xs,
                                 const std::vector<FixedPointResult>& results,
                                 double epsilon) {
    std::vector<cplx> g;
    g.reserve(results.size());
    for (const auto& r : results) g.push_back(normalized_trace(r.g));
    return make_curve(epsilon, xs, std::move(g));
}

// --- criterion 1 -----------------------------------------------------------

void criterion_closed_form() {
    const Timer timer;
    const auto profile = VarianceProfile::constant(3, 1.0);  // K = 3
    SolverSettings settings;
    settings.tol = 1e-10;
    settings.epsilon = 1e-3;
    settings.max_iter = 200000;
    const auto xs = make_grid(-4.0, 4.0, 0.01);
    const auto results = solve_grid(profile, xs, settings);

    double worst = 0.0;
    bool all_converged = true;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        all_converged = all_converged && results[k].converged;
        const cplx expected =
            closed_form_constant_rowsum(3.0, cplx(xs[k], settings.epsilon));
        for (const cplx v : results[k].g) worst = std::max(worst, std::abs(v - expected));
        g_invariants.add_fixed_point(results[k], settings, 3);
    }
    g_invariants.add_normalization(curve_from_results(xs, results, settings.epsilon));

    const double secs = timer.seconds();
    record(1, "closed-form agreement, constant row sums", worst <= 1e-8 && all_converged && secs < 5.0,
           "max |g - closed form| = " + fmt(worst), secs);
}

// --- criterion 2 -----------------------------------------------------------

void criterion_unitary_profile() {
    const Timer timer;
    const auto profile = VarianceProfile::from_rows({{0, 1, 0}, {1, 0, 0}, {0, 0, 1}});
    SolverSettings settings;
    settings.tol = 1e-10;
    settings.epsilon = 1e-3;
    settings.max_iter = 200000;
    const auto xs = make_grid(-4.0, 4.0, 0.01);
    const auto results = solve_grid(profile, xs, settings);

    double worst = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const cplx expected =
            closed_form_constant_rowsum(1.0, cplx(xs[k], settings.epsilon));
        const double density = -normalized_trace(results[k].g).imag() / kPi;
        worst = std::max(worst, std::abs(density - (-expected.imag() / kPi)));
        g_invariants.add_fixed_point(results[k], settings, 3);
    }
    g_invariants.add_normalization(curve_from_results(xs, results, settings.epsilon));

    const double secs = timer.seconds();
    record(2, "unitary permutation profile equals the standard semicircle",
           worst <= 1e-8 && secs < 5.0, "max density gap = " + fmt(worst), secs);
}

// --- criterion 3 -----------------------------------------------------------

void criterion_kappa_vs_wick() {
    const Timer timer;
    std::mt19937_64 gen(5150);
    std::uniform_real_distribution<double> u(0.0, 1.5);
    double worst = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        const int d = 1 + rep % 3;
        std::vector<double> entries(static_cast<std::size_t>(d) * d, 0.0);
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j) {
                const double a = u(gen);
                entries[static_cast<std::size_t>(i) * d + j] = a;
                entries[static_cast<std::size_t>(j) * d + i] = a;
            }
        const VarianceProfile profile(d, entries);
        for (int m = 0; m <= 8; ++m) {
            const double via_kappa = normalized_trace(ov_moment(profile, m)).real();
            const double via_wick = wick_entrywise_moment(profile, m);
            worst = std::max(worst, std::abs(via_kappa - via_wick) /
                                        std::max(1.0, std::abs(via_wick)));
        }
    }
    const double secs = timer.seconds();
    record(3, "kappa recursion vs entrywise Wick oracle", worst <= 1e-10 && secs < 30.0,
           "max relative gap = " + fmt(worst), secs);
}

// --- criterion 4 -----------------------------------------------------------

void criterion_catalan_counts() {
    const Timer timer;
    const std::uint64_t expected[] = {1, 2, 5, 14, 42, 132, 429, 1430};
    bool ok = true;
    for (int k = 1; k <= 8; ++k) ok = ok && enumerate_nc2(2 * k).size() == expected[k - 1];
    const double secs = timer.seconds();
    record(4, "non-crossing pairing counts are Catalan numbers", ok && secs < 1.0,
           ok ? "counts match for m = 2..16" : "count mismatch", secs);
}

// --- criteria 5 and 6 (shared configuration) -------------------------------

struct RayleighRun {
    MeanTransformResult theory;
    SolverSettings settings;
    std::uint64_t seed = 0;
    int draws = 0;
};

RayleighRun g_rayleigh_run{{}, {}, 0, 0};

void criterion_figure_reproduction() {
    const Timer timer;
    const int d = 3;
    const ProfileSampler sampler(d, RayleighLaw{1.0});
    SolverSettings settings;
    settings.tol = 1e-3;
    settings.epsilon = 1e-3;
    settings.max_iter = 10000;
    const auto xs = make_grid(-12.0, 12.0, 0.01);
    const int draws = 1000;
    const std::uint64_t seed = 20250601;

    auto theory = mean_cauchy(sampler, xs, settings, draws, seed);
    g_invariants.add_mean_transform(theory, settings, d);

    const BlockMatrixSpec spec{d, 100};
    const auto emp = ensemble_spectrum(sampler, spec, 200, 8675309);

    const double l1 = l1_density_distance(theory.curve, emp, 0.1);
    const double ks = ks_distance(theory.curve, emp);

    g_rayleigh_run = {std::move(theory), settings, seed, draws};

    const double secs = timer.seconds();
    record(5, "figure reproduction at reduced scale",
           l1 <= 0.08 && ks <= 0.03 && secs < 300.0,
           "L1 = " + fmt(l1) + ", KS = " + fmt(ks) + ", discarded = " +
               std::to_string(g_rayleigh_run.theory.discarded),
           secs);
}

void criterion_moment_consistency() {
    const Timer timer;
    const ProfileSampler sampler(3, RayleighLaw{1.0});
    bool ok = !g_rayleigh_run.theory.curve.xs.empty();
    std::string detail;
    if (ok) {
        for (const int m : {2, 4, 6}) {
            const double quad = quadrature_moment(g_rayleigh_run.theory.curve, m);
            const auto mm =
                mean_moment(sampler, m, g_rayleigh_run.draws, g_rayleigh_run.seed);
            const double rel = std::abs(quad - mm.value) / std::abs(mm.value);
            if (!detail.empty()) detail += ", ";
            detail += "m=" + std::to_string(m) + ": " + fmt(rel * 100.0) + "%";
            ok = ok && rel <= 0.05;
        }
    } else {
        detail = "criterion 5 did not produce a curve";
    }
    const double secs = timer.seconds();
    record(6, "quadrature moments match mean moments", ok && secs < 60.0, detail, secs);
}

// --- criterion 7 -----------------------------------------------------------

void criterion_clt_convergence() {
    const Timer timer;
    const ProfileSampler sampler(2, RayleighLaw{1.0});
    const auto cov = MeanCovarianceProfile::from_sampler(sampler);
    const double limit2 = normalized_trace(clt_limit_moment(cov, 2)).real();
    const double limit4 = normalized_trace(clt_limit_moment(cov, 4)).real();
    const std::vector<int> orders = {2, 4};
    const int matrix_N = 200;
    const int trials = 50;

    bool m2_ok = true;
    bool monotone_ok = true;
    double final_rel4 = 0.0;
    double prev_err4 = 0.0, prev_se4 = 0.0;
    bool first = true;
    std::string detail;
    for (const int n_sum : {1, 4, 16, 64}) {
        const auto est =
            empirical_clt_moments(sampler, n_sum, matrix_N, orders, trials, 1156);
        m2_ok = m2_ok && std::abs(est[0].value - limit2) <= 3.0 * est[0].std_error;
        const double err4 = std::abs(est[1].value - limit4);
        if (!first && err4 > prev_err4 + 2.0 * (prev_se4 + est[1].std_error))
            monotone_ok = false;
        prev_err4 = err4;
        prev_se4 = est[1].std_error;
        first = false;
        final_rel4 = err4 / limit4;
        if (!detail.empty()) detail += ", ";
        detail += "N=" + std::to_string(n_sum) + ": m4 err " + fmt(err4 / limit4 * 100.0) + "%";
    }
    const double secs = timer.seconds();
    record(7, "central limit convergence of mean moments",
           m2_ok && monotone_ok && final_rel4 <= 0.10 && secs < 300.0, detail, secs);
}

// --- criterion 8 -----------------------------------------------------------

void criterion_pair_cancellation() {
    const Timer timer;
    const auto sampler = ProfileSampler::constant_profile(VarianceProfile::constant(2, 1.0));
    const auto r = pair_cancellation_check(sampler, 400, {1.0, 1.0}, 50, 4242);
    const bool rhs_ok =
        r.rhs[0] == cplx(4.0, 0.0) && r.rhs[1] == cplx(4.0, 0.0);
    const double secs = timer.seconds();
    record(8, "pair cancellation against the exact composition",
           rhs_ok && r.rel_err <= 0.05 && secs < 120.0,
           "rel err = " + fmt(r.rel_err * 100.0) + "%", secs);
}

// --- criterion 9 -----------------------------------------------------------

void criterion_invariants() {
    const Timer timer;
    bool ok = g_invariants.outputs > 0;
    ok = ok && g_invariants.worst_im < 0.0;
    ok = ok && g_invariants.worst_norm_ratio <= 1.0 + 1e-9;
    ok = ok && g_invariants.worst_residual_ratio <= 10.0;
    bool norm_ok = !g_invariants.normalizations.empty();
    for (const double mass : g_invariants.normalizations)
        norm_ok = norm_ok && mass >= 0.97 && mass <= 1.0;
    ok = ok && norm_ok;
    const double secs = timer.seconds();
    record(9, "invariant suite over all solver outputs", ok,
           "outputs = " + std::to_string(g_invariants.outputs) +
               ", worst Im = " + fmt(g_invariants.worst_im) +
               ", norm ratio = " + fmt(g_invariants.worst_norm_ratio) +
               ", residual/tol = " + fmt(g_invariants.worst_residual_ratio),
           secs);
}

}  // namespace

int main() {
    criterion_closed_form();
    criterion_unitary_profile();
    criterion_kappa_vs_wick();
    criterion_catalan_counts();
    criterion_figure_reproduction();
    criterion_moment_consistency();
    criterion_clt_convergence();
    criterion_pair_cancellation();
    criterion_invariants();

    int failures = 0;
    for (const auto& c : g_results)
        if (!c.pass) ++failures;
    if (failures == 0) {
        std::printf("all %zu criteria passed\n", g_results.size());
    } else {
        std::printf("%d criteria FAILED\n", failures);
    }
    return failures == 0 ? 0 : 1;
}
