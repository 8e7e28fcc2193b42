#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "scmix/parallel.hpp"
#include "scmix/sampler.hpp"
#include "scmix/solver.hpp"
#include "scmix/spectral.hpp"
#include "scmix/types.hpp"

namespace scmix {

/// Any deterministic map (seed, draw_index) -> profile can drive the
/// Monte-Carlo average; ProfileSampler is the standard one.
using ProfileSource = std::function<VarianceProfile(std::uint64_t, std::uint64_t)>;

struct MeanTransformResult {
    SpectralCurve curve;                        ///< trace transform + density
    std::vector<ComplexDiagonal> mean_diagonal; ///< per grid point
    int draws = 0;                              ///< requested draw count M
    int discarded = 0;                          ///< non-converged draws
    std::vector<double> per_point_std_error;    ///< stderr of Im(trace g)
    long long total_iterations = 0;             ///< summed over kept draws/points
    double max_residual = 0.0;                  ///< worst fixed-point residual kept
};

namespace detail {

struct DrawCurve {
    std::vector<cplx> diag;  // point-major, d entries per point
    long long iterations = 0;
    double max_residual = 0.0;
    bool kept = false;
};

}  // namespace detail

/// Mean Cauchy transform over M profile draws: each draw runs a warm-started
/// grid sweep (reset to -iI between draws); draws with any non-converged
/// point are discarded and counted. The combine step runs in draw order, so
/// results are bit-identical for a fixed seed regardless of worker count.
inline MeanTransformResult mean_cauchy(const ProfileSource& source,
                                       const std::vector<double>& xs,
                                       const SolverSettings& settings, int draws,
                                       std::uint64_t seed, int threads = 1) {
    settings.validate();
    if (draws < 1) throw ValidationError("mean_cauchy: need at least one draw");
    if (xs.empty()) throw ValidationError("mean_cauchy: empty grid");

    const std::size_t n_points = xs.size();
    std::vector<detail::DrawCurve> slots(static_cast<std::size_t>(draws));
    const int expected_dim = source(seed, 0).dim();

    parallel_for_indexed(static_cast<std::size_t>(draws), threads, [&](std::size_t k) {
        const VarianceProfile profile = source(seed, static_cast<std::uint64_t>(k));
        if (profile.dim() != expected_dim)
            throw ValidationError("mean_cauchy: profile source changed dimension across draws");
        const auto points = solve_grid(profile, xs, settings);
        detail::DrawCurve& slot = slots[k];
        slot.kept = true;
        slot.diag.reserve(n_points * static_cast<std::size_t>(profile.dim()));
        for (const FixedPointResult& r : points) {
            if (!r.converged) slot.kept = false;
            slot.iterations += r.iterations;
            slot.max_residual = std::max(slot.max_residual, r.residual);
            for (const cplx& v : r.g.values()) slot.diag.push_back(v);
        }
        if (!slot.kept) slot.diag.clear();
    });

    int kept = 0;
    MeanTransformResult result;
    result.draws = draws;

    int d = 0;
    for (const auto& slot : slots)
        if (slot.kept) {
            d = static_cast<int>(slot.diag.size() / n_points);
            break;
        }
    if (d == 0) throw NumericalError("mean_cauchy: every draw was discarded");

    std::vector<cplx> sum(n_points * static_cast<std::size_t>(d), cplx(0.0, 0.0));
    std::vector<std::vector<double>> im_trace(n_points);
    for (const auto& slot : slots) {
        if (!slot.kept) {
            ++result.discarded;
            continue;
        }
        ++kept;
        result.total_iterations += slot.iterations;
        result.max_residual = std::max(result.max_residual, slot.max_residual);
        for (std::size_t p = 0; p < n_points; ++p) {
            cplx tr(0.0, 0.0);
            for (int i = 0; i < d; ++i) {
                const cplx v = slot.diag[p * static_cast<std::size_t>(d) +
                                         static_cast<std::size_t>(i)];
                sum[p * static_cast<std::size_t>(d) + static_cast<std::size_t>(i)] += v;
                tr += v;
            }
            im_trace[p].push_back((tr / static_cast<double>(d)).imag());
        }
    }

    result.mean_diagonal.reserve(n_points);
    std::vector<cplx> trace_curve(n_points);
    const double norm_bound = static_cast<double>(d) / settings.epsilon * (1.0 + 1e-9);
    for (std::size_t p = 0; p < n_points; ++p) {
        ComplexDiagonal mean(d);
        for (int i = 0; i < d; ++i)
            mean[i] = sum[p * static_cast<std::size_t>(d) + static_cast<std::size_t>(i)] /
                      static_cast<double>(kept);
        if (l1_norm(mean) > norm_bound)
            throw NumericalError("mean_cauchy: averaged transform escaped the d/epsilon ball");
        trace_curve[p] = normalized_trace(mean);
        result.mean_diagonal.push_back(std::move(mean));
    }

    result.per_point_std_error.resize(n_points, 0.0);
    if (kept > 1) {
        for (std::size_t p = 0; p < n_points; ++p) {
            double mean_im = 0.0;
            for (double v : im_trace[p]) mean_im += v;
            mean_im /= static_cast<double>(kept);
            double var = 0.0;
            for (double v : im_trace[p]) var += (v - mean_im) * (v - mean_im);
            result.per_point_std_error[p] =
                std::sqrt(var / (static_cast<double>(kept) - 1.0) / static_cast<double>(kept));
        }
    }

    result.curve = make_curve(settings.epsilon, xs, std::move(trace_curve));
    return result;
}

inline MeanTransformResult mean_cauchy(const ProfileSampler& sampler,
                                       const std::vector<double>& xs,
                                       const SolverSettings& settings, int draws,
                                       std::uint64_t seed, int threads = 1) {
    return mean_cauchy(
        [&sampler](std::uint64_t s, std::uint64_t k) { return sampler.sample(s, k); }, xs,
        settings, draws, seed, threads);
}

}  // namespace scmix
