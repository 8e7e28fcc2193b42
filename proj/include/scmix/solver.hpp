#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "scmix/types.hpp"

namespace scmix {

// ---------------------------------------------------------------------------
// Deterministic fixed-point machinery for a fixed variance profile: the
// covariance map eta, the resolvent-style iteration map, convergence control,
// warm-started grid sweeps and the constant-row-sum closed form.
// ---------------------------------------------------------------------------

struct FixedPointResult {
    ComplexDiagonal g;
    int iterations = 0;
    double residual = 0.0;  ///< ||(zI - eta(g)) g - I||_1
    bool converged = false;

    FixedPointResult() : g(1) {}
    explicit FixedPointResult(int d) : g(d) {}
};

/// eta(D)_i = sum_j A_ij^2 D_j
inline ComplexDiagonal eta(const VarianceProfile& profile, const ComplexDiagonal& diag) {
    return apply_covariance(profile.dim(), profile.squared_entries(), diag);
}

/// One application of the iteration map: W_i = 1 / (z - eta(D)_i).
/// For Im(z) > 0 and Im(D) <= 0 the denominator has Im >= Im(z), so the
/// result lies in the open lower half-plane with |W_i| <= 1/Im(z).
inline ComplexDiagonal t_map(const VarianceProfile& profile, cplx z,
                             const ComplexDiagonal& diag) {
    if (!(z.imag() > 0.0)) throw ValidationError("t_map: Im(z) must be positive");
    if (profile.dim() != diag.dim()) throw ValidationError("t_map: dimension mismatch");
    const int d = profile.dim();
    ComplexDiagonal out(d);
    for (int i = 0; i < d; ++i) {
        cplx acc(0.0, 0.0);
        const double* row = profile.squared_entries().data() + static_cast<std::size_t>(i) * d;
        for (int j = 0; j < d; ++j) acc += row[j] * diag[j];
        out[i] = 1.0 / (z - acc);
    }
    return out;
}

inline double fixed_point_residual(const VarianceProfile& profile, cplx z,
                                   const ComplexDiagonal& g) {
    const ComplexDiagonal e = eta(profile, g);
    double r = 0.0;
    for (int i = 0; i < profile.dim(); ++i) r += std::abs((z - e[i]) * g[i] - 1.0);
    return r;
}

/// Iterate the map from `init` until the successive difference drops below
/// settings.tol in the 1-norm or max_iter is reached. Non-convergence is a
/// flagged result, not an exception, so batch callers can discard and count.
inline FixedPointResult solve_point(const VarianceProfile& profile, cplx z,
                                    const ComplexDiagonal& init,
                                    const SolverSettings& settings) {
    settings.validate();
    if (!(z.imag() > 0.0)) throw ValidationError("solve_point: Im(z) must be positive");
    if (profile.dim() != init.dim()) throw ValidationError("solve_point: dimension mismatch");
    if (!in_closed_lower_half_plane(init))
        throw ValidationError("solve_point: initial value must have Im <= 0 entrywise");

    const int d = profile.dim();
    const double norm_bound = static_cast<double>(d) / z.imag() * (1.0 + 1e-9);

    FixedPointResult result(d);
    ComplexDiagonal current = init;
    for (int n = 1; n <= settings.max_iter; ++n) {
        const ComplexDiagonal next = t_map(profile, z, current);
        if (l1_norm(next) > norm_bound)
            throw NumericalError("solve_point: iterate escaped the d/Im(z) ball");
        const double diff = l1_distance(next, current);
        current = next;
        result.iterations = n;
        if (diff < settings.tol) {
            result.converged = true;
            break;
        }
    }
    result.g = std::move(current);
    result.residual = fixed_point_residual(profile, z, result.g);
    return result;
}

inline FixedPointResult solve_point(const VarianceProfile& profile, cplx z,
                                    const SolverSettings& settings) {
    return solve_point(profile, z, ComplexDiagonal::minus_i(profile.dim()), settings);
}

/// Sweep z = xs[k] + i*epsilon left to right, warm-starting each point with
/// the previous final iterate; the first point starts at -iI. Per-point
/// non-convergence flags propagate in the results.
inline std::vector<FixedPointResult> solve_grid(const VarianceProfile& profile,
                                                std::span<const double> xs,
                                                const SolverSettings& settings) {
    settings.validate();
    for (std::size_t k = 0; k + 1 < xs.size(); ++k)
        if (!(xs[k] < xs[k + 1]))
            throw ValidationError("solve_grid: abscissae must be strictly increasing");

    std::vector<FixedPointResult> results;
    results.reserve(xs.size());
    ComplexDiagonal start = ComplexDiagonal::minus_i(profile.dim());
    for (const double x : xs) {
        const cplx z(x, settings.epsilon);
        FixedPointResult r = solve_point(profile, z, start, settings);
        start = r.g;
        results.push_back(std::move(r));
    }
    return results;
}

/// Constant-row-sum closed form: g(z) = (z - sqrt(z^2 - 4K)) / (2K) with the
/// square-root branch picked so that Im(g) < 0 (the branch where
/// sqrt(z^2-4K) ~ z at infinity). Valid for K > 0, Im(z) > 0.
///
/// Both roots of K g^2 - z g + 1 = 0 are formed cancellation-free: with
/// s = sqrt(z^2-4K) and the sign chosen so |z -/+ s| is the larger sum,
/// the roots are 2/(z+s) and (z+s)/(2K) (or the mirrored pair).
inline cplx closed_form_constant_rowsum(double K, cplx z) {
    if (!(K > 0.0)) throw ValidationError("closed form: K must be positive");
    if (!(z.imag() > 0.0)) throw ValidationError("closed form: Im(z) must be positive");
    const cplx s = std::sqrt(z * z - 4.0 * K);
    const bool aligned = z.real() * s.real() + z.imag() * s.imag() >= 0.0;
    const cplx big = aligned ? z + s : z - s;
    const cplx small_root = 2.0 / big;
    const cplx large_root = big / (2.0 * K);
    return small_root.imag() < 0.0 ? small_root : large_root;
}

}  // namespace scmix
