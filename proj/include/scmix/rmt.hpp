#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <vector>

#include "scmix/parallel.hpp"
#include "scmix/rng.hpp"
#include "scmix/sampler.hpp"
#include "scmix/spectral.hpp"
#include "scmix/types.hpp"

namespace scmix {

// ---------------------------------------------------------------------------
// Finite random-matrix approximation of the mixture: d x d grid of N x N
// blocks, block (i,j) = A_ij * X_ij with X a Hermitian-symmetrized family of
// standard complex Gaussian blocks of entry variance 1/N.
// ---------------------------------------------------------------------------

struct BlockMatrixSpec {
    int d = 1;
    int block_N = 100;

    void validate() const {
        if (d <= 0) throw ValidationError("block spec: d must be positive");
        if (block_N <= 0) throw ValidationError("block spec: block_N must be positive");
    }

    int total_dim() const { return d * block_N; }
};

/// H = A o X, Hermitian by construction: off-diagonal blocks are drawn once
/// and mirrored by conjugate transpose; diagonal blocks are symmetrized as
/// (W + W*)/sqrt(2), which keeps entry variance 1/N. Deterministic per
/// (seed, index).
inline Eigen::MatrixXcd sample_mixture_matrix(const VarianceProfile& profile,
                                              const BlockMatrixSpec& spec, std::uint64_t seed,
                                              std::uint64_t index) {
    spec.validate();
    if (profile.dim() != spec.d)
        throw ValidationError("sample_mixture_matrix: profile/spec dimension mismatch");

    const int d = spec.d;
    const int N = spec.block_N;
    const double var = 1.0 / static_cast<double>(N);
    rng::Stream stream(rng::stream_seed(seed, rng::Domain::block_matrix, index));

    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(spec.total_dim(), spec.total_dim());
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j) {
            const double a = profile(i, j);
            if (i == j) {
                Eigen::MatrixXcd w(N, N);
                for (int r = 0; r < N; ++r)
                    for (int c = 0; c < N; ++c) w(r, c) = stream.complex_normal(var);
                Eigen::MatrixXcd block = (w + w.adjoint()) * inv_sqrt2;
                H.block(i * N, i * N, N, N) = a * block;
            } else {
                Eigen::MatrixXcd block(N, N);
                for (int r = 0; r < N; ++r)
                    for (int c = 0; c < N; ++c) block(r, c) = stream.complex_normal(var);
                H.block(i * N, j * N, N, N) = a * block;
                H.block(j * N, i * N, N, N) = (a * block).adjoint().eval();
            }
        }
    }
    return H;
}

/// Ascending eigenvalues of a Hermitian matrix, with trace self-checks.
inline std::vector<double> eigenvalues(const Eigen::MatrixXcd& M) {
    if (M.rows() != M.cols()) throw ValidationError("eigenvalues: matrix must be square");
    const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
    if ((M - M.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw ValidationError("eigenvalues: matrix is not Hermitian within 1e-10");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(M, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw NumericalError("eigenvalues: eigensolver failed to converge");

    std::vector<double> evs(solver.eigenvalues().data(),
                            solver.eigenvalues().data() + M.rows());

    double ev_sum = 0.0;
    for (double v : evs) ev_sum += v;
    const double tr = M.trace().real();
    const double m_norm = std::max(1e-300, M.norm());
    if (std::abs(ev_sum - tr) > 1e-8 * std::max(1.0, m_norm))
        throw NumericalError("eigenvalues: trace identity violated");
    return evs;
}

/// Pooled spectrum over n_matrices independent (profile, matrix) draws; each
/// matrix refreshes the profile, realizing the mean eigenvalue distribution.
inline EmpiricalDistribution ensemble_spectrum(const ProfileSampler& sampler,
                                               const BlockMatrixSpec& spec, int n_matrices,
                                               std::uint64_t seed, int threads = 1,
                                               double work_guard = kDefaultWorkGuard) {
    spec.validate();
    if (sampler.dim() != spec.d)
        throw ValidationError("ensemble_spectrum: sampler/spec dimension mismatch");
    if (n_matrices < 1) throw ValidationError("ensemble_spectrum: need at least one matrix");

    const double dn = static_cast<double>(spec.total_dim());
    if (static_cast<double>(n_matrices) * dn * dn * dn > work_guard)
        throw WorkGuardError("ensemble_spectrum: n_matrices * (dN)^3 exceeds the work guard");

    std::vector<std::vector<double>> slots(static_cast<std::size_t>(n_matrices));
    parallel_for_indexed(static_cast<std::size_t>(n_matrices), threads, [&](std::size_t k) {
        const VarianceProfile profile = sampler.sample(seed, static_cast<std::uint64_t>(k));
        slots[k] = eigenvalues(
            sample_mixture_matrix(profile, spec, seed, static_cast<std::uint64_t>(k)));
    });

    std::vector<double> pooled;
    pooled.reserve(static_cast<std::size_t>(n_matrices) *
                   static_cast<std::size_t>(spec.total_dim()));
    for (const auto& evs : slots) pooled.insert(pooled.end(), evs.begin(), evs.end());
    return EmpiricalDistribution(std::move(pooled));
}

}  // namespace scmix
