#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "scmix/moments.hpp"
#include "scmix/parallel.hpp"
#include "scmix/rmt.hpp"
#include "scmix/rng.hpp"
#include "scmix/sampler.hpp"
#include "scmix/types.hpp"

namespace scmix {

// ---------------------------------------------------------------------------
// Central-limit-theorem machinery: the mean covariance map, limiting moments
// and finite-scale empirical verification against block-matrix simulations.
// ---------------------------------------------------------------------------

/// Entry (i,j) holds E[A_ij^2]; with the standard circular covariance this is
/// the full covariance data of the CLT limit.
class MeanCovarianceProfile {
public:
    MeanCovarianceProfile(int d, std::vector<double> second_moments)
        : d_(d), second_moments_(std::move(second_moments)) {
        if (d_ <= 0) throw ValidationError("mean covariance: dimension must be positive");
        if (second_moments_.size() != static_cast<std::size_t>(d_) * d_)
            throw ValidationError("mean covariance: entry count does not match dimension");
        for (int i = 0; i < d_; ++i)
            for (int j = 0; j < d_; ++j) {
                const double v = second_moments_[idx(i, j)];
                if (!std::isfinite(v) || v < 0.0)
                    throw ValidationError("mean covariance: entries must be finite nonnegative");
                if (second_moments_[idx(i, j)] != second_moments_[idx(j, i)])
                    throw ValidationError("mean covariance: matrix must be symmetric");
            }
    }

    /// Degenerate randomness: second moments of a fixed profile are its squares.
    static MeanCovarianceProfile from_profile(const VarianceProfile& profile) {
        return MeanCovarianceProfile(profile.dim(), profile.squared_entries());
    }

    /// Analytic E[A_ij^2] per entry law of the sampler.
    static MeanCovarianceProfile from_sampler(const ProfileSampler& sampler) {
        const int d = sampler.dim();
        std::vector<double> sm(static_cast<std::size_t>(d) * d, 0.0);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                sm[static_cast<std::size_t>(i) * d + j] = sampler.entry_second_moment(i, j);
        return MeanCovarianceProfile(d, std::move(sm));
    }

    int dim() const noexcept { return d_; }
    double operator()(int i, int j) const { return second_moments_[idx(i, j)]; }
    const std::vector<double>& second_moments() const noexcept { return second_moments_; }

private:
    std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) * d_ + j; }

    int d_;
    std::vector<double> second_moments_;
};

/// hat_eta(D)_i = sum_j E[A_ij^2] D_j: same covariance application as eta with
/// the squared profile replaced by its expectation.
inline ComplexDiagonal hat_eta(const MeanCovarianceProfile& cov, const ComplexDiagonal& diag) {
    return apply_covariance(cov.dim(), cov.second_moments(), diag);
}

/// Limiting mean m-th moment of the normalized sums: sum over NC2(m) of the
/// hat_eta covariance words. Identical code path to ov_moment, so a fixed
/// profile's squares reproduce its moments exactly.
inline ComplexDiagonal clt_limit_moment(const MeanCovarianceProfile& cov, int m) {
    return detail::nc2_moment(cov.dim(), cov.second_moments(), m);
}

struct CltEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

namespace detail {

inline void check_clt_work(int n_sum, int matrix_N, int d, int trials, double work_guard) {
    const double dn = static_cast<double>(d) * matrix_N;
    const double sampling = static_cast<double>(trials) * n_sum * dn * dn;
    const double eig = static_cast<double>(trials) * dn * dn * dn;
    if (sampling + eig > work_guard)
        throw WorkGuardError("clt simulation: requested work exceeds the work guard");
}

/// One normalized sum S = (Z^(1) + ... + Z^(n_sum)) / sqrt(n_sum), each
/// summand an independent (profile, block-Gaussian) mixture draw.
inline Eigen::MatrixXcd sample_normalized_sum(const ProfileSampler& sampler,
                                              const BlockMatrixSpec& spec, int n_sum,
                                              std::uint64_t trial_seed) {
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(spec.total_dim(), spec.total_dim());
    for (int n = 0; n < n_sum; ++n) {
        const VarianceProfile profile =
            sampler.sample(trial_seed, static_cast<std::uint64_t>(n));
        s += sample_mixture_matrix(profile, spec, trial_seed, static_cast<std::uint64_t>(n));
    }
    s /= std::sqrt(static_cast<double>(n_sum));
    return s;
}

}  // namespace detail

/// Empirical E[trd E(S^m)] for several m at once (the eigendecomposition per
/// trial is shared): trials independent normalized sums, each reduced to
/// normalized-trace moments of its spectrum.
inline std::vector<CltEstimate> empirical_clt_moments(
    const ProfileSampler& sampler, int n_sum, int matrix_N, std::span<const int> orders,
    int trials, std::uint64_t seed, int threads = 1,
    double work_guard = kDefaultWorkGuard) {
    if (n_sum < 1) throw ValidationError("clt: n_sum must be positive");
    if (trials < 1) throw ValidationError("clt: need at least one trial");
    for (int m : orders)
        if (m < 0) throw ValidationError("clt: moment order must be nonnegative");
    detail::check_clt_work(n_sum, matrix_N, sampler.dim(), trials, work_guard);

    const BlockMatrixSpec spec{sampler.dim(), matrix_N};
    const double dn = static_cast<double>(spec.total_dim());

    std::vector<std::vector<double>> per_trial(static_cast<std::size_t>(trials));
    parallel_for_indexed(static_cast<std::size_t>(trials), threads, [&](std::size_t t) {
        const std::uint64_t trial_seed =
            rng::stream_seed(seed, rng::Domain::clt_trial, static_cast<std::uint64_t>(t));
        const Eigen::MatrixXcd s =
            detail::sample_normalized_sum(sampler, spec, n_sum, trial_seed);
        const std::vector<double> evs = eigenvalues(s);
        std::vector<double> moments(orders.size(), 0.0);
        for (std::size_t q = 0; q < orders.size(); ++q) {
            double acc = 0.0;
            for (double ev : evs) acc += std::pow(ev, orders[q]);
            moments[q] = acc / dn;
        }
        per_trial[t] = std::move(moments);
    });

    std::vector<CltEstimate> out(orders.size());
    for (std::size_t q = 0; q < orders.size(); ++q) {
        double mean = 0.0;
        for (const auto& tr : per_trial) mean += tr[q];
        mean /= static_cast<double>(trials);
        double var = 0.0;
        for (const auto& tr : per_trial) var += (tr[q] - mean) * (tr[q] - mean);
        out[q].value = mean;
        out[q].std_error = trials > 1
                               ? std::sqrt(var / (static_cast<double>(trials) - 1.0) /
                                           static_cast<double>(trials))
                               : 0.0;
    }
    return out;
}

inline CltEstimate empirical_clt_moment(const ProfileSampler& sampler, int n_sum, int matrix_N,
                                        int m, int trials, std::uint64_t seed, int threads = 1,
                                        double work_guard = kDefaultWorkGuard) {
    const int orders[1] = {m};
    return empirical_clt_moments(sampler, n_sum, matrix_N, orders, trials, seed, threads,
                                 work_guard)[0];
}

struct PairCancellationResult {
    ComplexDiagonal lhs;  ///< simulated E[E(Z1 Z2 B Z2 Z1)]
    ComplexDiagonal rhs;  ///< exact hat_eta(hat_eta(B))
    double rel_err = 0.0;

    PairCancellationResult() : lhs(1), rhs(1) {}
    explicit PairCancellationResult(int d) : lhs(d), rhs(d) {}
};

/// Estimate E[E(Z^(1) Z^(2) B Z^(2) Z^(1))] with two independent mixture
/// draws per trial and compare with the exact composition hat_eta(hat_eta(B)).
/// B is a real diagonal d x d matrix.
inline PairCancellationResult pair_cancellation_check(
    const ProfileSampler& sampler, int matrix_N, const std::vector<double>& b_diag, int trials,
    std::uint64_t seed, int threads = 1, double work_guard = kDefaultWorkGuard) {
    const int d = sampler.dim();
    if (static_cast<int>(b_diag.size()) != d)
        throw ValidationError("pair cancellation: B dimension mismatch");
    if (trials < 1) throw ValidationError("pair cancellation: need at least one trial");
    {
        const double dn = static_cast<double>(d) * matrix_N;
        if (3.0 * static_cast<double>(trials) * dn * dn * dn > work_guard)
            throw WorkGuardError("pair cancellation: requested work exceeds the work guard");
    }

    const BlockMatrixSpec spec{d, matrix_N};
    const int N = matrix_N;
    const int dn = spec.total_dim();

    std::vector<std::vector<cplx>> slots(static_cast<std::size_t>(trials));
    parallel_for_indexed(static_cast<std::size_t>(trials), threads, [&](std::size_t t) {
        const std::uint64_t trial_seed =
            rng::stream_seed(seed, rng::Domain::clt_trial, static_cast<std::uint64_t>(t));
        const Eigen::MatrixXcd z1 = detail::sample_normalized_sum(
            sampler, spec, 1, rng::stream_seed(trial_seed, rng::Domain::generic, 0));
        const Eigen::MatrixXcd z2 = detail::sample_normalized_sum(
            sampler, spec, 1, rng::stream_seed(trial_seed, rng::Domain::generic, 1));

        // B (x) I_N as a column scaling of Z2, then C = Z2 * (B Z2).
        Eigen::MatrixXcd bz2 = z2;
        for (int j = 0; j < d; ++j) bz2.middleRows(j * N, N) *= b_diag[static_cast<std::size_t>(j)];
        const Eigen::MatrixXcd c = z2 * bz2;
        const Eigen::MatrixXcd g = c * z1;

        // Block-diagonal partial traces of Z1 * G without forming the product:
        // tr((Z1 G)_ii) = sum_{k in block i} sum_m Z1(k, m) G(m, k).
        std::vector<cplx> lhs(static_cast<std::size_t>(d), cplx(0.0, 0.0));
        for (int i = 0; i < d; ++i) {
            cplx acc(0.0, 0.0);
            for (int k = i * N; k < (i + 1) * N; ++k)
                for (int m = 0; m < dn; ++m) acc += z1(k, m) * g(m, k);
            lhs[static_cast<std::size_t>(i)] = acc / static_cast<double>(N);
        }
        slots[t] = std::move(lhs);
    });

    PairCancellationResult result(d);
    for (const auto& trial : slots)
        for (int i = 0; i < d; ++i) result.lhs[i] += trial[static_cast<std::size_t>(i)];
    for (int i = 0; i < d; ++i) result.lhs[i] /= static_cast<double>(trials);

    const MeanCovarianceProfile cov = MeanCovarianceProfile::from_sampler(sampler);
    std::vector<cplx> b_values(b_diag.begin(), b_diag.end());
    result.rhs = hat_eta(cov, hat_eta(cov, ComplexDiagonal(std::move(b_values))));

    const double rhs_norm = l1_norm(result.rhs);
    const double diff = l1_distance(result.lhs, result.rhs);
    result.rel_err = rhs_norm > 0.0 ? diff / rhs_norm : l1_norm(result.lhs);
    return result;
}

}  // namespace scmix
