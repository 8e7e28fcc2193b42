#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "scmix/pairings.hpp"
#include "scmix/sampler.hpp"
#include "scmix/types.hpp"

namespace scmix {

namespace detail {

// Nested reduction of a pairing into its covariance word. Scanning positions
// left to right with a stack of partially built sequences: an opener starts a
// sequence of child values, a closer applies the covariance map to the
// entrywise product of its children (empty product = I). Top-level values
// multiply entrywise; all intermediates are diagonal.
inline ComplexDiagonal kappa_word(int d, std::span<const double> weights,
                                  const NoncrossingPairing& pi) {
    const int m = pi.size();
    if (m == 0) return ComplexDiagonal::identity(d);

    std::vector<bool> is_opener(static_cast<std::size_t>(m) + 1, false);
    for (const auto& [a, b] : pi.pairs()) is_opener[static_cast<std::size_t>(a)] = true;

    const auto entrywise_product = [d](const std::vector<ComplexDiagonal>& seq) {
        ComplexDiagonal prod = ComplexDiagonal::identity(d);
        for (const auto& v : seq)
            for (int i = 0; i < d; ++i) prod[i] *= v[i];
        return prod;
    };

    std::vector<std::vector<ComplexDiagonal>> stack;
    stack.emplace_back();  // top-level sequence
    for (int pos = 1; pos <= m; ++pos) {
        if (is_opener[static_cast<std::size_t>(pos)]) {
            stack.emplace_back();
        } else {
            ComplexDiagonal value = apply_covariance(d, weights, entrywise_product(stack.back()));
            stack.pop_back();
            stack.back().push_back(std::move(value));
        }
    }
    return entrywise_product(stack.front());
}

inline ComplexDiagonal nc2_moment(int d, std::span<const double> weights, int m) {
    if (m < 0) throw ValidationError("moment order must be nonnegative");
    if (m % 2 != 0) return ComplexDiagonal(d);  // odd moments vanish
    ComplexDiagonal sum(d);
    for (const auto& pi : enumerate_nc2(m)) {
        const ComplexDiagonal term = kappa_word(d, weights, pi);
        for (int i = 0; i < d; ++i) sum[i] += term[i];
    }
    return sum;
}

}  // namespace detail

/// kappa_pi for the mixture with fixed profile A: the nested covariance word
/// of pi evaluated with the map D -> diag(sum_j A_ij^2 D_j).
inline ComplexDiagonal kappa_pi(const VarianceProfile& profile, const NoncrossingPairing& pi) {
    return detail::kappa_word(profile.dim(), profile.squared_entries(), pi);
}

/// m-th operator-valued moment of the mixture with fixed profile A:
/// sum over NC2(m) of kappa_pi. Zero diagonal for odd m.
inline ComplexDiagonal ov_moment(const VarianceProfile& profile, int m) {
    return detail::nc2_moment(profile.dim(), profile.squared_entries(), m);
}

/// Independent oracle for trd(ov_moment): brute-force sum over all index
/// tuples of the profile word times the circular-family Wick value of the
/// operator word. Pair covariance: phi(X_ij X_kl) = delta_il * delta_jk.
inline double wick_entrywise_moment(const VarianceProfile& profile, int m) {
    if (m < 0) throw ValidationError("moment order must be nonnegative");
    if (m == 0) return 1.0;
    if (m % 2 != 0) return 0.0;

    const int d = profile.dim();
    const double work = std::pow(static_cast<double>(d), m) *
                        static_cast<double>(catalan(m / 2));
    if (work > 1e8)
        throw WorkGuardError("wick oracle: d^m * Catalan(m/2) exceeds 1e8");

    const auto pairings = enumerate_nc2(m);
    std::vector<int> idx(static_cast<std::size_t>(m), 0);
    double total = 0.0;
    while (true) {
        double a_word = 1.0;
        for (int t = 0; t < m && a_word != 0.0; ++t)
            a_word *= profile(idx[static_cast<std::size_t>(t)],
                              idx[static_cast<std::size_t>((t + 1) % m)]);
        if (a_word != 0.0) {
            double phi = 0.0;
            for (const auto& pi : pairings) {
                bool match = true;
                for (const auto& [a, b] : pi.pairs()) {
                    // letters are 1-based; letter t is X_{i_t, i_{t+1}} cyclically
                    const int ia = idx[static_cast<std::size_t>(a - 1)];
                    const int ja = idx[static_cast<std::size_t>(a % m)];
                    const int ib = idx[static_cast<std::size_t>(b - 1)];
                    const int jb = idx[static_cast<std::size_t>(b % m)];
                    if (ia != jb || ja != ib) {
                        match = false;
                        break;
                    }
                }
                if (match) phi += 1.0;
            }
            total += a_word * phi;
        }
        // odometer over index tuples
        int t = m - 1;
        while (t >= 0 && idx[static_cast<std::size_t>(t)] == d - 1) {
            idx[static_cast<std::size_t>(t)] = 0;
            --t;
        }
        if (t < 0) break;
        ++idx[static_cast<std::size_t>(t)];
    }
    return total / static_cast<double>(d);
}

struct MomentEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

/// Monte-Carlo mean moment E[trd E(H^m)]: average of per-draw combinatorial
/// moments over M profile draws, with the empirical standard error.
inline MomentEstimate mean_moment(const ProfileSampler& sampler, int m, int draws,
                                  std::uint64_t seed) {
    if (draws < 1) throw ValidationError("mean_moment: need at least one draw");
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(draws));
    for (int k = 0; k < draws; ++k) {
        const VarianceProfile a = sampler.sample(seed, static_cast<std::uint64_t>(k));
        values.push_back(normalized_trace(ov_moment(a, m)).real());
    }
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(draws);
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    const double std_error =
        draws > 1 ? std::sqrt(var / (static_cast<double>(draws) - 1.0) /
                              static_cast<double>(draws))
                  : 0.0;
    return {mean, std_error};
}

/// Free-independence value of phi(b1 b2 b1 b2) from the marginal first and
/// second moments of b1 and b2.
inline double free_alternating_fourth_moment(double phi_b1, double phi_b1_sq, double phi_b2,
                                             double phi_b2_sq) {
    return phi_b1_sq * phi_b2 * phi_b2 + phi_b1 * phi_b1 * phi_b2_sq -
           phi_b1 * phi_b1 * phi_b2 * phi_b2;
}

}  // namespace scmix
