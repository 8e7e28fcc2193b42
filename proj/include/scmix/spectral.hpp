#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "scmix/types.hpp"

namespace scmix {

// ---------------------------------------------------------------------------
// Stieltjes inversion and density post-processing.
// ---------------------------------------------------------------------------

/// density = -Im(g)/pi. A tiny positive imaginary part (<= 1e-12) is treated
/// as numerical leakage and clamped to zero density; anything larger means
/// the upstream solver produced an invalid transform value.
inline std::vector<double> stieltjes_density(std::span<const cplx> g) {
    std::vector<double> density;
    density.reserve(g.size());
    for (const cplx& v : g) {
        if (v.imag() > 1e-12)
            throw NumericalError("stieltjes inversion: transform value has Im > 1e-12");
        density.push_back(v.imag() >= 0.0 ? 0.0 : -v.imag() / kPi);
    }
    return density;
}

inline SpectralCurve make_curve(double epsilon, std::vector<double> xs, std::vector<cplx> g) {
    SpectralCurve curve;
    curve.epsilon = epsilon;
    curve.density = stieltjes_density(g);
    curve.xs = std::move(xs);
    curve.g_values = std::move(g);
    for (cplx& v : curve.g_values)
        if (v.imag() > 0.0) v = cplx(v.real(), 0.0);  // same clamp as the density
    curve.validate();
    return curve;
}

/// Trapezoid integral of x^m * density(x) over the curve's grid.
inline double quadrature_moment(const SpectralCurve& curve, int m) {
    if (m < 0) throw ValidationError("quadrature_moment: order must be nonnegative");
    if (curve.xs.size() < 2) throw ValidationError("quadrature_moment: need at least two points");
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < curve.xs.size(); ++k) {
        const double f0 = std::pow(curve.xs[k], m) * curve.density[k];
        const double f1 = std::pow(curve.xs[k + 1], m) * curve.density[k + 1];
        acc += 0.5 * (f0 + f1) * (curve.xs[k + 1] - curve.xs[k]);
    }
    return acc;
}

/// True if the grid fails to cover the effective support: density above
/// `threshold` at either end means quadrature moments are truncated.
inline bool support_truncated(const SpectralCurve& curve, double threshold = 1e-6) {
    if (curve.density.empty()) return false;
    return curve.density.front() > threshold || curve.density.back() > threshold;
}

// ---------------------------------------------------------------------------
// EmpiricalDistribution: sorted samples (eigenvalues) or a fixed histogram.
// ---------------------------------------------------------------------------

class EmpiricalDistribution {
public:
    explicit EmpiricalDistribution(std::vector<double> samples) : samples_(std::move(samples)) {
        if (samples_.empty())
            throw ValidationError("empirical distribution: sample set must be nonempty");
        std::sort(samples_.begin(), samples_.end());
    }

    static EmpiricalDistribution from_histogram(std::vector<double> edges,
                                                std::vector<double> counts) {
        if (edges.size() < 2 || counts.size() + 1 != edges.size())
            throw ValidationError("empirical distribution: histogram shape mismatch");
        for (std::size_t k = 0; k + 1 < edges.size(); ++k)
            if (!(edges[k] < edges[k + 1]))
                throw ValidationError("empirical distribution: bin edges must increase");
        double total = 0.0;
        for (double c : counts) {
            if (c < 0.0) throw ValidationError("empirical distribution: negative count");
            total += c;
        }
        if (!(total > 0.0)) throw ValidationError("empirical distribution: total count is zero");
        EmpiricalDistribution e;
        e.edges_ = std::move(edges);
        e.counts_ = std::move(counts);
        e.total_ = total;
        return e;
    }

    bool has_samples() const noexcept { return !samples_.empty(); }
    const std::vector<double>& samples() const noexcept { return samples_; }

    double total_count() const {
        return has_samples() ? static_cast<double>(samples_.size()) : total_;
    }

    double min() const { return has_samples() ? samples_.front() : edges_.front(); }
    double max() const { return has_samples() ? samples_.back() : edges_.back(); }

    /// Fraction of mass at or below x (right-continuous step CDF).
    double cdf(double x) const {
        if (has_samples()) {
            const auto it = std::upper_bound(samples_.begin(), samples_.end(), x);
            return static_cast<double>(it - samples_.begin()) /
                   static_cast<double>(samples_.size());
        }
        if (x < edges_.front()) return 0.0;
        double acc = 0.0;
        for (std::size_t b = 0; b < counts_.size(); ++b) {
            if (x >= edges_[b + 1]) {
                acc += counts_[b];
            } else {
                // linear within the bin
                acc += counts_[b] * (x - edges_[b]) / (edges_[b + 1] - edges_[b]);
                break;
            }
        }
        return acc / total_;
    }

    /// Probability density per bin on the given uniform binning.
    std::vector<double> bin_densities(double lo, double width, std::size_t n_bins) const {
        std::vector<double> dens(n_bins, 0.0);
        if (has_samples()) {
            for (double x : samples_) {
                auto b = static_cast<long long>(std::floor((x - lo) / width));
                if (b < 0) b = 0;
                if (b >= static_cast<long long>(n_bins)) b = static_cast<long long>(n_bins) - 1;
                dens[static_cast<std::size_t>(b)] += 1.0;
            }
            for (double& v : dens) v /= static_cast<double>(samples_.size()) * width;
            return dens;
        }
        // redistribute histogram mass onto the target binning by overlap
        for (std::size_t b = 0; b < counts_.size(); ++b) {
            const double a0 = edges_[b];
            const double a1 = edges_[b + 1];
            for (std::size_t t = 0; t < n_bins; ++t) {
                const double t0 = lo + static_cast<double>(t) * width;
                const double t1 = t0 + width;
                const double overlap = std::max(0.0, std::min(a1, t1) - std::max(a0, t0));
                if (overlap > 0.0) dens[t] += counts_[b] * overlap / (a1 - a0);
            }
        }
        for (double& v : dens) v /= total_ * width;
        return dens;
    }

    /// Jump points of the step CDF (samples, or bin edges for histograms).
    std::vector<double> evaluation_points() const {
        return has_samples() ? samples_ : edges_;
    }

private:
    EmpiricalDistribution() = default;

    std::vector<double> samples_;
    std::vector<double> edges_;
    std::vector<double> counts_;
    double total_ = 0.0;
};

namespace detail {

struct Binning {
    double lo = 0.0;
    double width = 0.0;
    std::size_t n = 0;
};

inline Binning common_binning(double lo, double hi, double width) {
    Binning b;
    b.width = width;
    b.lo = std::floor(lo / width) * width;
    b.n = static_cast<std::size_t>(std::ceil((hi - b.lo) / width));
    if (b.n == 0) b.n = 1;
    return b;
}

/// Average curve density over grid points falling in each bin (0 if none).
inline std::vector<double> curve_bin_densities(const SpectralCurve& curve, const Binning& b) {
    std::vector<double> dens(b.n, 0.0);
    std::vector<int> hits(b.n, 0);
    for (std::size_t k = 0; k < curve.xs.size(); ++k) {
        const double x = curve.xs[k];
        auto bin = static_cast<long long>(std::floor((x - b.lo) / b.width));
        if (bin < 0 || bin >= static_cast<long long>(b.n)) continue;
        dens[static_cast<std::size_t>(bin)] += curve.density[k];
        ++hits[static_cast<std::size_t>(bin)];
    }
    for (std::size_t t = 0; t < b.n; ++t)
        if (hits[t] > 0) dens[t] /= static_cast<double>(hits[t]);
    return dens;
}

inline double l1_between(const std::vector<double>& a, const std::vector<double>& b,
                         double width) {
    double acc = 0.0;
    for (std::size_t t = 0; t < a.size(); ++t) acc += std::abs(a[t] - b[t]) * width;
    return acc;
}

/// Cumulative trapezoid of the curve density, evaluated by interpolation.
class CurveCdf {
public:
    explicit CurveCdf(const SpectralCurve& curve) : xs_(curve.xs) {
        cum_.resize(xs_.size(), 0.0);
        for (std::size_t k = 0; k + 1 < xs_.size(); ++k)
            cum_[k + 1] = cum_[k] + 0.5 * (curve.density[k] + curve.density[k + 1]) *
                                        (xs_[k + 1] - xs_[k]);
    }

    double operator()(double x) const {
        if (xs_.empty()) return 0.0;
        if (x <= xs_.front()) return 0.0;
        if (x >= xs_.back()) return cum_.back();
        const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
        const std::size_t k = static_cast<std::size_t>(it - xs_.begin()) - 1;
        const double w = (x - xs_[k]) / (xs_[k + 1] - xs_[k]);
        return cum_[k] + w * (cum_[k + 1] - cum_[k]);
    }

private:
    std::vector<double> xs_;
    std::vector<double> cum_;
};

}  // namespace detail

/// L1 distance between the curve's density and the empirical density on a
/// common binning of the given width; theory is averaged per bin.
inline double l1_density_distance(const SpectralCurve& curve, const EmpiricalDistribution& emp,
                                  double bin_width) {
    if (!(bin_width > 0.0)) throw ValidationError("l1 distance: bin width must be positive");
    const auto b = detail::common_binning(std::min(curve.xs.front(), emp.min()),
                                          std::max(curve.xs.back(), emp.max()), bin_width);
    return detail::l1_between(emp.bin_densities(b.lo, b.width, b.n),
                              detail::curve_bin_densities(curve, b), bin_width);
}

inline double l1_density_distance(const EmpiricalDistribution& lhs,
                                  const EmpiricalDistribution& rhs, double bin_width) {
    if (!(bin_width > 0.0)) throw ValidationError("l1 distance: bin width must be positive");
    const auto b = detail::common_binning(std::min(lhs.min(), rhs.min()),
                                          std::max(lhs.max(), rhs.max()), bin_width);
    return detail::l1_between(lhs.bin_densities(b.lo, b.width, b.n),
                              rhs.bin_densities(b.lo, b.width, b.n), bin_width);
}

/// Kolmogorov-Smirnov distance: sup over the empirical jump points of
/// |F_theory - F_empirical|, with F_theory the cumulative trapezoid of the
/// curve density.
inline double ks_distance(const SpectralCurve& curve, const EmpiricalDistribution& emp) {
    const detail::CurveCdf theory(curve);
    const double n = emp.total_count();
    double sup = 0.0;
    if (emp.has_samples()) {
        const auto& xs = emp.samples();
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double ft = theory(xs[i]);
            const double hi = static_cast<double>(i + 1) / n;
            const double lo = static_cast<double>(i) / n;
            sup = std::max({sup, std::abs(ft - hi), std::abs(ft - lo)});
        }
    } else {
        for (const double x : emp.evaluation_points())
            sup = std::max(sup, std::abs(theory(x) - emp.cdf(x)));
    }
    return sup;
}

inline double ks_distance(const EmpiricalDistribution& lhs, const EmpiricalDistribution& rhs) {
    double sup = 0.0;
    for (const double x : lhs.evaluation_points())
        sup = std::max(sup, std::abs(lhs.cdf(x) - rhs.cdf(x)));
    for (const double x : rhs.evaluation_points())
        sup = std::max(sup, std::abs(lhs.cdf(x) - rhs.cdf(x)));
    return sup;
}

}  // namespace scmix
