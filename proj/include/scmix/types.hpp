#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace scmix {

using cplx = std::complex<double>;

// ---------------------------------------------------------------------------
// Error taxonomy. The CLI maps these onto exit codes; library users can catch
// the base type.
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid inputs: malformed profiles, bad distribution parameters, ...
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A requested computation exceeds its work guard.
class WorkGuardError : public Error {
public:
    using Error::Error;
};

/// Numerical failure (e.g. every Monte-Carlo draw discarded).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Configuration file problems; the message names the offending field.
class ConfigError : public Error {
public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// VarianceProfile: d x d symmetric matrix of nonnegative standard deviations.
// Entries scale the variances of the mixture's operator entries. Squared
// entries are cached because every covariance application consumes them.
// ---------------------------------------------------------------------------

class VarianceProfile {
public:
    VarianceProfile(int d, std::vector<double> entries)
        : d_(d), entries_(std::move(entries)) {
        if (d_ <= 0) throw ValidationError("variance profile: dimension must be positive");
        if (entries_.size() != static_cast<std::size_t>(d_) * d_)
            throw ValidationError("variance profile: entry count does not match dimension");
        for (int i = 0; i < d_; ++i) {
            for (int j = 0; j < d_; ++j) {
                const double a = entries_[idx(i, j)];
                if (!std::isfinite(a))
                    throw ValidationError("variance profile: entries must be finite");
                if (a < 0.0)
                    throw ValidationError("variance profile: entries must be nonnegative");
                if (entries_[idx(i, j)] != entries_[idx(j, i)])
                    throw ValidationError("variance profile: matrix must be symmetric");
            }
        }
        squared_.resize(entries_.size());
        for (std::size_t k = 0; k < entries_.size(); ++k) squared_[k] = entries_[k] * entries_[k];
    }

    static VarianceProfile from_rows(const std::vector<std::vector<double>>& rows) {
        const int d = static_cast<int>(rows.size());
        std::vector<double> flat;
        flat.reserve(static_cast<std::size_t>(d) * d);
        for (const auto& row : rows) {
            if (static_cast<int>(row.size()) != d)
                throw ValidationError("variance profile: rows must form a square matrix");
            flat.insert(flat.end(), row.begin(), row.end());
        }
        return VarianceProfile(d, std::move(flat));
    }

    /// Signed/complex profiles are admitted at the I/O boundary by taking
    /// entrywise magnitudes; the internal form always has nonnegative entries.
    static VarianceProfile from_magnitudes(int d, std::vector<double> entries) {
        for (double& a : entries) a = std::abs(a);
        return VarianceProfile(d, std::move(entries));
    }

    static VarianceProfile identity(int d) {
        std::vector<double> e(static_cast<std::size_t>(d) * d, 0.0);
        for (int i = 0; i < d; ++i) e[static_cast<std::size_t>(i) * d + i] = 1.0;
        return VarianceProfile(d, std::move(e));
    }

    static VarianceProfile constant(int d, double value) {
        return VarianceProfile(d, std::vector<double>(static_cast<std::size_t>(d) * d, value));
    }

    int dim() const noexcept { return d_; }
    double operator()(int i, int j) const { return entries_[idx(i, j)]; }
    double squared(int i, int j) const { return squared_[idx(i, j)]; }
    const std::vector<double>& entries() const noexcept { return entries_; }
    const std::vector<double>& squared_entries() const noexcept { return squared_; }

    double max_entry() const { return *std::max_element(entries_.begin(), entries_.end()); }

    /// K_i = sum_j A_ij^2 (row sum of squares; the constant-row-sum closed
    /// form applies when this is the same for every i).
    double row_sum_squares(int i) const {
        double s = 0.0;
        for (int j = 0; j < d_; ++j) s += squared_[idx(i, j)];
        return s;
    }

    bool operator==(const VarianceProfile& other) const {
        return d_ == other.d_ && entries_ == other.entries_;
    }

private:
    std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) * d_ + j; }

    int d_;
    std::vector<double> entries_;
    std::vector<double> squared_;
};

// ---------------------------------------------------------------------------
// ComplexDiagonal: length-d complex vector standing for a diagonal matrix in
// M_d(C). Carrier of Cauchy-transform values and fixed-point iterates.
// ---------------------------------------------------------------------------

class ComplexDiagonal {
public:
    explicit ComplexDiagonal(std::vector<cplx> values) : values_(std::move(values)) {
        if (values_.empty()) throw ValidationError("complex diagonal: dimension must be positive");
    }

    explicit ComplexDiagonal(int d, cplx fill = cplx(0.0, 0.0))
        : values_(check_dim(d), fill) {}

    static ComplexDiagonal identity(int d) { return ComplexDiagonal(d, cplx(1.0, 0.0)); }

    /// -iI, the canonical lower-half-plane starting point of the iteration.
    static ComplexDiagonal minus_i(int d) { return ComplexDiagonal(d, cplx(0.0, -1.0)); }

    int dim() const noexcept { return static_cast<int>(values_.size()); }
    cplx& operator[](int i) { return values_[static_cast<std::size_t>(i)]; }
    const cplx& operator[](int i) const { return values_[static_cast<std::size_t>(i)]; }
    const std::vector<cplx>& values() const noexcept { return values_; }

    auto begin() const noexcept { return values_.begin(); }
    auto end() const noexcept { return values_.end(); }

    bool operator==(const ComplexDiagonal& other) const { return values_ == other.values_; }

private:
    static int check_dim(int d) {
        if (d <= 0) throw ValidationError("complex diagonal: dimension must be positive");
        return d;
    }

    std::vector<cplx> values_;
};

/// (1/d) * sum_i D_ii
inline cplx normalized_trace(const ComplexDiagonal& d) {
    cplx s(0.0, 0.0);
    for (const cplx& v : d) s += v;
    return s / static_cast<double>(d.dim());
}

/// Entrywise 1-norm: sum of moduli. This is the diagonal specialization of the
/// norm used by the iteration's stopping rule and the d/Im(z) bound.
inline double l1_norm(const ComplexDiagonal& d) {
    double s = 0.0;
    for (const cplx& v : d) s += std::abs(v);
    return s;
}

inline double l1_distance(const ComplexDiagonal& a, const ComplexDiagonal& b) {
    if (a.dim() != b.dim()) throw ValidationError("l1_distance: dimension mismatch");
    double s = 0.0;
    for (int i = 0; i < a.dim(); ++i) s += std::abs(a[i] - b[i]);
    return s;
}

inline bool in_closed_lower_half_plane(const ComplexDiagonal& d) {
    for (const cplx& v : d)
        if (v.imag() > 0.0) return false;
    return true;
}

inline bool in_open_lower_half_plane(const ComplexDiagonal& d) {
    for (const cplx& v : d)
        if (v.imag() >= 0.0) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Covariance application: D |-> diag(sum_j w_ij D_jj) for symmetric
// nonnegative weights w (squared profile entries or their expectations).
// Both the per-profile eta map and the mean covariance map are this operation
// with different weights.
// ---------------------------------------------------------------------------

inline ComplexDiagonal apply_covariance(int d, std::span<const double> weights,
                                        const ComplexDiagonal& diag) {
    if (diag.dim() != d || weights.size() != static_cast<std::size_t>(d) * d)
        throw ValidationError("apply_covariance: dimension mismatch");
    ComplexDiagonal out(d);
    for (int i = 0; i < d; ++i) {
        cplx s(0.0, 0.0);
        const double* row = weights.data() + static_cast<std::size_t>(i) * d;
        for (int j = 0; j < d; ++j) s += row[j] * diag[j];
        out[i] = s;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Solver settings and spectral curves.
// ---------------------------------------------------------------------------

struct SolverSettings {
    double tol = 1e-3;      ///< successive-difference threshold in the 1-norm
    int max_iter = 10000;
    double epsilon = 1e-3;  ///< Im(z) for grid evaluations

    void validate() const {
        if (!(tol > 0.0)) throw ValidationError("solver settings: tol must be positive");
        if (max_iter < 1) throw ValidationError("solver settings: max_iter must be >= 1");
        if (!(epsilon > 0.0)) throw ValidationError("solver settings: epsilon must be positive");
    }
};

/// Transform values and inverted density along a grid of x + i*epsilon points.
struct SpectralCurve {
    double epsilon = 0.0;
    std::vector<double> xs;
    std::vector<cplx> g_values;
    std::vector<double> density;

    void validate() const {
        if (!(epsilon > 0.0)) throw ValidationError("spectral curve: epsilon must be positive");
        if (xs.size() != g_values.size() || xs.size() != density.size())
            throw ValidationError("spectral curve: column lengths differ");
        for (std::size_t k = 0; k + 1 < xs.size(); ++k)
            if (!(xs[k] < xs[k + 1]))
                throw ValidationError("spectral curve: abscissae must be strictly increasing");
        for (std::size_t k = 0; k < xs.size(); ++k) {
            if (g_values[k].imag() > 0.0)
                throw ValidationError("spectral curve: Im(g) must be <= 0");
            if (density[k] < 0.0)
                throw ValidationError("spectral curve: density must be nonnegative");
        }
    }
};

/// Uniform grid, inclusive of both ends (within half a step of x_max).
inline std::vector<double> make_grid(double x_min, double x_max, double step) {
    if (!(step > 0.0)) throw ValidationError("grid: step must be positive");
    if (!(x_min < x_max)) throw ValidationError("grid: x_min must be below x_max");
    std::vector<double> xs;
    const auto n = static_cast<std::size_t>(std::floor((x_max - x_min) / step + 0.5)) + 1;
    xs.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double x = x_min + static_cast<double>(k) * step;
        if (x > x_max + step * 1e-9) break;
        xs.push_back(x);
    }
    return xs;
}

inline constexpr double kPi = std::numbers::pi;

/// Default ceiling on brute-force work estimates (operation counts, not
/// wall-clock). Exceeding it raises WorkGuardError.
inline constexpr double kDefaultWorkGuard = 5e12;

}  // namespace scmix
