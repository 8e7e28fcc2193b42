#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <variant>
#include <vector>

#include "scmix/rng.hpp"
#include "scmix/types.hpp"

namespace scmix {

// ---------------------------------------------------------------------------
// Entry laws. Each law describes one nonnegative random variable; a sampler
// applies a law i.i.d. to the entries i <= j of a symmetric profile, with
// optional per-entry overrides.
// ---------------------------------------------------------------------------

struct RayleighLaw {
    double sigma = 1.0;
    void validate() const {
        if (!(sigma > 0.0)) throw ValidationError("rayleigh law: sigma must be positive");
    }
    double sample(rng::Stream& s) const { return s.rayleigh(sigma); }
    double second_moment() const { return 2.0 * sigma * sigma; }
};

struct UniformLaw {
    double a = 0.0;
    double b = 1.0;
    void validate() const {
        if (!(a >= 0.0)) throw ValidationError("uniform law: lower bound must be nonnegative");
        if (!(a <= b)) throw ValidationError("uniform law: bounds must satisfy a <= b");
    }
    double sample(rng::Stream& s) const { return s.uniform(a, b); }
    double second_moment() const { return (a * a + a * b + b * b) / 3.0; }
};

/// Degenerate law: the entry is a fixed value. Signed inputs are absorbed as
/// magnitudes at this boundary.
struct ConstantLaw {
    double value = 1.0;
    ConstantLaw() = default;
    explicit ConstantLaw(double v) : value(v < 0.0 ? -v : v) {}
    void validate() const {
        if (!std::isfinite(value)) throw ValidationError("constant law: value must be finite");
    }
    double sample(rng::Stream&) const { return value; }
    double second_moment() const { return value * value; }
};

struct BernoulliScaledLaw {
    double p = 0.5;
    double c = 1.0;
    void validate() const {
        if (!(p >= 0.0 && p <= 1.0))
            throw ValidationError("bernoulli law: p must lie in [0, 1]");
        if (!(c >= 0.0)) throw ValidationError("bernoulli law: scale must be nonnegative");
    }
    double sample(rng::Stream& s) const { return s.bernoulli(p) ? c : 0.0; }
    double second_moment() const { return p * c * c; }
};

struct ExponentialLaw {
    double lambda = 1.0;
    void validate() const {
        if (!(lambda > 0.0)) throw ValidationError("exponential law: rate must be positive");
    }
    double sample(rng::Stream& s) const { return s.exponential(lambda); }
    double second_moment() const { return 2.0 / (lambda * lambda); }
};

using EntryLaw =
    std::variant<RayleighLaw, UniformLaw, ConstantLaw, BernoulliScaledLaw, ExponentialLaw>;

inline void validate_law(const EntryLaw& law) {
    std::visit([](const auto& l) { l.validate(); }, law);
}

inline double sample_law(const EntryLaw& law, rng::Stream& s) {
    return std::visit([&s](const auto& l) { return l.sample(s); }, law);
}

inline double law_second_moment(const EntryLaw& law) {
    return std::visit([](const auto& l) { return l.second_moment(); }, law);
}

// ---------------------------------------------------------------------------
// ProfileSampler: the joint law of a random variance profile. Sampling is a
// pure function of (config, seed, draw_index); distinct draw indices give
// independent streams.
// ---------------------------------------------------------------------------

class ProfileSampler {
public:
    ProfileSampler(int d, EntryLaw default_law)
        : d_(d), default_law_(std::move(default_law)) {
        if (d_ <= 0) throw ValidationError("profile sampler: dimension must be positive");
        validate_law(default_law_);
    }

    /// Override the law of entry (i, j) (and its mirror (j, i)).
    void set_entry_law(int i, int j, EntryLaw law) {
        check_index(i, j);
        validate_law(law);
        overrides_[canonical(i, j)] = std::move(law);
    }

    /// Degenerate sampler that always yields the given profile.
    static ProfileSampler constant_profile(const VarianceProfile& profile) {
        ProfileSampler s(profile.dim(), ConstantLaw{0.0});
        for (int i = 0; i < profile.dim(); ++i)
            for (int j = i; j < profile.dim(); ++j)
                s.set_entry_law(i, j, ConstantLaw(profile(i, j)));
        return s;
    }

    int dim() const noexcept { return d_; }

    const EntryLaw& entry_law(int i, int j) const {
        check_index(i, j);
        const auto it = overrides_.find(canonical(i, j));
        return it == overrides_.end() ? default_law_ : it->second;
    }

    /// E[A_ij^2], analytic per law.
    double entry_second_moment(int i, int j) const {
        return law_second_moment(entry_law(i, j));
    }

    VarianceProfile sample(std::uint64_t seed, std::uint64_t draw_index) const {
        rng::Stream stream(rng::stream_seed(seed, rng::Domain::profile, draw_index));
        std::vector<double> entries(static_cast<std::size_t>(d_) * d_, 0.0);
        for (int i = 0; i < d_; ++i) {
            for (int j = i; j < d_; ++j) {
                const double a = sample_law(entry_law(i, j), stream);
                entries[static_cast<std::size_t>(i) * d_ + j] = a;
                entries[static_cast<std::size_t>(j) * d_ + i] = a;
            }
        }
        return VarianceProfile(d_, std::move(entries));
    }

private:
    static std::pair<int, int> make_canonical(int i, int j) {
        return i <= j ? std::pair{i, j} : std::pair{j, i};
    }
    std::pair<int, int> canonical(int i, int j) const { return make_canonical(i, j); }
    void check_index(int i, int j) const {
        if (i < 0 || j < 0 || i >= d_ || j >= d_)
            throw ValidationError("profile sampler: entry index out of range");
    }

    int d_;
    EntryLaw default_law_;
    std::map<std::pair<int, int>, EntryLaw> overrides_;
};

inline VarianceProfile sample_profile(const ProfileSampler& sampler, std::uint64_t seed,
                                      std::uint64_t draw_index) {
    return sampler.sample(seed, draw_index);
}

}  // namespace scmix
