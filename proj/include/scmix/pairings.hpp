#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "scmix/types.hpp"

namespace scmix {

// ---------------------------------------------------------------------------
// NoncrossingPairing: a perfect matching of {1..m} with no two pairs
// (a,b), (c,d) satisfying a < c < b < d. Positions are 1-based.
// ---------------------------------------------------------------------------

class NoncrossingPairing {
public:
    NoncrossingPairing(int m, std::vector<std::pair<int, int>> pairs)
        : m_(m), pairs_(std::move(pairs)) {
        if (m_ < 0 || m_ % 2 != 0)
            throw ValidationError("pairing: m must be a nonnegative even integer");
        if (pairs_.size() != static_cast<std::size_t>(m_) / 2)
            throw ValidationError("pairing: wrong number of pairs");
        std::vector<bool> seen(static_cast<std::size_t>(m_) + 1, false);
        for (auto& [a, b] : pairs_) {
            if (a > b) std::swap(a, b);
            if (a < 1 || b > m_ || a == b)
                throw ValidationError("pairing: positions out of range");
            if (seen[static_cast<std::size_t>(a)] || seen[static_cast<std::size_t>(b)])
                throw ValidationError("pairing: positions must appear exactly once");
            seen[static_cast<std::size_t>(a)] = seen[static_cast<std::size_t>(b)] = true;
        }
        std::sort(pairs_.begin(), pairs_.end());
        for (std::size_t p = 0; p < pairs_.size(); ++p)
            for (std::size_t q = p + 1; q < pairs_.size(); ++q) {
                const auto [a, b] = pairs_[p];
                const auto [c, d] = pairs_[q];
                if (a < c && c < b && b < d)
                    throw ValidationError("pairing: crossing pairs");
            }
    }

    int size() const noexcept { return m_; }

    /// Pairs (a, b) with a < b, sorted by opener.
    const std::vector<std::pair<int, int>>& pairs() const noexcept { return pairs_; }

    /// Partner of position p (1-based).
    int partner(int p) const {
        for (const auto& [a, b] : pairs_) {
            if (a == p) return b;
            if (b == p) return a;
        }
        throw ValidationError("pairing: position not found");
    }

    bool operator==(const NoncrossingPairing& other) const {
        return m_ == other.m_ && pairs_ == other.pairs_;
    }

private:
    int m_;
    std::vector<std::pair<int, int>> pairs_;
};

inline std::uint64_t catalan(int k) {
    if (k < 0) throw ValidationError("catalan: index must be nonnegative");
    std::uint64_t c = 1;
    for (int i = 0; i < k; ++i)
        c = c * 2 * (2 * static_cast<std::uint64_t>(i) + 1) / (static_cast<std::uint64_t>(i) + 2);
    return c;
}

namespace detail {

// Pair lists over positions [lo, hi]. Position lo pairs with each admissible
// partner p (even gap) in ascending order; interior combinations vary before
// exterior ones.
inline std::vector<std::vector<std::pair<int, int>>> nc2_pair_lists(int lo, int hi) {
    std::vector<std::vector<std::pair<int, int>>> out;
    if (lo > hi) {
        out.emplace_back();
        return out;
    }
    for (int p = lo + 1; p <= hi; p += 2) {
        const auto inner = nc2_pair_lists(lo + 1, p - 1);
        const auto outer = nc2_pair_lists(p + 1, hi);
        for (const auto& in : inner) {
            for (const auto& ou : outer) {
                std::vector<std::pair<int, int>> combo;
                combo.reserve(1 + in.size() + ou.size());
                combo.emplace_back(lo, p);
                combo.insert(combo.end(), in.begin(), in.end());
                combo.insert(combo.end(), ou.begin(), ou.end());
                out.push_back(std::move(combo));
            }
        }
    }
    return out;
}

}  // namespace detail

/// All non-crossing perfect pairings of {1..m} in a deterministic canonical
/// order; empty for odd m; |result| == Catalan(m/2).
inline std::vector<NoncrossingPairing> enumerate_nc2(int m) {
    if (m < 0) throw ValidationError("enumerate_nc2: m must be nonnegative");
    std::vector<NoncrossingPairing> out;
    if (m % 2 != 0) return out;
    auto lists = detail::nc2_pair_lists(1, m);
    out.reserve(lists.size());
    for (auto& pairs : lists) out.emplace_back(m, std::move(pairs));
    return out;
}

}  // namespace scmix
