#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace xorhalf {

/// How the degree-<=d monomial lift lays out its coordinates.
///
/// Canonical: one coordinate per distinct multiset of size <= d, ranked by
/// (size, colex), followed by zero padding up to (u+1)^d.
/// StrictPaper: one coordinate per map f: [d] -> [u] + {*}; a monomial
/// appears once per ordering of its factors.
enum class RhoIndexing { Canonical, StrictPaper };

class MonomialIndex {
public:
    MonomialIndex(std::uint64_t u, int d, RhoIndexing mode = RhoIndexing::Canonical);

    std::uint64_t u() const noexcept { return u_; }
    int d() const noexcept { return d_; }
    RhoIndexing mode() const noexcept { return mode_; }

    /// (u+1)^d.
    std::uint64_t ambient_dim() const noexcept { return ambient_; }
    /// C(u+d, d): the number of distinct multisets of size <= d.
    std::uint64_t distinct_count() const noexcept { return distinct_; }

    /// Position of a sorted multiset (its canonical representative in strict mode).
    std::uint64_t position(std::span<const std::uint32_t> multiset) const;

    /// Multiset at a position; nullopt for padding coordinates.
    std::optional<std::vector<std::uint32_t>> monomial_at(std::uint64_t pos) const;

    /// True when `pos` is the position `position()` assigns to its monomial.
    bool is_representative(std::uint64_t pos) const;

    friend bool operator==(const MonomialIndex& a, const MonomialIndex& b) noexcept {
        return a.u_ == b.u_ && a.d_ == b.d_ && a.mode_ == b.mode_;
    }

private:
    std::uint64_t binom(std::uint64_t n, int r) const;

    std::uint64_t u_;
    int d_;
    RhoIndexing mode_;
    std::uint64_t ambient_ = 0;
    std::uint64_t distinct_ = 0;
    std::vector<std::uint64_t> offsets_;  // first canonical position of each size
};

}  // namespace xorhalf
