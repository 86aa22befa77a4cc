#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "xorhalf/monomial_index.hpp"

namespace xorhalf {

/// Sparse {-1,0,+1} vector with a +-1 label. Nonzeros ascend by index.
struct TernaryEntry {
    std::vector<std::pair<std::uint32_t, std::int8_t>> nonzeros;
    int label = +1;

    /// Value at an index (0 when absent).
    int at(std::uint32_t index) const;

    friend bool operator==(const TernaryEntry&, const TernaryEntry&) = default;
};

class TernarySample {
public:
    TernarySample(std::uint64_t dim, std::vector<TernaryEntry> entries);

    std::uint64_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return entries_.size(); }
    const std::vector<TernaryEntry>& entries() const noexcept { return entries_; }
    const TernaryEntry& operator[](std::size_t j) const { return entries_[j]; }

    /// Dense copy of entry j.
    std::vector<std::int8_t> dense(std::size_t j) const;

    friend bool operator==(const TernarySample&, const TernarySample&) = default;

private:
    std::uint64_t dim_;
    std::vector<TernaryEntry> entries_;
};

/// Psi on one ternary value: +1 -> (1,1), -1 -> (-1,-1), 0 -> (-1,1).
std::pair<int, int> psi_pair(int v);

/// Coordinatewise Psi of a dense ternary vector (length doubles).
std::vector<std::int8_t> psi_map(std::span<const std::int8_t> x);

/// Pre-lift weights w -> w' = (w_1/2, w_1/2, w_2/2, w_2/2, ...), so that
/// <w', Psi(x)> = <w, x> for every ternary x.
template <typename T>
std::vector<T> psi_fold(std::span<const T> w) {
    std::vector<T> out;
    out.reserve(2 * w.size());
    for (const auto& wi : w) {
        const T half = wi / T(2);
        out.push_back(half);
        out.push_back(half);
    }
    return out;
}

/// rho(x): every monomial of degree <= d over x, laid out by `idx` (dense).
std::vector<std::int8_t> rho_map(std::span<const std::int8_t> x, const MonomialIndex& idx);

/// Value of the monomial at lifted position `pos` on a sparse entry.
int rho_value(const TernaryEntry& x, const MonomialIndex& idx, std::uint64_t pos);

/// +-1 sample. Either a bit-packed matrix or a lazy view of Psi(rho(x)) over a
/// ternary sample; both answer the same queries with the same declared dim.
class BinarySample {
public:
    /// Materialized rows; every value must be +-1.
    BinarySample(std::uint64_t dim, const std::vector<std::vector<std::int8_t>>& rows, std::vector<int> labels);

    /// Lazy Psi(rho(x)) view; dim = 2 * idx.ambient_dim().
    static BinarySample lifted_view(std::shared_ptr<const TernarySample> source, MonomialIndex idx);

    /// Materialize Psi(rho(x)) into bit-packed rows.
    static BinarySample lift_packed(const TernarySample& source, const MonomialIndex& idx);

    std::uint64_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return labels_.size(); }
    int label(std::size_t j) const { return labels_[j]; }
    const std::vector<int>& labels() const noexcept { return labels_; }

    /// +-1 at (entry j, coordinate pos).
    int value(std::size_t j, std::uint64_t pos) const;

    /// Dense row (ResourceLimit beyond kMaxDenseRow coordinates).
    std::vector<std::int8_t> row(std::size_t j) const;

    bool materialized() const noexcept { return !source_; }
    /// Backing ternary sample and index for lazy views; null otherwise.
    const TernarySample* pre_lift() const noexcept { return source_.get(); }
    const std::optional<MonomialIndex>& index() const noexcept { return index_; }

    /// Bit-packed row words (bit set means -1); materialized samples only.
    std::span<const std::uint64_t> packed_row(std::size_t j) const;
    std::size_t words_per_row() const noexcept { return words_; }

    static constexpr std::uint64_t kMaxDenseRow = std::uint64_t{1} << 28;

private:
    BinarySample() = default;

    std::uint64_t dim_ = 0;
    std::vector<int> labels_;
    std::size_t words_ = 0;
    std::vector<std::uint64_t> bits_;
    std::shared_ptr<const TernarySample> source_;
    std::optional<MonomialIndex> index_;
};

}  // namespace xorhalf
