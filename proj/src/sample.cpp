#include "xorhalf/sample.hpp"

#include <algorithm>
#include <string>

#include "xorhalf/errors.hpp"

namespace xorhalf {

int TernaryEntry::at(std::uint32_t index) const {
    const auto it = std::lower_bound(nonzeros.begin(), nonzeros.end(), index,
                                     [](const auto& nz, std::uint32_t i) { return nz.first < i; });
    return (it != nonzeros.end() && it->first == index) ? it->second : 0;
}

TernarySample::TernarySample(std::uint64_t dim, std::vector<TernaryEntry> entries)
    : dim_(dim), entries_(std::move(entries)) {
    if (dim > 0xFFFFFFFFull) throw InvalidInput("ternary dimension exceeds 32-bit indexing");
    for (std::size_t j = 0; j < entries_.size(); ++j) {
        const auto& e = entries_[j];
        if (e.label != 1 && e.label != -1) throw InvalidInput("entry " + std::to_string(j) + ": label must be +1 or -1");
        for (std::size_t i = 0; i < e.nonzeros.size(); ++i) {
            const auto [idx, v] = e.nonzeros[i];
            if (idx >= dim) throw InvalidInput("entry " + std::to_string(j) + ": index " + std::to_string(idx) + " >= dim");
            if (v != 1 && v != -1) throw InvalidInput("entry " + std::to_string(j) + ": stored values must be +1 or -1");
            if (i > 0 && e.nonzeros[i - 1].first >= idx) {
                throw InvalidInput("entry " + std::to_string(j) + ": indices must strictly ascend");
            }
        }
    }
}

std::vector<std::int8_t> TernarySample::dense(std::size_t j) const {
    std::vector<std::int8_t> out(dim_, 0);
    for (const auto& [idx, v] : entries_.at(j).nonzeros) out[idx] = v;
    return out;
}

std::pair<int, int> psi_pair(int v) {
    switch (v) {
        case 1: return {1, 1};
        case -1: return {-1, -1};
        case 0: return {-1, 1};
        default: throw InvalidInput("psi is defined on {-1, 0, 1}");
    }
}

std::vector<std::int8_t> psi_map(std::span<const std::int8_t> x) {
    std::vector<std::int8_t> out;
    out.reserve(2 * x.size());
    for (auto v : x) {
        const auto [a, b] = psi_pair(v);
        out.push_back(static_cast<std::int8_t>(a));
        out.push_back(static_cast<std::int8_t>(b));
    }
    return out;
}

std::vector<std::int8_t> rho_map(std::span<const std::int8_t> x, const MonomialIndex& idx) {
    if (x.size() != idx.u()) throw InvalidInput("rho_map: vector length does not match the index");
    if (idx.ambient_dim() > BinarySample::kMaxDenseRow) throw ResourceLimit("rho_map: dense lift too large");
    std::vector<std::int8_t> out(idx.ambient_dim(), 0);
    for (std::uint64_t pos = 0; pos < idx.ambient_dim(); ++pos) {
        const auto mono = idx.monomial_at(pos);
        if (!mono) continue;
        int v = 1;
        for (auto c : *mono) v *= x[c];
        out[pos] = static_cast<std::int8_t>(v);
    }
    return out;
}

int rho_value(const TernaryEntry& x, const MonomialIndex& idx, std::uint64_t pos) {
    const auto mono = idx.monomial_at(pos);
    if (!mono) return 0;
    int v = 1;
    for (auto c : *mono) {
        v *= x.at(c);
        if (v == 0) break;
    }
    return v;
}

BinarySample::BinarySample(std::uint64_t dim, const std::vector<std::vector<std::int8_t>>& rows, std::vector<int> labels)
    : dim_(dim), labels_(std::move(labels)) {
    if (rows.size() != labels_.size()) throw InvalidInput("row count does not match label count");
    words_ = static_cast<std::size_t>((dim + 63) / 64);
    bits_.assign(words_ * rows.size(), 0);
    for (std::size_t j = 0; j < rows.size(); ++j) {
        if (labels_[j] != 1 && labels_[j] != -1) throw InvalidInput("entry " + std::to_string(j) + ": label must be +1 or -1");
        if (rows[j].size() != dim) throw InvalidInput("entry " + std::to_string(j) + ": length does not match dim");
        for (std::uint64_t p = 0; p < dim; ++p) {
            const int v = rows[j][p];
            if (v == -1) bits_[j * words_ + p / 64] |= std::uint64_t{1} << (p % 64);
            else if (v != 1) throw InvalidInput("entry " + std::to_string(j) + ": binary values must be +1 or -1");
        }
    }
}

BinarySample BinarySample::lifted_view(std::shared_ptr<const TernarySample> source, MonomialIndex idx) {
    if (!source) throw InvalidInput("lifted view needs a source sample");
    if (source->dim() != idx.u()) throw InvalidInput("lifted view: index width does not match sample dim");
    BinarySample out;
    out.dim_ = 2 * idx.ambient_dim();
    if (out.dim_ / 2 != idx.ambient_dim()) throw ResourceLimit("binary dimension exceeds 64-bit indexing");
    out.labels_.reserve(source->size());
    for (const auto& e : source->entries()) out.labels_.push_back(e.label);
    out.source_ = std::move(source);
    out.index_ = std::move(idx);
    return out;
}

BinarySample BinarySample::lift_packed(const TernarySample& source, const MonomialIndex& idx) {
    if (source.dim() != idx.u()) throw InvalidInput("lift: index width does not match sample dim");
    BinarySample out;
    out.dim_ = 2 * idx.ambient_dim();
    out.words_ = static_cast<std::size_t>((out.dim_ + 63) / 64);
    out.bits_.assign(out.words_ * source.size(), 0);
    out.index_ = idx;
    // visit each monomial once, then fill every row
    for (std::uint64_t pos = 0; pos < idx.ambient_dim(); ++pos) {
        const auto mono = idx.monomial_at(pos);
        for (std::size_t j = 0; j < source.size(); ++j) {
            int v = 0;
            if (mono) {
                v = 1;
                for (auto c : *mono) {
                    v *= source[j].at(c);
                    if (v == 0) break;
                }
            }
            const auto [a, b] = psi_pair(v);
            std::uint64_t* row = out.bits_.data() + j * out.words_;
            if (a < 0) row[(2 * pos) / 64] |= std::uint64_t{1} << ((2 * pos) % 64);
            if (b < 0) row[(2 * pos + 1) / 64] |= std::uint64_t{1} << ((2 * pos + 1) % 64);
        }
    }
    out.labels_.reserve(source.size());
    for (const auto& e : source.entries()) out.labels_.push_back(e.label);
    return out;
}

int BinarySample::value(std::size_t j, std::uint64_t pos) const {
    if (j >= labels_.size()) throw InvalidInput("entry index out of range");
    if (pos >= dim_) throw InvalidInput("coordinate out of range");
    if (source_) {
        const auto [a, b] = psi_pair(rho_value((*source_)[j], *index_, pos / 2));
        return (pos % 2 == 0) ? a : b;
    }
    return ((bits_[j * words_ + pos / 64] >> (pos % 64)) & 1u) ? -1 : 1;
}

std::vector<std::int8_t> BinarySample::row(std::size_t j) const {
    if (dim_ > kMaxDenseRow) throw ResourceLimit("dense row of dimension " + std::to_string(dim_) + " is too large");
    std::vector<std::int8_t> out(dim_);
    if (source_) {
        const auto lifted = psi_map(rho_map(source_->dense(j), *index_));
        std::copy(lifted.begin(), lifted.end(), out.begin());
        return out;
    }
    for (std::uint64_t p = 0; p < dim_; ++p) out[p] = static_cast<std::int8_t>(value(j, p));
    return out;
}

std::span<const std::uint64_t> BinarySample::packed_row(std::size_t j) const {
    if (source_) throw PreconditionError("packed rows exist only for materialized samples");
    return {bits_.data() + j * words_, words_};
}

}  // namespace xorhalf
