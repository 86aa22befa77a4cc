#include "xorhalf/monomial_index.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "xorhalf/errors.hpp"

namespace xorhalf {

namespace {

constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b, const char* what) {
    const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    if (p > kMax) throw ResourceLimit(std::string(what) + " exceeds 64-bit indexing");
    return static_cast<std::uint64_t>(p);
}

}  // namespace

MonomialIndex::MonomialIndex(std::uint64_t u, int d, RhoIndexing mode) : u_(u), d_(d), mode_(mode) {
    if (u == 0) throw InvalidParameter("monomial index needs at least one coordinate");
    if (d < 1) throw InvalidParameter("monomial index needs d >= 1");
    ambient_ = 1;
    for (int i = 0; i < d; ++i) ambient_ = checked_mul(ambient_, u + 1, "lifted dimension (u+1)^d");
    offsets_.assign(static_cast<std::size_t>(d) + 2, 0);
    for (int k = 0; k <= d; ++k) {
        offsets_[static_cast<std::size_t>(k) + 1] = offsets_[static_cast<std::size_t>(k)] + binom(u + k - 1, k);
    }
    distinct_ = offsets_.back();
}

std::uint64_t MonomialIndex::binom(std::uint64_t n, int r) const {
    if (r < 0) return 0;
    if (r == 0) return 1;
    if (n < static_cast<std::uint64_t>(r)) return 0;
    unsigned __int128 c = 1;
    for (int i = 1; i <= r; ++i) {
        c = c * (n - static_cast<std::uint64_t>(r) + static_cast<std::uint64_t>(i)) / static_cast<unsigned>(i);
        if (c > kMax) throw ResourceLimit("binomial coefficient exceeds 64 bits");
    }
    return static_cast<std::uint64_t>(c);
}

std::uint64_t MonomialIndex::position(std::span<const std::uint32_t> multiset) const {
    const std::size_t k = multiset.size();
    if (k > static_cast<std::size_t>(d_)) throw InvalidInput("monomial degree exceeds d");
    for (std::size_t i = 0; i < k; ++i) {
        if (multiset[i] >= u_) throw InvalidInput("monomial coordinate out of range");
        if (i > 0 && multiset[i] < multiset[i - 1]) throw InvalidInput("monomial coordinates must be sorted");
    }
    if (mode_ == RhoIndexing::StrictPaper) {
        std::uint64_t pos = 0;
        std::uint64_t scale = 1;
        for (int j = 0; j < d_; ++j) {
            const std::uint64_t digit = static_cast<std::size_t>(j) < k ? multiset[static_cast<std::size_t>(j)] : u_;
            pos += digit * scale;
            if (j + 1 < d_) scale *= u_ + 1;
        }
        return pos;
    }
    std::uint64_t rank = 0;
    for (std::size_t i = 0; i < k; ++i) rank += binom(multiset[i] + i, static_cast<int>(i + 1));
    return offsets_[k] + rank;
}

std::optional<std::vector<std::uint32_t>> MonomialIndex::monomial_at(std::uint64_t pos) const {
    if (pos >= ambient_) throw InvalidInput("position outside the lifted dimension");
    std::vector<std::uint32_t> out;
    if (mode_ == RhoIndexing::StrictPaper) {
        std::uint64_t rest = pos;
        for (int j = 0; j < d_; ++j) {
            const std::uint64_t digit = rest % (u_ + 1);
            rest /= u_ + 1;
            if (digit != u_) out.push_back(static_cast<std::uint32_t>(digit));
        }
        std::sort(out.begin(), out.end());
        return out;
    }
    if (pos >= distinct_) return std::nullopt;
    int k = 0;
    while (offsets_[static_cast<std::size_t>(k) + 1] <= pos) ++k;
    std::uint64_t r = pos - offsets_[static_cast<std::size_t>(k)];
    out.resize(static_cast<std::size_t>(k));
    for (int i = k; i >= 1; --i) {
        // largest e in [i-1, u+i-2] with C(e, i) <= r
        std::uint64_t lo = static_cast<std::uint64_t>(i - 1);
        std::uint64_t hi = u_ + static_cast<std::uint64_t>(i) - 2;
        while (lo < hi) {
            const std::uint64_t mid = lo + (hi - lo + 1) / 2;
            if (binom(mid, i) <= r) lo = mid; else hi = mid - 1;
        }
        r -= binom(lo, i);
        out[static_cast<std::size_t>(i - 1)] = static_cast<std::uint32_t>(lo - static_cast<std::uint64_t>(i - 1));
    }
    return out;
}

bool MonomialIndex::is_representative(std::uint64_t pos) const {
    const auto mono = monomial_at(pos);
    if (!mono) return false;
    return position(*mono) == pos;
}

}  // namespace xorhalf
