#pragma once

// Deterministic sparse grid of candidate triplets for local changepoint tests.
//
// For a series of length n and dyadic level l in {0, ..., lmax} with
// lmax = floor(log2(n/4)) - 1, the level-l intervals are the (j, k] with both
// endpoints multiples of the spacing d_l = ceil(2^l / sqrt(2 ln(e n / 2^l)))
// and 2^l <= k - j < 2^(l+1). A triplet (s, m, e) is such an interval plus an
// abutting extension whose length is drawn from the menu of all interval
// lengths: extension on the right when e - m >= m - s, on the left when
// m - s > e - m, so each (s, m, e) arises exactly once. Levels are grouped
// into blocks (all levels below ceil(log2 ln n) form block 1, one block per
// level after that), which drive the weighted Bonferroni calibration.
//
// All logarithms here are natural except the explicit log2 terms.
//
// The grid is never materialized for large n: `scan_plan` returns one compact
// group per (level, interval length, extension length, side), and triplet
// enumeration/counting iterates anchors inside each group.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numbers>
#include <vector>

#include "lbd/errors.hpp"

namespace lbd {

using std::int64_t;

struct GridLevel {
    int level;
    int64_t spacing;
};

struct BonferroniInterval {
    int64_t left, right;
    int level;
};

struct Triplet {
    int64_t s, m, e;
    int level;
    int block;

    friend bool operator==(const Triplet&, const Triplet&) = default;
};

inline constexpr int64_t min_series_length = 8;

inline int max_level(int64_t n) {
    if (n < min_series_length)
        throw invalid_argument_error("series length must be at least 8");
    // floor(log2(n/4)) - 1 == floor(log2 n) - 3, exactly in integer arithmetic
    return static_cast<int>(std::bit_width(static_cast<std::uint64_t>(n))) - 4;
}

inline int64_t grid_spacing(int level, int64_t n) {
    if (level < 0 || level > max_level(n))
        throw invalid_argument_error("grid level out of range");
    const double len = std::ldexp(1.0, level);
    const double d = len / std::sqrt(2.0 * std::log(std::numbers::e * static_cast<double>(n) / len));
    return std::max<int64_t>(1, static_cast<int64_t>(std::ceil(d)));
}

namespace detail {

// ceil(log2 ln n); the inner logarithm is natural.
inline int block_split(int64_t n) {
    if (std::getenv("LBD_SN_BASE2"))
        return static_cast<int>(std::ceil(std::log2(std::log2(static_cast<double>(n)))));
    return static_cast<int>(std::ceil(std::log2(std::log(static_cast<double>(n)))));
}

}  // namespace detail

// Block 1 holds every level below the split (including level 0); each later
// level is its own block.
inline int block_index(int level, int64_t n) {
    if (level < 0 || level > max_level(n))
        throw invalid_argument_error("grid level out of range");
    const int split = detail::block_split(n);
    return level <= split - 1 ? 1 : level - split + 2;
}

inline int block_count(int64_t n) { return block_index(max_level(n), n); }

// Admissible interval lengths at one level: multiples of the spacing in
// [2^l, 2^(l+1)).
inline std::vector<int64_t> level_lengths(int level, int64_t n) {
    const int64_t d = grid_spacing(level, n);
    const int64_t lo = int64_t{1} << level;
    const int64_t hi = int64_t{2} << level;
    std::vector<int64_t> out;
    for (int64_t len = (lo + d - 1) / d * d; len < hi; len += d) out.push_back(len);
    return out;
}

// The length menu L_n: sorted distinct lengths over all levels.
inline std::vector<int64_t> interval_lengths(int64_t n) {
    std::vector<int64_t> out;
    for (int level = 0; level <= max_level(n); ++level) {
        auto ls = level_lengths(level, n);
        out.insert(out.end(), ls.begin(), ls.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

inline std::vector<BonferroniInterval> build_intervals(int64_t n) {
    std::vector<BonferroniInterval> out;
    for (int level = 0; level <= max_level(n); ++level) {
        const int64_t d = grid_spacing(level, n);
        for (int64_t len : level_lengths(level, n))
            for (int64_t j = 0; j + len <= n; j += d)
                out.push_back({j, j + len, level});
    }
    return out;
}

// One group of triplets sharing (level, segment lengths, extension side).
// Anchors step by `spacing`: the anchor is s for a right extension and m for
// a left extension.
struct ScanGroup {
    int level;
    int block;
    int64_t spacing;
    int64_t seg1;       // m - s
    int64_t seg2;       // e - m
    bool right_ext;     // true: extension follows the interval
    int64_t anchor_first;
    int64_t anchor_last;

    int64_t count() const {
        return anchor_last < anchor_first ? 0 : (anchor_last - anchor_first) / spacing + 1;
    }

    Triplet triplet_at(int64_t anchor) const {
        if (right_ext) return {anchor, anchor + seg1, anchor + seg1 + seg2, level, block};
        return {anchor - seg1, anchor, anchor + seg2, level, block};
    }
};

inline std::vector<ScanGroup> scan_plan(int64_t n) {
    const auto menu = interval_lengths(n);
    std::vector<ScanGroup> plan;
    for (int level = 0; level <= max_level(n); ++level) {
        const int64_t d = grid_spacing(level, n);
        const int block = block_index(level, n);
        for (int64_t len : level_lengths(level, n)) {
            for (int64_t ext : menu) {
                if (ext < len) continue;
                // right: (s, s+len, s+len+ext), s on the grid, e <= n
                const int64_t last = n - len - ext;
                if (last >= 0)
                    plan.push_back({level, block, d, len, ext, true, 0, last / d * d});
            }
            for (int64_t ext : menu) {
                if (ext <= len) continue;
                // left: (m-ext, m, m+len), m on the grid, m >= ext
                const int64_t first = (ext + d - 1) / d * d;
                const int64_t last = n - len;
                if (last >= first)
                    plan.push_back({level, block, d, ext, len, false, first, last / d * d});
            }
        }
    }
    return plan;
}

template <class F>
void for_each_triplet(int64_t n, F&& f) {
    for (const ScanGroup& g : scan_plan(n))
        for (int64_t a = g.anchor_first; a <= g.anchor_last; a += g.spacing)
            f(g.triplet_at(a));
}

inline int64_t triplet_count(int64_t n) {
    int64_t total = 0;
    for (const ScanGroup& g : scan_plan(n)) total += g.count();
    return total;
}

// Number of triplets per block; entry B-1 is the size of block B.
inline std::vector<int64_t> block_sizes(int64_t n) {
    std::vector<int64_t> sizes(block_count(n), 0);
    for (const ScanGroup& g : scan_plan(n)) sizes[g.block - 1] += g.count();
    return sizes;
}

// Materialized grid in canonical (level, s, m, e) order. Intended for tests,
// small n, and the grid dump; detection streams the plan instead.
inline std::vector<Triplet> build_triplets(int64_t n) {
    std::vector<Triplet> out;
    out.reserve(static_cast<std::size_t>(triplet_count(n)));
    for_each_triplet(n, [&](const Triplet& t) { out.push_back(t); });
    std::sort(out.begin(), out.end(), [](const Triplet& a, const Triplet& b) {
        if (a.level != b.level) return a.level < b.level;
        if (a.s != b.s) return a.s < b.s;
        if (a.m != b.m) return a.m < b.m;
        return a.e < b.e;
    });
    return out;
}

}  // namespace lbd
