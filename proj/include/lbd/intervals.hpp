#pragma once

// Post-processing of the significant-interval collection: the inclusion-minimal
// intervals, a maximum set of pairwise disjoint intervals, and its cardinality
// (the lower confidence bound on the number of changepoints).
//
// Single sweep over the collection sorted by right endpoint ascending, left
// endpoint descending on ties. "Disjoint" is strict for closed integer
// intervals: a shared endpoint means overlap. Duplicates are allowed on input
// and collapse in the outputs. O(m log m).
//
// The oracle_* functions re-derive the same answers by definition (pairwise
// inclusion scan, classic greedy interval scheduling) and exist purely as an
// independent check; keep them free of any code shared with the sweep.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

#include "lbd/errors.hpp"

namespace lbd {

struct ClosedInterval {
    std::int64_t lo, hi;

    friend bool operator==(const ClosedInterval&, const ClosedInterval&) = default;
};

struct IntervalSummary {
    std::vector<ClosedInterval> minimal;
    std::vector<ClosedInterval> disjoint;
    std::int64_t lower_bound = 0;
};

namespace detail {

inline void check_intervals(const std::vector<ClosedInterval>& c) {
    for (const auto& iv : c)
        if (iv.lo > iv.hi) throw invalid_argument_error("interval with lo > hi");
}

inline void canonical_sort(std::vector<ClosedInterval>& c) {
    std::sort(c.begin(), c.end(), [](const ClosedInterval& a, const ClosedInterval& b) {
        if (a.hi != b.hi) return a.hi < b.hi;
        return a.lo > b.lo;
    });
}

}  // namespace detail

inline IntervalSummary minimal_and_disjoint(std::vector<ClosedInterval> c) {
    detail::check_intervals(c);
    detail::canonical_sort(c);

    IntervalSummary out;
    constexpr std::int64_t ninf = std::numeric_limits<std::int64_t>::min();
    std::int64_t f = ninf, g = ninf, h = ninf;
    for (const auto& iv : c) {
        if (iv.lo > f) {
            out.disjoint.push_back(iv);
            f = iv.hi;
        }
        if (iv.lo > g && iv.hi > h) {
            out.minimal.push_back(iv);
            g = iv.lo;
            h = iv.hi;
        }
    }
    out.lower_bound = static_cast<std::int64_t>(out.disjoint.size());
    return out;
}

// Quadratic reference: distinct intervals with no proper subset anywhere in C.
inline std::vector<ClosedInterval> oracle_minimal(std::vector<ClosedInterval> c) {
    detail::check_intervals(c);
    std::sort(c.begin(), c.end(), [](const ClosedInterval& a, const ClosedInterval& b) {
        if (a.lo != b.lo) return a.lo < b.lo;
        return a.hi < b.hi;
    });
    c.erase(std::unique(c.begin(), c.end()), c.end());
    std::vector<ClosedInterval> out;
    for (const auto& a : c) {
        bool has_proper_subset = false;
        for (const auto& b : c) {
            const bool subset = a.lo <= b.lo && b.hi <= a.hi;
            if (subset && !(b == a)) {
                has_proper_subset = true;
                break;
            }
        }
        if (!has_proper_subset) out.push_back(a);
    }
    return out;
}

// Greedy interval scheduling: sort by right endpoint, take every compatible
// interval (strictly to the right of the last taken one).
inline std::int64_t oracle_max_disjoint(std::vector<ClosedInterval> c) {
    detail::check_intervals(c);
    std::sort(c.begin(), c.end(), [](const ClosedInterval& a, const ClosedInterval& b) {
        return a.hi < b.hi;
    });
    std::int64_t count = 0;
    std::int64_t last = std::numeric_limits<std::int64_t>::min();
    for (const auto& iv : c) {
        if (iv.lo > last) {
            ++count;
            last = iv.hi;
        }
    }
    return count;
}

}  // namespace lbd
