#pragma once

// Weighted Bonferroni calibration: block B receives weight 1/B, normalized by
// the harmonic sum, and the block budget is split evenly over its triplets:
//
//   alpha_t = alpha / (B * sum_{b<=B_max} 1/b * #block_B)
//
// so that sum over all triplets of alpha_t equals alpha exactly.

#include <cstdint>
#include <span>
#include <vector>

#include "lbd/errors.hpp"

namespace lbd {

struct CalibrationTable {
    double alpha = 0.0;
    long double harmonic = 0.0L;
    // Per-triplet level for block B at index B-1.
    std::vector<long double> per_block_alpha;

    double block_alpha(int block) const {
        return static_cast<double>(per_block_alpha[static_cast<std::size_t>(block) - 1]);
    }
};

inline CalibrationTable calibrate(double alpha, std::span<const std::int64_t> block_sizes) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw invalid_argument_error("alpha must lie strictly between 0 and 1");
    if (block_sizes.empty())
        throw invalid_argument_error("at least one block is required");

    CalibrationTable table;
    table.alpha = alpha;
    for (std::size_t b = 1; b <= block_sizes.size(); ++b)
        table.harmonic += 1.0L / static_cast<long double>(b);

    table.per_block_alpha.reserve(block_sizes.size());
    for (std::size_t b = 1; b <= block_sizes.size(); ++b) {
        const std::int64_t size = block_sizes[b - 1];
        if (size < 1) throw invalid_argument_error("block sizes must be positive");
        const long double level = static_cast<long double>(alpha) /
                                  (static_cast<long double>(b) * table.harmonic *
                                   static_cast<long double>(size));
        if (!(level > 0.0L))
            throw invalid_argument_error("per-triplet level underflows to zero");
        table.per_block_alpha.push_back(level);
    }
    return table;
}

}  // namespace lbd
