#pragma once

// Monte Carlo harness: seeded signal simulation and the coverage experiment
// summarizing detection runs over independent replicates.
//
// Replicate i of a run with master seed s draws its noise from the stream
// replicate_seed(s, offset + i) (see rng.hpp), so a run over n_sim = a + b
// replicates equals the merge of a run over a at offset 0 and a run over b at
// offset a. Aggregation uses counts only, so worker threads never affect the
// result.

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <thread>
#include <vector>

#include "lbd/detector.hpp"
#include "lbd/rng.hpp"
#include "lbd/signals.hpp"

namespace lbd {

inline std::vector<double> simulate(const SignalSpec& spec, std::uint64_t seed) {
    std::vector<double> y = mean_vector(spec);
    SplitMix64 rng(seed);
    for (double& v : y) v += spec.sigma * rng.next_normal();
    return y;
}

struct CoverageReport {
    double p1_hat = 0.0;   // fraction of replicates whose every interval covers a changepoint
    double p2_hat = 0.0;   // fraction with N(alpha) <= K
    double mean_lower_bound = 0.0;
    std::map<std::int64_t, double> shortfall_hist;  // relative frequencies of N(alpha) - K
    std::int64_t n_sim = 0;
    std::uint64_t seed = 0;
    std::int64_t true_changepoints = 0;
};

namespace detail {

struct CoverageAccumulator {
    std::int64_t covered = 0;
    std::int64_t bounded = 0;
    std::int64_t sum_lower_bound = 0;
    std::map<std::int64_t, std::int64_t> shortfall;

    void merge(const CoverageAccumulator& other) {
        covered += other.covered;
        bounded += other.bounded;
        sum_lower_bound += other.sum_lower_bound;
        for (const auto& [k, v] : other.shortfall) shortfall[k] += v;
    }
};

inline bool contains_changepoint(const ClosedInterval& iv, std::span<const std::int64_t> cps) {
    auto it = std::lower_bound(cps.begin(), cps.end(), iv.lo);
    return it != cps.end() && *it <= iv.hi;
}

}  // namespace detail

// One replicate's contribution, exposed for reuse by callers that run their
// own replicate loops.
inline void accumulate_coverage(const DetectionResult& result,
                                std::span<const std::int64_t> changepoints,
                                detail::CoverageAccumulator& acc) {
    bool all_cover = true;
    for (const Detection& d : result.detections)
        if (!detail::contains_changepoint({d.lo, d.hi}, changepoints)) {
            all_cover = false;
            break;
        }
    const std::int64_t k = static_cast<std::int64_t>(changepoints.size());
    acc.covered += all_cover ? 1 : 0;
    acc.bounded += result.lower_bound <= k ? 1 : 0;
    acc.sum_lower_bound += result.lower_bound;
    acc.shortfall[result.lower_bound - k] += 1;
}

inline CoverageReport coverage_experiment(const SignalSpec& spec, const TestModel& model,
                                          double alpha, std::int64_t n_sim, std::uint64_t seed,
                                          std::int64_t replicate_offset = 0, int threads = 1) {
    if (n_sim < 1) throw invalid_argument_error("need at least one replicate");
    validate_signal(spec);

    DetectorConfig config;
    config.model = model;
    config.alpha = alpha;
    config.threads = 1;  // parallelism goes across replicates here
    PreparedDetector detector(spec.n, config);

    const std::vector<double> mu = mean_vector(spec);
    const std::vector<std::int64_t>& cps = spec.changepoints;

    auto run_range = [&](std::int64_t begin, std::int64_t end, detail::CoverageAccumulator& acc) {
        std::vector<double> y(mu.size());
        for (std::int64_t i = begin; i < end; ++i) {
            SplitMix64 rng(replicate_seed(seed, static_cast<std::uint64_t>(replicate_offset + i)));
            for (std::size_t j = 0; j < mu.size(); ++j)
                y[j] = mu[j] + spec.sigma * rng.next_normal();
            accumulate_coverage(detector.run(y), cps, acc);
        }
    };

    detail::CoverageAccumulator total;
    const int workers = static_cast<int>(std::min<std::int64_t>(std::max(1, threads), n_sim));
    if (workers == 1) {
        run_range(0, n_sim, total);
    } else {
        std::vector<detail::CoverageAccumulator> partial(static_cast<std::size_t>(workers));
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            const std::int64_t begin = n_sim * w / workers;
            const std::int64_t end = n_sim * (w + 1) / workers;
            pool.emplace_back([&, begin, end, w] { run_range(begin, end, partial[static_cast<std::size_t>(w)]); });
        }
        for (auto& th : pool) th.join();
        for (const auto& acc : partial) total.merge(acc);
    }

    CoverageReport report;
    report.n_sim = n_sim;
    report.seed = seed;
    report.true_changepoints = spec.changepoint_count();
    report.p1_hat = static_cast<double>(total.covered) / static_cast<double>(n_sim);
    report.p2_hat = static_cast<double>(total.bounded) / static_cast<double>(n_sim);
    report.mean_lower_bound = static_cast<double>(total.sum_lower_bound) / static_cast<double>(n_sim);
    for (const auto& [diff, count] : total.shortfall)
        report.shortfall_hist[diff] = static_cast<double>(count) / static_cast<double>(n_sim);
    return report;
}

}  // namespace lbd
