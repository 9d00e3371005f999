#pragma once

// The full scan: build the triplet plan for n, calibrate per-triplet levels,
// evaluate every admissible triplet against its critical value, and assemble
// the confidence collection C(alpha) together with the minimal intervals,
// a maximum disjoint subset, and the changepoint-count lower bound.
//
// PreparedDetector makes the per-n setup (plan, calibration, thresholds)
// reusable across many series of the same length; `run` is const and
// thread-safe, and the scan itself can be sliced over worker threads. Results
// are merged under a canonical sort, so the output is bit-identical for any
// thread count.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <thread>
#include <variant>
#include <vector>

#include "lbd/calibration.hpp"
#include "lbd/errors.hpp"
#include "lbd/grid.hpp"
#include "lbd/intervals.hpp"
#include "lbd/local_tests.hpp"

namespace lbd {

struct Detection {
    std::int64_t lo, hi;  // confidence interval [s+1, e-1] for a changepoint
    Triplet triplet;
    double stat = 0.0;
    double threshold = 0.0;
    double alpha_t = 0.0;
};

struct GridSummary {
    std::int64_t evaluated_triplets = 0;
    int levels = 0;
    int blocks = 0;
    std::vector<std::int64_t> block_sizes;
};

struct DetectorConfig {
    TestModel model = GaussianKnownSigma{};
    double alpha = 0.1;
    // Only triplets with e - s <= n^p are evaluated.
    double max_length_exponent = 1.0;
    int threads = 1;
};

struct DetectionResult {
    std::vector<Detection> detections;  // C(alpha), canonically sorted
    std::vector<ClosedInterval> minimal;
    std::vector<ClosedInterval> disjoint;
    std::int64_t lower_bound = 0;

    std::int64_t n = 0;
    double alpha = 0.0;
    TestModel model;
    GridSummary grid;
};

// Scan groups surviving the span cap (and, for the unknown-variance model,
// the interval-length >= 2 restriction). The block weighting starts at level
// 1: level-0 triplets carry no weight and are never evaluated, which is what
// reproduces the published operating characteristics.
inline std::vector<ScanGroup> capped_plan(std::int64_t n, double p, const TestModel& model) {
    if (!(p > 0.0 && p <= 1.0))
        throw invalid_argument_error("max length exponent must lie in (0, 1]");
    const double cap = std::pow(static_cast<double>(n), p);
    const bool needs_variance = std::holds_alternative<GaussianUnknownSigma>(model);
    std::vector<ScanGroup> plan = scan_plan(n);
    std::erase_if(plan, [&](const ScanGroup& g) {
        if (g.level == 0) return true;
        if (static_cast<double>(g.seg1 + g.seg2) > cap) return true;
        if (needs_variance && (g.right_ext ? g.seg1 : g.seg2) < 2) return true;
        return false;
    });
    return plan;
}

namespace detail {

inline void validate_series(const TestModel& model, std::span<const double> y) {
    for (std::size_t i = 0; i < y.size(); ++i)
        if (!std::isfinite(y[i]))
            throw invalid_data_error("non-finite value", static_cast<std::int64_t>(i));
    if (std::holds_alternative<Poisson>(model)) {
        for (std::size_t i = 0; i < y.size(); ++i)
            if (y[i] < 0.0 || std::fabs(y[i] - std::round(y[i])) > 1e-9)
                throw invalid_data_error("Poisson data must be nonnegative integers",
                                         static_cast<std::int64_t>(i));
    } else if (std::holds_alternative<Exponential>(model)) {
        for (std::size_t i = 0; i < y.size(); ++i)
            if (y[i] <= 0.0)
                throw invalid_data_error("exponential data must be strictly positive",
                                         static_cast<std::int64_t>(i));
    }
}

struct GroupThresholds {
    double alpha_t = 0.0;
    double threshold = 0.0;        // main critical value
    double tie_fallback = 0.0;     // Wilcoxon only: bound used when ties occur
};

}  // namespace detail

class PreparedDetector {
  public:
    PreparedDetector(std::int64_t n, const DetectorConfig& config)
        : n_(n), config_(config), plan_(capped_plan(n, config.max_length_exponent, config.model)) {
        summary_.levels = max_level(n) + 1;

        std::vector<std::int64_t> sizes(static_cast<std::size_t>(block_count(n)), 0);
        for (const ScanGroup& g : plan_) {
            sizes[static_cast<std::size_t>(g.block) - 1] += g.count();
            summary_.evaluated_triplets += g.count();
        }
        if (std::getenv("LBD_CAL_FULL_SIZES")) {
            for (auto& s : sizes) s = 0;
            for (const ScanGroup& g : scan_plan(n)) sizes[static_cast<std::size_t>(g.block) - 1] += g.count();
        }
        while (!sizes.empty() && sizes.back() == 0) sizes.pop_back();
        summary_.block_sizes = sizes;
        summary_.blocks = static_cast<int>(sizes.size());
        if (plan_.empty()) return;  // nothing admissible; runs return empty results

        calibration_ = calibrate(config.alpha, sizes);
        precompute_thresholds();
    }

    const std::vector<ScanGroup>& plan() const { return plan_; }
    const CalibrationTable& calibration() const { return calibration_; }
    const GridSummary& grid_summary() const { return summary_; }
    std::int64_t series_length() const { return n_; }
    const DetectorConfig& config() const { return config_; }

    DetectionResult run(std::span<const double> y) const {
        if (static_cast<std::int64_t>(y.size()) != n_)
            throw invalid_argument_error("series length does not match the prepared detector");
        detail::validate_series(config_.model, y);

        const bool needs_prefix = !std::holds_alternative<Wilcoxon>(config_.model);
        PrefixSums prefix;
        if (needs_prefix) prefix = PrefixSums(y);

        const int threads = std::max(1, config_.threads);
        std::vector<Detection> detections;
        if (threads == 1 || plan_.size() <= 1) {
            for (std::size_t gi = 0; gi < plan_.size(); ++gi)
                scan_group(gi, plan_[gi].anchor_first, plan_[gi].anchor_last, y, prefix, detections);
        } else {
            std::atomic<std::size_t> next{0};
            std::vector<std::vector<Detection>> partial(static_cast<std::size_t>(threads));
            std::vector<std::thread> pool;
            for (int t = 0; t < threads; ++t) {
                pool.emplace_back([&, t] {
                    for (;;) {
                        const std::size_t gi = next.fetch_add(1);
                        if (gi >= plan_.size()) break;
                        scan_group(gi, plan_[gi].anchor_first, plan_[gi].anchor_last, y, prefix,
                                   partial[static_cast<std::size_t>(t)]);
                    }
                });
            }
            for (auto& th : pool) th.join();
            for (auto& part : partial)
                detections.insert(detections.end(), part.begin(), part.end());
        }

        std::sort(detections.begin(), detections.end(), [](const Detection& a, const Detection& b) {
            if (a.hi != b.hi) return a.hi < b.hi;
            if (a.lo != b.lo) return a.lo > b.lo;
            if (a.triplet.level != b.triplet.level) return a.triplet.level < b.triplet.level;
            return a.triplet.m < b.triplet.m;
        });

        DetectionResult result;
        result.n = n_;
        result.alpha = config_.alpha;
        result.model = config_.model;
        result.grid = summary_;
        result.detections = std::move(detections);

        std::vector<ClosedInterval> c;
        c.reserve(result.detections.size());
        for (const Detection& d : result.detections) c.push_back({d.lo, d.hi});
        IntervalSummary lens = minimal_and_disjoint(std::move(c));
        result.minimal = std::move(lens.minimal);
        result.disjoint = std::move(lens.disjoint);
        result.lower_bound = lens.lower_bound;
        return result;
    }

  private:
    void precompute_thresholds() {
        thresholds_.resize(plan_.size());
        std::map<std::pair<int, std::int64_t>, double> t_cache;      // (block, df)
        std::map<std::tuple<std::int64_t, std::int64_t, int>, double> exact_cache;
        for (std::size_t gi = 0; gi < plan_.size(); ++gi) {
            const ScanGroup& g = plan_[gi];
            detail::GroupThresholds& out = thresholds_[gi];
            out.alpha_t = calibration_.block_alpha(g.block);
            const Triplet probe = g.triplet_at(g.anchor_first);
            std::visit(
                [&](const auto& m) {
                    using M = std::decay_t<decltype(m)>;
                    if constexpr (std::is_same_v<M, GaussianUnknownSigma>) {
                        const auto key = std::make_pair(g.block, g.seg1 + g.seg2 - 2);
                        auto it = t_cache.find(key);
                        if (it == t_cache.end())
                            it = t_cache.emplace(key, critical_value(config_.model, out.alpha_t, probe)).first;
                        out.threshold = it->second;
                    } else if constexpr (std::is_same_v<M, Wilcoxon>) {
                        out.tie_fallback = std::sqrt(2.0 * std::log(2.0 / out.alpha_t));
                        if (m.mode == Wilcoxon::Mode::exact &&
                            g.seg1 * g.seg2 * (g.seg1 + g.seg2) <= m.exact_budget) {
                            const auto key = std::make_tuple(g.seg1, g.seg2, g.block);
                            auto it = exact_cache.find(key);
                            if (it == exact_cache.end())
                                it = exact_cache
                                         .emplace(key, wilcoxon_exact_quantile(g.seg1, g.seg2, out.alpha_t))
                                         .first;
                            out.threshold = it->second;
                        } else {
                            out.threshold = out.tie_fallback;
                        }
                    } else {
                        out.threshold = critical_value(config_.model, out.alpha_t, probe);
                    }
                },
                config_.model);
        }
    }

    void scan_group(std::size_t gi, std::int64_t a_first, std::int64_t a_last,
                    std::span<const double> y, const PrefixSums& prefix,
                    std::vector<Detection>& out) const {
        const ScanGroup& g = plan_[gi];
        if (a_last < a_first) return;
        const detail::GroupThresholds& thr = thresholds_[gi];

        // Anchor-relative offsets of the prefix-sum taps (s, m, e).
        const std::int64_t o1 = g.right_ext ? 0 : -g.seg1;
        const std::int64_t o2 = o1 + g.seg1;
        const std::int64_t o3 = o2 + g.seg2;
        const double n1 = static_cast<double>(g.seg1);
        const double n2 = static_cast<double>(g.seg2);
        const double inv1 = 1.0 / n1;
        const double inv2 = 1.0 / n2;
        const double geom_sq = n1 * n2 / (n1 + n2);

        auto emit = [&](std::int64_t a, double stat) {
            out.push_back({0, 0, g.triplet_at(a), stat, thr.threshold, thr.alpha_t});
            Detection& d = out.back();
            d.lo = d.triplet.s + 1;
            d.hi = d.triplet.e - 1;
        };

        std::visit(
            [&](const auto& m) {
                using M = std::decay_t<decltype(m)>;
                const double* c = prefix.cum.data();
                if constexpr (std::is_same_v<M, GaussianKnownSigma>) {
                    // |mean1 - mean2| > thr * sigma / geom
                    const double folded = thr.threshold * m.sigma / std::sqrt(geom_sq);
                    for (std::int64_t a = a_first; a <= a_last; a += g.spacing) {
                        const double mid = c[a + o2];
                        const double diff = (mid - c[a + o1]) * inv1 - (c[a + o3] - mid) * inv2;
                        if (std::fabs(diff) > folded)
                            emit(a, std::fabs(diff) / m.sigma * std::sqrt(geom_sq));
                    }
                } else if constexpr (std::is_same_v<M, GaussianUnknownSigma>) {
                    // diff^2 * geom^2 * df > thr^2 * SS  (covers the SS == 0 degeneracies)
                    const double* q = prefix.cum_sq.data();
                    const double df = static_cast<double>(g.seg1 + g.seg2 - 2);
                    const double lhs_coef = geom_sq * df;
                    const double thr_sq = thr.threshold * thr.threshold;
                    for (std::int64_t a = a_first; a <= a_last; a += g.spacing) {
                        const double mid = c[a + o2];
                        const double m1 = (mid - c[a + o1]) * inv1;
                        const double m2 = (c[a + o3] - mid) * inv2;
                        double ss = (q[a + o3] - q[a + o1]) - (n1 * m1 * m1 + n2 * m2 * m2);
                        if (ss < 0.0) ss = 0.0;
                        const double diff = m1 - m2;
                        if (diff * diff * lhs_coef > thr_sq * ss)
                            emit(a, gaussian_t(prefix, g.triplet_at(a)));
                    }
                } else if constexpr (std::is_same_v<M, Poisson>) {
                    const double thr_sq = thr.threshold * thr.threshold;
                    const double inv_t = 1.0 / (n1 + n2);
                    for (std::int64_t a = a_first; a <= a_last; a += g.spacing) {
                        const double mid = c[a + o2];
                        const double s1 = mid - c[a + o1];
                        const double s2 = c[a + o3] - mid;
                        const double mt = (s1 + s2) * inv_t;
                        if (mt <= 0.0) continue;
                        const double m1 = s1 * inv1, m2 = s2 * inv2;
                        const double radicand = 2.0 * (n1 * detail_xlog(m1, mt) + n2 * detail_xlog(m2, mt));
                        if (radicand > thr_sq) emit(a, std::sqrt(radicand));
                    }
                } else if constexpr (std::is_same_v<M, Exponential>) {
                    const double thr_sq = thr.threshold * thr.threshold;
                    const double inv_t = 1.0 / (n1 + n2);
                    for (std::int64_t a = a_first; a <= a_last; a += g.spacing) {
                        const double mid = c[a + o2];
                        const double m1 = (mid - c[a + o1]) * inv1;
                        const double m2 = (c[a + o3] - mid) * inv2;
                        const double mt = (m1 * n1 + m2 * n2) * inv_t;
                        const double radicand = 2.0 * (n1 * std::log(mt / m1) + n2 * std::log(mt / m2));
                        if (radicand > thr_sq) emit(a, std::sqrt(radicand));
                    }
                } else {
                    static_assert(std::is_same_v<M, Wilcoxon>);
                    for (std::int64_t a = a_first; a <= a_last; a += g.spacing) {
                        const Triplet t = g.triplet_at(a);
                        bool ties = false;
                        const double stat = wilcoxon_stat(y, t, &ties);
                        const double cut = ties ? thr.tie_fallback : thr.threshold;
                        if (stat > cut) {
                            out.push_back({t.s + 1, t.e - 1, t, stat, cut, thr.alpha_t});
                        }
                    }
                }
            },
            config_.model);
    }

    static double detail_xlog(double x, double y) { return x > 0.0 ? x * std::log(x / y) : 0.0; }

    std::int64_t n_;
    DetectorConfig config_;
    std::vector<ScanGroup> plan_;
    CalibrationTable calibration_;
    GridSummary summary_;
    std::vector<detail::GroupThresholds> thresholds_;
};

inline DetectionResult detect(std::span<const double> y, const DetectorConfig& config) {
    PreparedDetector prepared(static_cast<std::int64_t>(y.size()), config);
    return prepared.run(y);
}

}  // namespace lbd
