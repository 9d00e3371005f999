#pragma once

// Local two-sample test statistics evaluated on a triplet (s, m, e) and the
// matching critical values.
//
// Every parametric statistic is sqrt(2 log LR) for the no-changepoint null
// against a change at m, which makes the null distribution close to |N(0,1)|
// and admits distribution-specific tail bounds:
//   Gaussian, known sigma    -> two-sample z; exact |N(0,1)| null
//   Gaussian, unknown sigma  -> two-sample t with pooled variance; t_{e-s-2}
//   Poisson / Exponential    -> closed-form log LR; bound (4+2e) exp(-x^2/2)
//   Wilcoxon rank-sum        -> standardized rank mean; bound 2 exp(-x^2/2),
//                               or the exact permutation null for small spans

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <variant>
#include <vector>

#include "lbd/errors.hpp"
#include "lbd/grid.hpp"
#include "lbd/math.hpp"

namespace lbd {

struct GaussianKnownSigma {
    double sigma = 1.0;
};
struct GaussianUnknownSigma {};
struct Poisson {};
struct Exponential {};
struct Wilcoxon {
    enum class Mode { exact, bound };
    Mode mode = Mode::bound;
    // The exact permutation null is used when (m-s)(e-m)(e-s) stays within
    // this budget; larger windows fall back to the tail bound.
    std::int64_t exact_budget = 2'000'000;
};

using TestModel = std::variant<GaussianKnownSigma, GaussianUnknownSigma, Poisson, Exponential, Wilcoxon>;

struct StatValue {
    double value = 0.0;
    double threshold = 0.0;
    bool significant = false;
};

inline StatValue make_stat_value(double value, double threshold) {
    return {value, threshold, value > threshold};
}

// Cumulative sums of Y and Y^2 with a leading zero, for O(1) segment sums.
struct PrefixSums {
    std::vector<double> cum;
    std::vector<double> cum_sq;

    PrefixSums() = default;
    explicit PrefixSums(std::span<const double> y) {
        cum.resize(y.size() + 1);
        cum_sq.resize(y.size() + 1);
        cum[0] = 0.0;
        cum_sq[0] = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            cum[i + 1] = cum[i] + y[i];
            cum_sq[i + 1] = cum_sq[i] + y[i] * y[i];
        }
    }

    std::int64_t size() const { return static_cast<std::int64_t>(cum.size()) - 1; }
    double sum(std::int64_t a, std::int64_t b) const { return cum[b] - cum[a]; }
    double sum_sq(std::int64_t a, std::int64_t b) const { return cum_sq[b] - cum_sq[a]; }
    double mean(std::int64_t a, std::int64_t b) const { return sum(a, b) / static_cast<double>(b - a); }
};

namespace detail {

inline void check_triplet(const PrefixSums& prefix, const Triplet& t) {
    if (!(0 <= t.s && t.s < t.m && t.m < t.e && t.e <= prefix.size()))
        throw invalid_argument_error("triplet out of range for this series");
}

// x log(x / y) with the convention 0 log 0 = 0.
inline double x_log_ratio(double x, double y) {
    return x > 0.0 ? x * std::log(x / y) : 0.0;
}

// Clamp tiny negative floating-point residue in a radicand; anything clearly
// negative indicates a logic error upstream.
inline double sqrt_clamped(double radicand) {
    if (radicand < 0.0) {
        if (radicand < -1e-9) throw invalid_data_error("negative log-likelihood ratio");
        radicand = 0.0;
    }
    return std::sqrt(radicand);
}

}  // namespace detail

// |mean difference| / sigma * sqrt((m-s)(e-m)/(e-s)): the local z-statistic.
inline double gaussian_z(const PrefixSums& prefix, const Triplet& t, double sigma) {
    detail::check_triplet(prefix, t);
    if (!(sigma > 0.0)) throw invalid_argument_error("sigma must be positive");
    const double n1 = static_cast<double>(t.m - t.s);
    const double n2 = static_cast<double>(t.e - t.m);
    const double diff = prefix.mean(t.s, t.m) - prefix.mean(t.m, t.e);
    return std::fabs(diff) / sigma * std::sqrt(n1 * n2 / (n1 + n2));
}

// Two-sample t-statistic with pooled variance over e-s-2 degrees of freedom.
// Pooled variance exactly zero degenerates to 0 (equal means) or +inf.
inline double gaussian_t(const PrefixSums& prefix, const Triplet& t) {
    detail::check_triplet(prefix, t);
    if (t.e - t.s < 4)
        throw invalid_argument_error("t-statistic needs at least four observations");
    const double n1 = static_cast<double>(t.m - t.s);
    const double n2 = static_cast<double>(t.e - t.m);
    const double m1 = prefix.mean(t.s, t.m);
    const double m2 = prefix.mean(t.m, t.e);
    double ss = prefix.sum_sq(t.s, t.e) - (n1 * m1 * m1 + n2 * m2 * m2);
    if (ss < 0.0) ss = 0.0;
    const double diff = std::fabs(m1 - m2);
    if (ss == 0.0)
        return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    const double sp = std::sqrt(ss / static_cast<double>(t.e - t.s - 2));
    return diff / sp * std::sqrt(n1 * n2 / (n1 + n2));
}

inline double poisson_stat(const PrefixSums& prefix, const Triplet& t) {
    detail::check_triplet(prefix, t);
    const double n1 = static_cast<double>(t.m - t.s);
    const double n2 = static_cast<double>(t.e - t.m);
    const double m1 = prefix.mean(t.s, t.m);
    const double m2 = prefix.mean(t.m, t.e);
    const double mt = prefix.mean(t.s, t.e);
    if (m1 < 0.0 || m2 < 0.0) throw invalid_data_error("Poisson statistic needs nonnegative data");
    if (mt <= 0.0) return 0.0;  // all-zero window
    const double radicand =
        2.0 * n1 * detail::x_log_ratio(m1, mt) + 2.0 * n2 * detail::x_log_ratio(m2, mt);
    return detail::sqrt_clamped(radicand);
}

inline double exponential_stat(const PrefixSums& prefix, const Triplet& t) {
    detail::check_triplet(prefix, t);
    const double n1 = static_cast<double>(t.m - t.s);
    const double n2 = static_cast<double>(t.e - t.m);
    const double m1 = prefix.mean(t.s, t.m);
    const double m2 = prefix.mean(t.m, t.e);
    const double mt = prefix.mean(t.s, t.e);
    if (m1 <= 0.0 || m2 <= 0.0)
        throw invalid_data_error("exponential statistic needs strictly positive data");
    const double radicand = 2.0 * n1 * std::log(mt / m1) + 2.0 * n2 * std::log(mt / m2);
    return detail::sqrt_clamped(radicand);
}

namespace detail {

// Shared arithmetic for the rank statistic and its exact quantile, so that a
// statistic sitting exactly on a support point of the permutation null
// compares equal to the quantile (the test is strict, so such points are not
// significant). `twice_dev` is the integer |2 W - n1 (len+1)|.
inline double wilcoxon_value(std::int64_t n1, std::int64_t len, double twice_dev) {
    const double scale = std::sqrt(12.0 / static_cast<double>(n1)) / static_cast<double>(len + 1);
    return scale * 0.5 * twice_dev;
}

}  // namespace detail

// Midranks of the window (s, e], then the standardized rank mean of the first
// segment. `had_ties` reports whether any midrank was fractional.
inline double wilcoxon_stat(std::span<const double> y, const Triplet& t, bool* had_ties = nullptr) {
    if (!(0 <= t.s && t.s < t.m && t.m < t.e &&
          t.e <= static_cast<std::int64_t>(y.size())))
        throw invalid_argument_error("triplet out of range for this series");
    const std::int64_t len = t.e - t.s;
    const std::int64_t n1 = t.m - t.s;

    thread_local std::vector<std::int64_t> order;
    order.resize(static_cast<std::size_t>(len));
    for (std::int64_t i = 0; i < len; ++i) order[static_cast<std::size_t>(i)] = t.s + i;
    std::sort(order.begin(), order.end(),
              [&](std::int64_t a, std::int64_t b) { return y[static_cast<std::size_t>(a)] < y[static_cast<std::size_t>(b)]; });

    bool ties = false;
    double rank_sum_first = 0.0;
    std::int64_t i = 0;
    while (i < len) {
        std::int64_t j = i;
        while (j + 1 < len &&
               y[static_cast<std::size_t>(order[static_cast<std::size_t>(j + 1)])] ==
                   y[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])])
            ++j;
        if (j > i) ties = true;
        const double midrank = 0.5 * static_cast<double>(i + j) + 1.0;  // ranks start at 1
        for (std::int64_t k = i; k <= j; ++k)
            if (order[static_cast<std::size_t>(k)] < t.m) rank_sum_first += midrank;
        i = j + 1;
    }
    if (had_ties) *had_ties = ties;

    // 2 * rank_sum_first is an integer even with midranks, so the deviation
    // below is exact and matches the quantile's arithmetic bit for bit.
    const double twice_dev =
        std::fabs(2.0 * rank_sum_first - static_cast<double>(n1 * (len + 1)));
    return detail::wilcoxon_value(n1, len, twice_dev);
}

// --- exact Wilcoxon null -----------------------------------------------------

// Counts of arrangements by U = W - n1(n1+1)/2, where W is the rank sum of the
// first segment under a uniformly random permutation of distinct values.
// Computed as the coefficients of the Gaussian binomial [n1+n2, n1]_q via
// polynomial multiplication by (1 - q^(n2+i)) and division by (1 - q^i);
// doubles are exact far beyond any size the budget admits near the tails we
// care about.
inline std::vector<double> rank_sum_null_counts(std::int64_t n1, std::int64_t n2) {
    if (n1 < 1 || n2 < 1) throw invalid_argument_error("both segments must be nonempty");
    const std::int64_t umax = n1 * n2;
    // Intermediate degree peaks at umax + n1 just after a multiply step.
    std::vector<double> c(static_cast<std::size_t>(umax + n1) + 1, 0.0);
    c[0] = 1.0;
    std::int64_t degree = 0;
    for (std::int64_t i = 1; i <= n1; ++i) {
        const std::int64_t k = n2 + i;
        // multiply by (1 - q^k), descending so the subtrahend is unmodified
        for (std::int64_t u = degree + k; u >= k; --u)
            c[static_cast<std::size_t>(u)] -= c[static_cast<std::size_t>(u - k)];
        degree += k;
        // divide by (1 - q^i): ascending prefix sums with stride i
        degree -= i;
        for (std::int64_t u = i; u <= degree; ++u)
            c[static_cast<std::size_t>(u)] += c[static_cast<std::size_t>(u - i)];
        for (std::int64_t u = degree + 1; u <= degree + i; ++u)
            c[static_cast<std::size_t>(u)] = 0.0;
    }
    c.resize(static_cast<std::size_t>(umax) + 1);
    for (double& v : c)
        if (v < 0.0) v = 0.0;
    return c;
}

// (1-alpha)-quantile of the standardized rank-sum statistic under the exact
// permutation null: the smallest support point c with P(T <= c) >= 1 - alpha.
inline double wilcoxon_exact_quantile(std::int64_t n1, std::int64_t n2, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw invalid_argument_error("alpha must lie strictly between 0 and 1");
    const auto counts = rank_sum_null_counts(n1, n2);
    const std::int64_t umax = n1 * n2;
    const std::int64_t len = n1 + n2;
    double total = 0.0;
    for (double v : counts) total += v;

    // W is symmetric around n1(len+1)/2, i.e. U around umax/2. Accumulate
    // |U - umax/2| outward from the center until the mass reaches 1 - alpha.
    // 2U - umax is the same integer deviation the statistic computes.
    const std::int64_t lo0 = umax / 2;
    double mass = 0.0;
    double quantile = 0.0;
    for (std::int64_t d = 0;; ++d) {
        const std::int64_t a = lo0 - d;
        const std::int64_t b = umax - a;
        if (a < 0) break;
        double add = counts[static_cast<std::size_t>(a)];
        if (b != a) add += counts[static_cast<std::size_t>(b)];
        mass += add;
        quantile = detail::wilcoxon_value(n1, len, static_cast<double>(2 * b - umax));
        if (mass >= (1.0 - alpha) * total) break;
    }
    return quantile;
}

// --- critical values ---------------------------------------------------------

inline constexpr double exp_family_tail_constant = 4.0 + 2.0 * std::numbers::e;

inline double critical_value(const TestModel& model, double alpha_t, const Triplet& t) {
    if (!(alpha_t > 0.0 && alpha_t < 1.0))
        throw invalid_argument_error("alpha must lie strictly between 0 and 1");
    return std::visit(
        [&](const auto& m) -> double {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, GaussianKnownSigma>) {
                return normal_upper_quantile(alpha_t / 2.0);
            } else if constexpr (std::is_same_v<M, GaussianUnknownSigma>) {
                const std::int64_t df = t.e - t.s - 2;
                if (df < 1) throw invalid_argument_error("t-statistic needs at least four observations");
                return student_t_upper_quantile(alpha_t / 2.0, static_cast<double>(df));
            } else if constexpr (std::is_same_v<M, Poisson> || std::is_same_v<M, Exponential>) {
                return std::sqrt(2.0 * std::log(exp_family_tail_constant / alpha_t));
            } else {
                static_assert(std::is_same_v<M, Wilcoxon>);
                if (m.mode == Wilcoxon::Mode::exact) {
                    const std::int64_t n1 = t.m - t.s, n2 = t.e - t.m;
                    if (n1 * n2 * (n1 + n2) <= m.exact_budget)
                        return wilcoxon_exact_quantile(n1, n2, alpha_t);
                }
                return std::sqrt(2.0 * std::log(2.0 / alpha_t));
            }
        },
        model);
}

// Convenience wrapper: statistic plus its calibrated threshold.
inline StatValue evaluate_triplet(const TestModel& model, std::span<const double> y,
                                  const PrefixSums& prefix, const Triplet& t, double alpha_t) {
    const double threshold = critical_value(model, alpha_t, t);
    const double stat = std::visit(
        [&](const auto& m) -> double {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, GaussianKnownSigma>)
                return gaussian_z(prefix, t, m.sigma);
            else if constexpr (std::is_same_v<M, GaussianUnknownSigma>)
                return gaussian_t(prefix, t);
            else if constexpr (std::is_same_v<M, Poisson>)
                return poisson_stat(prefix, t);
            else if constexpr (std::is_same_v<M, Exponential>)
                return exponential_stat(prefix, t);
            else
                return wilcoxon_stat(y, t);
        },
        model);
    return make_stat_value(stat, threshold);
}

}  // namespace lbd
