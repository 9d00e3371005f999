#pragma once

// Planning diagnostics for a single changepoint: the energy of a jump given
// the distances to its neighbors, the detection threshold it must clear, the
// sqrt(2)-inflated threshold that additionally guarantees disjoint confidence
// intervals, and the localization precision bound.

#include <cmath>
#include <cstdint>

#include "lbd/errors.hpp"

namespace lbd {

struct ChangepointGeometry {
    double jump = 0.0;          // mean difference across the changepoint, in noise units
    std::int64_t d_left = 1;    // distance to the previous changepoint
    std::int64_t d_right = 1;   // distance to the next changepoint
    std::int64_t n = 0;         // series length
    std::int64_t m_n = 1;       // number of changepoints targeted simultaneously
    double b_n = 3.0;           // slack term
};

namespace detail {

inline void check_geometry(const ChangepointGeometry& g) {
    if (g.d_left < 1 || g.d_right < 1)
        throw invalid_argument_error("changepoint distances must be at least 1");
    if (g.m_n < 1) throw invalid_argument_error("targeted changepoint count must be at least 1");
    if (g.n < 1) throw invalid_argument_error("series length must be positive");
    if (!(g.b_n >= 0.0)) throw invalid_argument_error("slack term must be nonnegative");
}

inline double threshold_at(double d_min, const ChangepointGeometry& g) {
    return std::sqrt(2.0 * std::log(static_cast<double>(g.n) / d_min)) +
           std::sqrt(2.0 * std::log(static_cast<double>(g.m_n))) + g.b_n;
}

}  // namespace detail

inline double energy(const ChangepointGeometry& g) {
    detail::check_geometry(g);
    const double dl = static_cast<double>(g.d_left);
    const double dr = static_cast<double>(g.d_right);
    return std::fabs(g.jump) * std::sqrt(dl * dr / (dl + dr));
}

inline double detection_threshold(const ChangepointGeometry& g) {
    detail::check_geometry(g);
    const auto d_min = std::min(g.d_left, g.d_right);
    if (d_min > g.n) throw invalid_argument_error("changepoint distance exceeds series length");
    return detail::threshold_at(static_cast<double>(d_min), g);
}

// Threshold whose satisfaction guarantees pairwise disjoint confidence
// intervals (all log terms doubled).
inline double count_threshold(const ChangepointGeometry& g) {
    detail::check_geometry(g);
    const auto d_min = std::min(g.d_left, g.d_right);
    return std::sqrt(4.0 * std::log(static_cast<double>(g.n) / static_cast<double>(d_min))) +
           std::sqrt(4.0 * std::log(static_cast<double>(g.m_n))) + g.b_n;
}

// Upper bound on the localization precision of a detectable changepoint.
// With g(x) = ((sqrt(2 log(n/x)) + sqrt(2 log m_n) + b_n) / jump)^2, returns
// 2 g(jump^-2) when the detection condition already holds on the symmetric
// geometry (d_min on both sides, 2 d_min total), and otherwise
// (1 - g(d_min)/d_min)^-1 g(d_min).
inline double precision_bound(const ChangepointGeometry& g) {
    detail::check_geometry(g);
    if (energy(g) < detection_threshold(g))
        throw not_detectable_error("energy below the detection threshold");

    const double jump = std::fabs(g.jump);
    const double d_min = static_cast<double>(std::min(g.d_left, g.d_right));
    auto g_of = [&](double x) {
        const double t = detail::threshold_at(x, g);
        return (t / jump) * (t / jump);
    };

    const double symmetric_energy = jump * std::sqrt(d_min / 2.0);
    if (symmetric_energy >= detail::threshold_at(d_min, g))
        return 2.0 * g_of(1.0 / (jump * jump));

    const double gm = g_of(d_min);
    if (gm >= d_min)
        throw unbounded_precision_error("precision bound degenerates: g(d_min) >= d_min");
    return gm / (1.0 - gm / d_min);
}

}  // namespace lbd
