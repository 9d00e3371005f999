#pragma once

// Piecewise-constant benchmark signals: the standard test-signal library used
// for the coverage experiments, plus the equally-spaced tent construction that
// sits at the detection boundary for simultaneous changepoint detection.

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "lbd/errors.hpp"

namespace lbd {

struct SignalSpec {
    std::string name;
    std::int64_t n = 0;
    // Changepoint positions tau in (0, n): the mean changes between Y_tau and
    // Y_{tau+1} (1-based series indexing).
    std::vector<std::int64_t> changepoints;
    // Segment means; one more entry than changepoints.
    std::vector<double> values;
    double sigma = 1.0;

    std::int64_t changepoint_count() const {
        return static_cast<std::int64_t>(changepoints.size());
    }
};

inline void validate_signal(const SignalSpec& spec) {
    if (spec.n < 1) throw invalid_argument_error("signal length must be positive");
    if (spec.values.size() != spec.changepoints.size() + 1)
        throw invalid_argument_error("signal needs one more value than changepoints");
    if (!(spec.sigma >= 0.0)) throw invalid_argument_error("noise level must be nonnegative");
    std::int64_t prev = 0;
    for (std::size_t i = 0; i < spec.changepoints.size(); ++i) {
        const std::int64_t tau = spec.changepoints[i];
        if (tau <= prev || tau >= spec.n)
            throw invalid_argument_error("changepoints must be strictly increasing inside (0, n)");
        if (spec.values[i] == spec.values[i + 1])
            throw invalid_argument_error("adjacent segment values must differ");
        prev = tau;
    }
}

inline std::vector<double> mean_vector(const SignalSpec& spec) {
    validate_signal(spec);
    std::vector<double> mu(static_cast<std::size_t>(spec.n));
    std::size_t seg = 0;
    for (std::int64_t i = 0; i < spec.n; ++i) {
        if (seg < spec.changepoints.size() && i >= spec.changepoints[seg]) ++seg;
        mu[static_cast<std::size_t>(i)] = spec.values[seg];
    }
    return mu;
}

inline const std::vector<std::string>& builtin_signal_names() {
    static const std::vector<std::string> names = {
        "null1000", "null2000", "null3000", "blocks", "fms", "mix", "teeth10", "stairs10"};
    return names;
}

// The benchmark suite. Note: "mix" follows the standard literature definition
// (13 changepoints); see the README for the provenance of each entry.
inline SignalSpec builtin_signal(std::string_view name) {
    auto null_spec = [&](std::int64_t n) {
        return SignalSpec{std::string(name), n, {}, {0.0}, 1.0};
    };
    if (name == "null1000") return null_spec(1000);
    if (name == "null2000") return null_spec(2000);
    if (name == "null3000") return null_spec(3000);
    if (name == "blocks")
        return SignalSpec{"blocks",
                          2048,
                          {205, 267, 308, 472, 512, 820, 902, 1332, 1557, 1598, 1659},
                          {0.0, 14.64, -3.66, 7.32, -7.32, 10.98, -4.39, 3.29, 19.03, 7.68, 15.37, 0.0},
                          10.0};
    if (name == "fms")
        return SignalSpec{"fms",
                          497,
                          {139, 226, 243, 300, 309, 333},
                          {-0.18, 0.08, 1.07, -0.53, 0.16, -0.69, -0.16},
                          0.3};
    if (name == "mix")
        return SignalSpec{"mix",
                          560,
                          {11, 21, 41, 61, 91, 121, 161, 201, 251, 301, 361, 421, 491},
                          {7.0, -7.0, 6.0, -6.0, 5.0, -5.0, 4.0, -4.0, 3.0, -3.0, 2.0, -2.0, 1.0, -1.0},
                          4.0};
    if (name == "teeth10") {
        SignalSpec spec{"teeth10", 140, {}, {}, 0.4};
        for (std::int64_t tau = 11; tau <= 131; tau += 10) spec.changepoints.push_back(tau);
        for (std::size_t i = 0; i <= spec.changepoints.size(); ++i)
            spec.values.push_back(i % 2 == 0 ? 0.0 : 1.0);
        return spec;
    }
    if (name == "stairs10") {
        SignalSpec spec{"stairs10", 150, {}, {}, 0.3};
        for (std::int64_t tau = 11; tau <= 141; tau += 10) spec.changepoints.push_back(tau);
        for (std::size_t i = 0; i <= spec.changepoints.size(); ++i)
            spec.values.push_back(static_cast<double>(i + 1));
        return spec;
    }
    std::string msg = "unknown signal '" + std::string(name) + "'; valid names:";
    for (const auto& valid : builtin_signal_names()) msg += " " + valid;
    throw invalid_argument_error(msg);
}

// Equally spaced tent signal at the multiple-changepoint detection boundary:
// with delta = floor(n / (4m)), jumps of half-height
// (4 - epsilon)/(2 sqrt(delta)) * sqrt(log(n/delta)) alternate around zero on
// blocks of width delta, targeting the changepoints t_i = (2i-1) delta whose
// left and right gaps both equal delta. Noise level is 1.
inline SignalSpec hard_instance(std::int64_t n, std::int64_t m, double epsilon) {
    if (m < 1 || 4 * m > n)
        throw invalid_argument_error("need 4 <= 4m <= n for the hard instance");
    if (!(epsilon > 0.0 && epsilon < 4.0))
        throw invalid_argument_error("epsilon must lie strictly between 0 and 4");
    const std::int64_t delta = n / (4 * m);
    const double half_height = (4.0 - epsilon) / (2.0 * std::sqrt(static_cast<double>(delta))) *
                               std::sqrt(std::log(static_cast<double>(n) / static_cast<double>(delta)));

    SignalSpec spec;
    spec.name = "hard-instance";
    spec.n = n;
    spec.sigma = 1.0;
    for (std::int64_t i = 1; i <= 2 * m; ++i) {
        spec.values.push_back(i % 2 == 1 ? -half_height : half_height);
        if (i * delta < n) spec.changepoints.push_back(i * delta);
    }
    if (2 * m * delta < n) spec.values.push_back(0.0);
    validate_signal(spec);
    return spec;
}

// The changepoints targeted by the construction, t_i = (2i-1) delta.
inline std::vector<std::int64_t> hard_instance_targets(std::int64_t n, std::int64_t m) {
    if (m < 1 || 4 * m > n)
        throw invalid_argument_error("need 4 <= 4m <= n for the hard instance");
    const std::int64_t delta = n / (4 * m);
    std::vector<std::int64_t> targets;
    for (std::int64_t i = 1; i <= m; ++i) targets.push_back((2 * i - 1) * delta);
    return targets;
}

}  // namespace lbd
