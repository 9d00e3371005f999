#pragma once

// Scalar special functions used by the test statistics and critical values:
// standard normal CDF/quantile (Wichura's AS241, double precision) and the
// Student-t tail/quantile via the regularized incomplete beta function.

#include <cmath>
#include <limits>

#include "lbd/errors.hpp"

namespace lbd {

inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

// P(N(0,1) > x), accurate in the upper tail.
inline double normal_sf(double x) {
    return 0.5 * std::erfc(x / std::sqrt(2.0));
}

namespace detail {

// AS241 PPND16: inverse of the standard normal CDF, |error| < 1e-15 over
// p in (0,1) away from the extreme denormal range.
inline double ppnd16(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw invalid_argument_error("normal quantile requires p in (0,1)");
    const double q = p - 0.5;
    double r;
    if (std::fabs(q) <= 0.425) {
        r = 0.180625 - q * q;
        const double num =
            (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                  6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
              1.3314166789178437745e2) * r + 3.3871328727963666080e0);
        const double den =
            (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                  3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
              4.2313330701600911252e1) * r + 1.0);
        return q * num / den;
    }
    r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double value;
    if (r <= 5.0) {
        r -= 1.6;
        const double num =
            (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
              4.63033784615654529590e0) * r + 1.42343711074968357734e0);
        const double den =
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
              2.05319162663775882187e0) * r + 1.0);
        value = num / den;
    } else {
        r -= 5.0;
        const double num =
            (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
              5.46378491116411436990e0) * r + 6.65790464350110377720e0);
        const double den =
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
        value = num / den;
    }
    return q < 0.0 ? -value : value;
}

// Continued fraction for the regularized incomplete beta (modified Lentz).
inline double beta_cf(double a, double b, double x) {
    constexpr int max_iter = 300;
    constexpr double eps = 1e-16;
    constexpr double tiny = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

}  // namespace detail

// Regularized incomplete beta I_x(a, b).
inline double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * detail::beta_cf(a, b, x) / a;
    return 1.0 - std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          b * std::log1p(-x) + a * std::log(x)) *
                     detail::beta_cf(b, a, 1.0 - x) / b;
}

// (1-p)-quantile of N(0,1) written as the upper-tail quantile; symmetric form
// keeps full precision for very small tail probabilities.
inline double normal_upper_quantile(double tail) {
    return -detail::ppnd16(tail);
}

inline double normal_quantile(double p) { return detail::ppnd16(p); }

// P(T > t) for Student-t with nu degrees of freedom, t >= 0.
inline double student_t_sf(double t, double nu) {
    if (t < 0.0) return 1.0 - student_t_sf(-t, nu);
    const double x = nu / (nu + t * t);
    return 0.5 * incomplete_beta(0.5 * nu, 0.5, x);
}

// Upper-tail quantile: the t with P(T > t) = tail. Solved by bracketed
// bisection on the monotone tail function; absolute/relative error well below
// the 1e-10 contract for the statistic range of interest.
inline double student_t_upper_quantile(double tail, double nu) {
    if (!(tail > 0.0 && tail < 1.0))
        throw invalid_argument_error("t quantile requires tail in (0,1)");
    if (!(nu > 0.0)) throw invalid_argument_error("t quantile requires nu > 0");
    if (tail >= 0.5) {
        if (tail == 0.5) return 0.0;
        return -student_t_upper_quantile(1.0 - tail, nu);
    }
    double hi = 1.0;
    while (student_t_sf(hi, nu) > tail) {
        hi *= 2.0;
        if (hi > 1e300) return std::numeric_limits<double>::infinity();
    }
    double lo = hi * 0.5 > 0.0 ? (hi == 1.0 ? 0.0 : hi * 0.5) : 0.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (student_t_sf(mid, nu) > tail)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-14 * std::max(1.0, hi)) break;
    }
    return 0.5 * (lo + hi);
}

}  // namespace lbd
