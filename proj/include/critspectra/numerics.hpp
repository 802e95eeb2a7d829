#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "critspectra/errors.hpp"

namespace critspectra {

/// Compensated (Kahan) summation; order-independent to double rounding.
inline double kahan_sum(std::span<const double> xs) {
    double sum = 0.0, c = 0.0;
    for (double x : xs) {
        const double y = x - c;
        const double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    return sum;
}

inline double mean(std::span<const double> xs) {
    if (xs.empty()) throw precondition_error("mean: empty input");
    return kahan_sum(xs) / static_cast<double>(xs.size());
}

/// Bias-corrected sample variance (divisor n-1).
inline double sample_variance(std::span<const double> xs) {
    const std::size_t n = xs.size();
    if (n < 2) throw precondition_error("sample_variance: need at least 2 values");
    const double m = mean(xs);
    double sum = 0.0, c = 0.0;
    for (double x : xs) {
        const double d = (x - m) * (x - m) - c;
        const double t = sum + d;
        c = (t - sum) - d;
        sum = t;
    }
    return sum / static_cast<double>(n - 1);
}

namespace detail {

inline double adaptive_simpson_rec(const std::function<double(double)>& f,
                                   double a, double b, double fa, double fm, double fb,
                                   double whole, double tol, int depth) {
    const double m  = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left  = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}

/// Adaptive Simpson quadrature with absolute tolerance.
inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double abs_tol = 1e-10, int max_depth = 40) {
    if (a == b) return 0.0;
    const double m  = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, abs_tol, max_depth);
}

/// Kolmogorov-Smirnov distance between the empirical CDF of `samples`
/// and a reference CDF. `samples` need not be sorted.
inline double ks_distance(std::vector<double> samples,
                          const std::function<double(double)>& cdf) {
    if (samples.empty()) throw precondition_error("ks_distance: empty sample");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double c = cdf(samples[i]);
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - c));
        d = std::max(d, std::abs(static_cast<double>(i) / n - c));
    }
    return d;
}

/// Two-sample Kolmogorov-Smirnov distance.
inline double ks_distance_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty())
        throw precondition_error("ks_distance_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na -
                                 static_cast<double>(j) / nb));
    }
    return d;
}

}
