#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "critspectra/errors.hpp"
#include "critspectra/spectra.hpp"

namespace critspectra {

/// Result of a log-log Zipf fit: lambda_n ~ exp(logPrefactor) n^(-zeta).
struct PowerLawFit {
    double zeta = 0.0;           // positive; the fitted slope is -zeta
    double log_prefactor = 0.0;
    int n_min = 0;               // fitted index window, inclusive
    int n_max = 0;
    double rmse = 0.0;           // residual RMS in log space
    int point_count = 0;
    int excluded_count = 0;      // non-positive values dropped from the window
};

/// Index window over which a Zipf fit is taken.
struct FitWindow {
    int n_min = 0;
    int n_max = 0;
};

/// Default fit window for a spectrum of length n: [n/400, n/40], a fixed
/// rank fraction so windows are comparable across sizes. Rank 1 (the
/// dominant uniform mode) is always excluded.
inline FitWindow default_fit_window(long n) {
    const int lo = static_cast<int>(std::lround(static_cast<double>(n) / 400.0));
    const int hi = static_cast<int>(std::lround(static_cast<double>(n) / 40.0));
    return {std::max(2, lo), std::max(2, hi)};
}

/**
 * Ordinary least squares of ln(lambda_n) against ln(n) over the index
 * window. Non-positive eigenvalues inside the window are excluded and
 * counted; fewer than 5 usable points is an error.
 */
inline PowerLawFit fit_power_law(const ZipfSeries& zipf, const FitWindow& window) {
    if (window.n_min < 1 || window.n_max < window.n_min)
        throw precondition_error("fit_power_law: invalid window [" +
                                 std::to_string(window.n_min) + ", " +
                                 std::to_string(window.n_max) + "]");
    const long total = static_cast<long>(zipf.points.size() + zipf.nonpositive.size());
    const long hi = std::min<long>(window.n_max, total);

    std::vector<double> lx, ly;
    for (const auto& pt : zipf.points) {
        if (pt.rank < window.n_min || pt.rank > hi) continue;
        lx.push_back(std::log(static_cast<double>(pt.rank)));
        ly.push_back(std::log(pt.value));
    }
    // In a decreasing spectrum the non-positive values occupy the tail
    // ranks, so the excluded count inside the window is exact.
    const long positive = static_cast<long>(zipf.points.size());
    const int excluded = static_cast<int>(
        std::max<long>(0, hi - std::max<long>(window.n_min - 1, positive)));
    if (lx.size() < 5)
        throw precondition_error("fit_power_law: fewer than 5 usable points in window");

    const double mx = mean(lx), my = mean(ly);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (sxx == 0.0) throw numeric_error("fit_power_law: degenerate abscissa");
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;

    double ss = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double r = ly[i] - (intercept + slope * lx[i]);
        ss += r * r;
    }

    PowerLawFit fit;
    fit.zeta = -slope;
    fit.log_prefactor = intercept;
    fit.n_min = window.n_min;
    fit.n_max = static_cast<int>(hi);
    fit.rmse = std::sqrt(ss / static_cast<double>(lx.size()));
    fit.point_count = static_cast<int>(lx.size());
    fit.excluded_count = excluded > 0 ? excluded : 0;
    return fit;
}

inline PowerLawFit fit_power_law(const Spectrum& s, const FitWindow& window) {
    return fit_power_law(zipf_series(s), window);
}

}
