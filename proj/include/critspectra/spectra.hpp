#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "critspectra/correlation.hpp"
#include "critspectra/errors.hpp"
#include "critspectra/mp.hpp"
#include "critspectra/numerics.hpp"

namespace critspectra {

/// Eigenvalues sorted in decreasing order, with the provenance needed by
/// downstream observables (source dimension and series length, if known).
struct Spectrum {
    std::vector<double> values;   // lambda_1 >= lambda_2 >= ...
    int source_dim = 0;
    long source_tau = 0;

    std::size_t size() const { return values.size(); }
    double sum() const { return kahan_sum(values); }
};

inline Spectrum make_spectrum(std::vector<double> values, int source_dim = 0,
                              long source_tau = 0) {
    std::sort(values.begin(), values.end(), std::greater<>());
    return Spectrum{std::move(values), source_dim, source_tau};
}

/**
 * All eigenvalues of a dense real symmetric matrix, sorted decreasing.
 * Symmetry is enforced within 1e-12 max-norm (relative to the largest
 * entry for matrices with entries beyond unit scale).
 */
inline Spectrum eigenvalues_symmetric(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols())
        throw precondition_error("eigenvalues_symmetric: matrix must be square");
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * scale)
        throw precondition_error("eigenvalues_symmetric: matrix is not symmetric "
                                 "(max asymmetry " + std::to_string(asym) + ")");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw numeric_error("eigenvalues_symmetric: eigensolver failed to converge");
    std::vector<double> vals(solver.eigenvalues().data(),
                             solver.eigenvalues().data() + m.rows());
    return make_spectrum(std::move(vals), static_cast<int>(m.rows()));
}

/// Eigenvalues and matching eigenvectors (columns), sorted by decreasing
/// eigenvalue; used where residual checks need the pairs.
struct EigenPairs {
    std::vector<double> values;
    Eigen::MatrixXd vectors;
};

inline EigenPairs eigenpairs_symmetric(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    if (solver.info() != Eigen::Success)
        throw numeric_error("eigenpairs_symmetric: eigensolver failed to converge");
    const auto n = m.rows();
    EigenPairs out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    // Eigen returns ascending order; reverse to decreasing.
    for (Eigen::Index i = 0; i < n; ++i) {
        out.values[i] = solver.eigenvalues()(n - 1 - i);
        out.vectors.col(i) = solver.eigenvectors().col(n - 1 - i);
    }
    return out;
}

inline Spectrum spectrum_of(const CorrelationMatrix& c) {
    Spectrum s = eigenvalues_symmetric(c.dense());
    s.source_dim = c.dim();
    s.source_tau = c.tau();
    return s;
}

namespace detail {

/// Standardized (mean 0, population variance 1, scaled by 1/sqrt(tau))
/// series of the spin recording; degenerate rows are dropped and counted.
inline Eigen::MatrixXd standardized_rows(const TimeSeriesMatrix& ts, int& n_degenerate) {
    const int n = ts.n_series;
    const long tau = ts.tau;
    Eigen::MatrixXd z(n, tau);
    int keep = 0;
    for (int m = 0; m < n; ++m) {
        long sum = 0;
        const std::int8_t* row = &ts.data[static_cast<std::size_t>(m) * tau];
        for (long t = 0; t < tau; ++t) sum += row[t];
        const double mu = static_cast<double>(sum) / static_cast<double>(tau);
        const double var = 1.0 - mu * mu;
        if (var == 0.0) continue;
        const double inv = 1.0 / std::sqrt(var * static_cast<double>(tau));
        for (long t = 0; t < tau; ++t)
            z(keep, t) = (static_cast<double>(row[t]) - mu) * inv;
        ++keep;
    }
    n_degenerate = n - keep;
    return z.topRows(keep);
}

}

/**
 * Spectrum of the spatial correlation matrix computed through the tau x tau
 * temporal Gram matrix of the standardized data. The nonzero eigenvalues
 * of the spatial and temporal matrices are identical; the spatial spectrum
 * is completed with exact zeros (and a unit eigenvalue per degenerate
 * site). Much faster than the dense route when tau << D.
 */
inline Spectrum temporal_gram_spectrum(const TimeSeriesMatrix& ts) {
    if (ts.tau < 2)
        throw precondition_error("temporal_gram_spectrum: need tau >= 2");
    int n_degenerate = 0;
    const Eigen::MatrixXd z = detail::standardized_rows(ts, n_degenerate);
    const int d_eff = static_cast<int>(z.rows());

    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(ts.tau, ts.tau);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(z.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
        gram.selfadjointView<Eigen::Lower>(), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw numeric_error("temporal_gram_spectrum: eigensolver failed");

    std::vector<double> vals;
    vals.reserve(ts.n_series);
    const long keep = std::min<long>(ts.tau, d_eff);
    for (long i = 0; i < keep; ++i)
        vals.push_back(solver.eigenvalues()(ts.tau - 1 - i));
    vals.resize(static_cast<std::size_t>(d_eff), 0.0);
    vals.insert(vals.end(), static_cast<std::size_t>(n_degenerate), 1.0);
    Spectrum s = make_spectrum(std::move(vals), ts.n_series, ts.tau);
    return s;
}

/// Spectrum of the correlation matrix of a recording, routed through the
/// temporal Gram matrix when tau < D/2 and the dense matrix otherwise.
inline Spectrum correlation_spectrum(const TimeSeriesMatrix& ts, unsigned jobs = 0) {
    if (ts.tau < static_cast<long>(ts.n_series) / 2)
        return temporal_gram_spectrum(ts);
    Spectrum s = spectrum_of(build_correlation(ts, jobs));
    return s;
}

/// Throws unless the spectrum satisfies the unmapped-correlation
/// invariants: eigenvalue sum D within 1e-8 D, smallest >= -1e-8 D.
inline void validate_correlation_spectrum(const Spectrum& s) {
    const double d = static_cast<double>(s.size());
    if (std::abs(s.sum() - d) > 1e-8 * d)
        throw numeric_error("correlation spectrum: trace deviates from D");
    if (!s.values.empty() && s.values.back() < -1e-8 * d)
        throw numeric_error("correlation spectrum: negative eigenvalue beyond tolerance");
}

/// Count of eigenvalues above the rank tolerance 1e-8 D; the measured
/// rank used to place the bulk/emerging split.
inline int measured_rank(const Spectrum& s) {
    const double tol = 1e-8 * static_cast<double>(s.size());
    return static_cast<int>(std::count_if(s.values.begin(), s.values.end(),
                                          [&](double v) { return v > tol; }));
}

/// One Zipf point: eigenvalue against its 1-based rank in the ordered
/// spectrum.
struct ZipfPoint {
    long rank;
    double value;
};

/// Log-log usable Zipf series; non-positive eigenvalues are kept aside.
struct ZipfSeries {
    std::vector<ZipfPoint> points;
    std::vector<double> nonpositive;
};

inline ZipfSeries zipf_series(const Spectrum& s) {
    ZipfSeries z;
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        if (s.values[i] > 0.0)
            z.points.push_back({static_cast<long>(i) + 1, s.values[i]});
        else
            z.nonpositive.push_back(s.values[i]);
    }
    return z;
}

/// Bulk and emerging parts of a power-mapped spectrum. A positive gap
/// certifies that the lifted spectrum is well separated from the bulk.
struct SplitSpectrum {
    Spectrum bulk;       // tau_measured largest-magnitude eigenvalues
    Spectrum emerging;   // remaining D - tau_measured
    double gap = 0.0;    // min |bulk| - max |emerging|
};

inline SplitSpectrum split_emerging(const Spectrum& s, int tau_measured) {
    const int d = static_cast<int>(s.size());
    if (tau_measured >= d)
        throw precondition_error("split_emerging: tauMeasured must be < D (nothing to split)");
    if (tau_measured < 1)
        throw precondition_error("split_emerging: tauMeasured must be >= 1");

    std::vector<double> by_mag(s.values);
    std::sort(by_mag.begin(), by_mag.end(),
              [](double a, double b) { return std::abs(a) > std::abs(b); });

    SplitSpectrum out;
    out.bulk = make_spectrum(
        std::vector<double>(by_mag.begin(), by_mag.begin() + tau_measured),
        s.source_dim, s.source_tau);
    out.emerging = make_spectrum(
        std::vector<double>(by_mag.begin() + tau_measured, by_mag.end()),
        s.source_dim, s.source_tau);
    out.gap = std::abs(by_mag[tau_measured - 1]) - std::abs(by_mag[tau_measured]);
    return out;
}

/// Normalized histogram; bin densities integrate to 1.
struct DensityEstimate {
    std::vector<double> bin_edges;     // size bins + 1
    std::vector<double> densities;     // size bins
    std::size_t sample_count = 0;

    double integral() const {
        double total = 0.0;
        for (std::size_t b = 0; b < densities.size(); ++b)
            total += densities[b] * (bin_edges[b + 1] - bin_edges[b]);
        return total;
    }
};

inline DensityEstimate density_histogram(std::span<const double> samples,
                                         std::vector<double> edges) {
    if (samples.size() < 2)
        throw precondition_error("density_histogram: need at least 2 samples");
    if (edges.size() < 2 || !std::is_sorted(edges.begin(), edges.end()))
        throw precondition_error("density_histogram: need sorted bin edges");

    DensityEstimate est;
    est.sample_count = samples.size();
    est.densities.assign(edges.size() - 1, 0.0);
    for (double x : samples) {
        if (x < edges.front() || x > edges.back()) continue;
        auto it = std::upper_bound(edges.begin(), edges.end(), x);
        std::size_t b = static_cast<std::size_t>(it - edges.begin());
        b = (b == 0) ? 0 : b - 1;
        if (b >= est.densities.size()) b = est.densities.size() - 1;  // x == max edge
        est.densities[b] += 1.0;
    }
    const double n = static_cast<double>(samples.size());
    for (std::size_t b = 0; b < est.densities.size(); ++b)
        est.densities[b] /= n * (edges[b + 1] - edges[b]);
    est.bin_edges = std::move(edges);
    return est;
}

/// Histogram with `bins` equal-width bins over the sample range
/// (square-root rule when bins == 0).
inline DensityEstimate density_histogram(std::span<const double> samples, int bins = 0) {
    if (samples.size() < 2)
        throw precondition_error("density_histogram: need at least 2 samples");
    const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
    double lo = *lo_it, hi = *hi_it;
    if (lo == hi) {  // constant sample: one unit-width bin around the value
        lo -= 0.5;
        hi += 0.5;
        bins = 1;
    }
    if (bins <= 0)
        bins = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(samples.size()))));
    std::vector<double> edges(static_cast<std::size_t>(bins) + 1);
    for (int b = 0; b <= bins; ++b)
        edges[b] = lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(bins);
    return density_histogram(samples, std::move(edges));
}

inline DensityEstimate density_histogram(const Spectrum& s, int bins = 0) {
    return density_histogram(std::span<const double>(s.values), bins);
}

/// Unfolding recipe: the analytic MP counting function (kappa required),
/// or a polynomial fit to the empirical staircase.
struct UnfoldMethod {
    enum class Kind { mp_analytic, polynomial };
    Kind kind = Kind::polynomial;
    int order = 7;
    double kappa = 0.0;   // mp_analytic only
};

namespace detail {

/// Least-squares polynomial fit of y against x (x rescaled to [-1,1]);
/// returns the fitted values at the sample points.
inline std::vector<double> polynomial_staircase_fit(const std::vector<double>& x,
                                                    const std::vector<double>& y,
                                                    int order) {
    const auto n = static_cast<Eigen::Index>(x.size());
    const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
    const double mid = 0.5 * (*lo_it + *hi_it);
    const double half = 0.5 * (*hi_it - *lo_it);
    if (half == 0.0)
        throw numeric_error("unfold: degenerate staircase fit (constant spectrum)");

    Eigen::MatrixXd v(n, order + 1);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double t = (x[static_cast<std::size_t>(i)] - mid) / half;
        double p = 1.0;
        for (int k = 0; k <= order; ++k) {
            v(i, k) = p;
            p *= t;
        }
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(v);
    if (qr.rank() < order + 1)
        throw numeric_error("unfold: singular normal equations in staircase fit");
    const Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), n);
    const Eigen::VectorXd coef = qr.solve(yv);
    const Eigen::VectorXd fitted = v * coef;
    return {fitted.data(), fitted.data() + n};
}

inline std::vector<double> trim_edges(std::vector<double> seq, double trim) {
    const auto cut = static_cast<std::size_t>(
        std::floor(trim * static_cast<double>(seq.size())));
    if (2 * cut >= seq.size()) return seq;
    return {seq.begin() + cut, seq.end() - cut};
}

}

/**
 * Maps eigenvalues through a smooth counting function so that the mean
 * level spacing becomes one, enabling universal fluctuation comparisons.
 * 10% of the sequence is trimmed at each spectral edge.
 */
inline std::vector<double> unfold(const Spectrum& s, const UnfoldMethod& method,
                                  double trim = 0.1) {
    std::vector<double> ascending(s.values.rbegin(), s.values.rend());
    if (method.kind == UnfoldMethod::Kind::mp_analytic) {
        if (!(method.kappa > 0.0))
            throw precondition_error("unfold: mp-analytic method requires kappa > 0");
        MPParams p{method.kappa, 1.0};
        const double n = static_cast<double>(ascending.size());
        std::vector<double> out;
        out.reserve(ascending.size());
        for (double v : ascending) out.push_back(n * mp_cdf(v, p));
        return detail::trim_edges(std::move(out), trim);
    }
    if (ascending.size() < 10)
        throw precondition_error("unfold: polynomial method needs >= 10 eigenvalues");
    std::vector<double> staircase(ascending.size());
    for (std::size_t i = 0; i < staircase.size(); ++i)
        staircase[i] = static_cast<double>(i) + 0.5;
    auto fitted = detail::polynomial_staircase_fit(ascending, staircase, method.order);
    return detail::trim_edges(std::move(fitted), trim);
}

inline std::vector<double> unfold_mp(const Spectrum& s, double kappa, double trim = 0.1) {
    return unfold(s, {UnfoldMethod::Kind::mp_analytic, 0, kappa}, trim);
}

inline std::vector<double> unfold_polynomial(const Spectrum& s, int order = 7,
                                             double trim = 0.1) {
    return unfold(s, {UnfoldMethod::Kind::polynomial, order, 0.0}, trim);
}

/// Consecutive differences of the sorted sequence.
inline std::vector<double> nearest_neighbor_spacings(std::vector<double> unfolded) {
    if (unfolded.size() < 2)
        throw precondition_error("nearest_neighbor_spacings: need at least 2 points");
    std::sort(unfolded.begin(), unfolded.end());
    std::vector<double> spacings(unfolded.size() - 1);
    for (std::size_t i = 0; i + 1 < unfolded.size(); ++i)
        spacings[i] = unfolded[i + 1] - unfolded[i];
    return spacings;
}

/// Nearest-neighbor spacing histogram of an unfolded sequence.
struct SpacingDistribution {
    DensityEstimate density;
    double mean_spacing = 0.0;
    bool mean_spacing_ok = true;   // within [0.9, 1.1]
};

inline SpacingDistribution spacing_distribution(std::vector<double> unfolded,
                                                int bins = 0) {
    auto spacings = nearest_neighbor_spacings(std::move(unfolded));
    SpacingDistribution out;
    out.mean_spacing = mean(spacings);
    out.mean_spacing_ok = out.mean_spacing > 0.9 && out.mean_spacing < 1.1;
    out.density = density_histogram(std::span<const double>(spacings), bins);
    return out;
}

/// Pooled spacings of several unfolded sequences (ensemble version).
inline SpacingDistribution spacing_distribution(
    const std::vector<std::vector<double>>& members, int bins = 0) {
    std::vector<double> spacings;
    for (auto seq : members) {
        if (seq.size() < 2) continue;
        std::sort(seq.begin(), seq.end());
        for (std::size_t i = 0; i + 1 < seq.size(); ++i)
            spacings.push_back(seq[i + 1] - seq[i]);
    }
    if (spacings.size() < 2)
        throw precondition_error("spacing_distribution: need at least 2 spacings");
    SpacingDistribution out;
    out.mean_spacing = mean(spacings);
    out.mean_spacing_ok = out.mean_spacing > 0.9 && out.mean_spacing < 1.1;
    out.density = density_histogram(std::span<const double>(spacings), bins);
    return out;
}

namespace detail {

inline void window_counts(const std::vector<double>& sorted, double r,
                          std::vector<double>& counts) {
    const double lo = sorted.front(), hi = sorted.back();
    const double stride = 0.25 * r;
    for (double start = lo; start + r <= hi; start += stride) {
        const auto a = std::lower_bound(sorted.begin(), sorted.end(), start);
        const auto b = std::lower_bound(sorted.begin(), sorted.end(), start + r);
        counts.push_back(static_cast<double>(b - a));
    }
}

}

/**
 * Number variance Sigma^2(r): bias-corrected variance of the point count
 * in sliding windows of length r (stride r/4), pooled over all supplied
 * sequences. Inputs must be unfolded (mean spacing near 1).
 */
inline std::vector<std::pair<double, double>> number_variance(
    const std::vector<std::vector<double>>& members, std::span<const double> r_values) {
    if (members.empty())
        throw precondition_error("number_variance: no sequences supplied");
    std::vector<std::vector<double>> sorted(members);
    double min_range = 0.0;
    bool first = true;
    for (auto& seq : sorted) {
        if (seq.size() < 2)
            throw precondition_error("number_variance: sequence too short");
        std::sort(seq.begin(), seq.end());
        const double range = seq.back() - seq.front();
        min_range = first ? range : std::min(min_range, range);
        first = false;
    }

    std::vector<std::pair<double, double>> out;
    out.reserve(r_values.size());
    for (double r : r_values) {
        if (!(r > 0.0) || r > min_range / 10.0)
            throw precondition_error("number_variance: r must be in (0, range/10], got r=" +
                                     std::to_string(r));
        std::vector<double> counts;
        for (const auto& seq : sorted) detail::window_counts(seq, r, counts);
        if (counts.size() < 2)
            throw precondition_error("number_variance: too few windows at r=" +
                                     std::to_string(r));
        out.emplace_back(r, sample_variance(counts));
    }
    return out;
}

inline std::vector<std::pair<double, double>> number_variance(
    std::span<const double> unfolded, std::span<const double> r_values) {
    return number_variance(
        std::vector<std::vector<double>>{{unfolded.begin(), unfolded.end()}}, r_values);
}

}
