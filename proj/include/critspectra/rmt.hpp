#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "critspectra/correlation.hpp"
#include "critspectra/errors.hpp"
#include "critspectra/mp.hpp"
#include "critspectra/rng.hpp"
#include "critspectra/spectra.hpp"

namespace critspectra {

/**
 * Null-model correlation matrix: Pearson correlation of D independent
 * standard-normal series of length tau, built with the same estimator as
 * the physics pipeline. Deterministic given the seed.
 */
inline CorrelationMatrix sample_wishart_correlation(int dim, long tau, std::uint64_t seed) {
    if (dim < 1) throw precondition_error("sample_wishart_correlation: D must be >= 1");
    if (tau < 2) throw precondition_error("sample_wishart_correlation: tau must be >= 2");
    Rng rng(seed);
    Eigen::MatrixXd series(dim, tau);
    for (int m = 0; m < dim; ++m)
        for (long t = 0; t < tau; ++t)
            series(m, t) = rng.normal();
    return build_correlation(series);
}

/// Spectrum of a sampled Wishart correlation matrix (dense or Gram route
/// depending on the aspect ratio).
inline Spectrum sample_wishart_spectrum(int dim, long tau, std::uint64_t seed) {
    if (tau < static_cast<long>(dim) / 2 && tau >= 2) {
        // Temporal-route shortcut for strongly rectangular samples.
        Rng rng(seed);
        Eigen::MatrixXd series(dim, tau);
        for (int m = 0; m < dim; ++m)
            for (long t = 0; t < tau; ++t)
                series(m, t) = rng.normal();
        for (int m = 0; m < dim; ++m) {
            const double mu = series.row(m).mean();
            series.row(m).array() -= mu;
            const double var = series.row(m).squaredNorm() / static_cast<double>(tau);
            series.row(m) /= std::sqrt(var * static_cast<double>(tau));
        }
        Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(tau, tau);
        gram.selfadjointView<Eigen::Lower>().rankUpdate(series.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
            gram.selfadjointView<Eigen::Lower>(), Eigen::EigenvaluesOnly);
        if (solver.info() != Eigen::Success)
            throw numeric_error("sample_wishart_spectrum: eigensolver failed");
        std::vector<double> vals(solver.eigenvalues().data(),
                                 solver.eigenvalues().data() + tau);
        vals.resize(static_cast<std::size_t>(dim), 0.0);
        Spectrum s = make_spectrum(std::move(vals), dim, tau);
        return s;
    }
    Spectrum s = spectrum_of(sample_wishart_correlation(dim, tau, seed));
    return s;
}

/// Pooled emerging-spectrum eigenvalues of power-mapped singular Wishart
/// correlation matrices; the split uses the measured rank of each
/// unmapped matrix.
inline std::vector<double> rmt_emerging_values(int dim, long tau, double q,
                                               int replicas, std::uint64_t seed) {
    if (tau >= dim)
        throw precondition_error("rmt_emerging_values: need tau < D for a singular matrix");
    if (replicas < 1)
        throw precondition_error("rmt_emerging_values: need at least 1 replica");
    std::vector<double> pooled;
    pooled.reserve(static_cast<std::size_t>(replicas) * (dim - tau));
    for (int r = 0; r < replicas; ++r) {
        const std::uint64_t child = split_seed(seed, "wishart:" + std::to_string(r));
        const CorrelationMatrix c = sample_wishart_correlation(dim, tau, child);
        const int rank = measured_rank(sample_wishart_spectrum(dim, tau, child));
        const Spectrum mapped = spectrum_of(power_map(c, {q}));
        const SplitSpectrum split = split_emerging(mapped, rank);
        pooled.insert(pooled.end(), split.emerging.values.begin(),
                      split.emerging.values.end());
    }
    return pooled;
}

/**
 * Numerical emerging-spectrum baseline (the RMT reference curves):
 * normalized histogram of the pooled emerging eigenvalues over replicas.
 */
inline DensityEstimate rmt_emerging_baseline(int dim, long tau, double q,
                                             int replicas, std::uint64_t seed,
                                             int bins = 0) {
    const std::vector<double> pooled = rmt_emerging_values(dim, tau, q, replicas, seed);
    return density_histogram(std::span<const double>(pooled), bins);
}

/// Sampled Wishart baseline for the number variance at matched (D, tau):
/// MP-unfolded spectra pooled over replicas.
inline std::vector<std::pair<double, double>> wishart_number_variance_baseline(
    int dim, long tau, int replicas, std::uint64_t seed,
    std::span<const double> r_values) {
    std::vector<std::vector<double>> unfolded;
    unfolded.reserve(replicas);
    const double kappa = static_cast<double>(dim) / static_cast<double>(tau);
    for (int r = 0; r < replicas; ++r) {
        const std::uint64_t child = split_seed(seed, "wishart:" + std::to_string(r));
        unfolded.push_back(unfold_mp(sample_wishart_spectrum(dim, tau, child), kappa));
    }
    return number_variance(unfolded, r_values);
}

}
