#pragma once

#include <cmath>
#include <complex>
#include <cstdlib>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "critspectra/errors.hpp"
#include "critspectra/fft.hpp"
#include "critspectra/fit.hpp"
#include "critspectra/spectra.hpp"

namespace critspectra {

namespace detail {

/// Borwein's Chebyshev acceleration for alternating series
/// sum_{k>=0} (-1)^k a(k); error decays like (3 + sqrt(8))^-n.
inline double alternating_series(const std::function<double(int)>& a, int n = 36) {
    std::vector<double> d(static_cast<std::size_t>(n) + 1);
    double term = 1.0 / n;
    double acc = term;
    d[0] = n * acc;
    for (int i = 1; i <= n; ++i) {
        term *= 4.0 * (n + i - 1) * (n - i + 1) / ((2.0 * i - 1) * (2.0 * i));
        acc += term;
        d[static_cast<std::size_t>(i)] = n * acc;
    }
    double s = 0.0;
    for (int k = 0; k < n; ++k)
        s += (k % 2 ? -1.0 : 1.0) * (d[static_cast<std::size_t>(k)] - d[static_cast<std::size_t>(n)]) * a(k);
    return -s / d[static_cast<std::size_t>(n)];
}

}

/// Riemann zeta on (0, 1) by eta-function acceleration.
inline double riemann_zeta_01(double s) {
    if (!(s > 0.0 && s < 1.0))
        throw precondition_error("riemann_zeta_01: s must lie in (0, 1)");
    const double eta = detail::alternating_series(
        [s](int k) { return std::pow(static_cast<double>(k + 1), -s); });
    return eta / (1.0 - std::pow(2.0, 1.0 - s));
}

/// Dirichlet beta function for s > 0.
inline double dirichlet_beta(double s) {
    if (!(s > 0.0)) throw precondition_error("dirichlet_beta: s must be > 0");
    return detail::alternating_series(
        [s](int k) { return std::pow(2.0 * k + 1.0, -s); });
}

/**
 * Analytic continuation of the lattice sum sum_{r != 0} dist(r)^-theta over
 * Z^d. This is the constant term in the small-momentum expansion of the
 * circulant eigenvalues; it is negative for 0 < theta < d.
 *
 *   d = 1: 2 zeta(theta)
 *   d = 2: 4 zeta(theta/2) beta(theta/2)   (sum-of-two-squares factorization)
 */
inline double lattice_zeta_constant(int d, double theta) {
    if (d == 1) return 2.0 * riemann_zeta_01(theta);
    if (d == 2) return 4.0 * riemann_zeta_01(0.5 * theta) * dirichlet_beta(0.5 * theta);
    throw precondition_error("lattice_zeta_constant: d must be 1 or 2");
}

/**
 * Circulant correlation model on the d-dimensional torus Z_L^d: entries
 * depend only on the separation vector, decaying as a power law
 *
 *   f(r) = c / dist(r)^theta   for r != 0,   f(0) = f0,
 *
 * with dist the minimal-image Euclidean distance. Its eigenvalues are the
 * d-dimensional DFT of f, the analytic route to the Zipf exponent
 * zeta = (d - theta)/d.
 *
 * When no prefactor is given it is calibrated to c = -f0 / C_d(theta),
 * which cancels the constant lattice term C_d in the eigenvalue expansion
 * lambda(k) = A |k|^-(d-theta) + f0 + c C_d. Without the calibration that
 * constant contaminates the log-log slope at any desk-scale L; with it the
 * pure power law is exposed already at L of a few dozen.
 */
struct CirculantSpec {
    int d = 2;                 // 1 or 2
    int L = 0;                 // side length
    double theta = 0.0;        // decay exponent, > 0
    std::optional<double> c{}; // prefactor; empty = calibrated automatically
    double f0 = 1.0;           // value at zero separation

    void validate() const {
        if (d != 1 && d != 2)
            throw precondition_error("CirculantSpec: d must be 1 or 2");
        if (L < 4) throw precondition_error("CirculantSpec: L must be >= 4");
        if (!(theta > 0.0))
            throw precondition_error("CirculantSpec: theta must be > 0");
    }

    long size() const { return d == 1 ? L : static_cast<long>(L) * L; }

    double resolved_prefactor() const {
        if (c) return *c;
        if (theta < static_cast<double>(d) && f0 > 0.0)
            return -f0 / lattice_zeta_constant(d, theta);
        return 1.0;
    }

    /// Minimal-image separation profile, flattened row-major for d = 2.
    std::vector<double> profile() const {
        validate();
        const double pref = resolved_prefactor();
        std::vector<double> f(static_cast<std::size_t>(size()));
        auto min_image = [this](int n) { return std::min(n, L - n); };
        if (d == 1) {
            for (int n = 0; n < L; ++n) {
                const int m = min_image(n);
                f[n] = m == 0 ? f0 : pref / std::pow(static_cast<double>(m), theta);
            }
        } else {
            for (int n1 = 0; n1 < L; ++n1) {
                const int m1 = min_image(n1);
                for (int n2 = 0; n2 < L; ++n2) {
                    const int m2 = min_image(n2);
                    const double dist2 = static_cast<double>(m1) * m1 +
                                         static_cast<double>(m2) * m2;
                    f[static_cast<std::size_t>(n1) * L + n2] =
                        dist2 == 0.0 ? f0 : pref / std::pow(std::sqrt(dist2), theta);
                }
            }
        }
        return f;
    }
};

/// Theoretical Zipf exponent zeta = (d - theta)/d, valid for 0 < theta < d.
inline double theoretical_zeta(int d, double theta) {
    if (d < 1) throw precondition_error("theoretical_zeta: d must be >= 1");
    if (!(theta > 0.0))
        throw precondition_error("theoretical_zeta: theta must be > 0");
    if (theta >= static_cast<double>(d))
        throw precondition_error("theoretical_zeta: theta must be < d "
                                 "(outside the power-law regime)");
    return (static_cast<double>(d) - theta) / static_cast<double>(d);
}

/**
 * Default slope-extraction window for circulant spectra. d = 2 uses the
 * proportional [N/400, N/40] rule. In d = 1 each momentum magnitude fills
 * two ranks, so the rank label tracks ln|k| only for j well above 1; the
 * window starts at N/32 instead.
 */
inline FitWindow oracle_fit_window(int d, long n) {
    if (d == 1)
        return {static_cast<int>(std::max<long>(2, n / 32)),
                static_cast<int>(std::max<long>(8, n / 8))};
    return default_fit_window(n);
}

/**
 * Eigenvalues of the circulant model: the d-dimensional DFT of the
 * separation profile, real by even symmetry (asserted within 1e-10),
 * returned sorted decreasing.
 */
inline Spectrum circulant_eigenvalues(const CirculantSpec& spec) {
    spec.validate();
    const std::vector<double> f = spec.profile();
    const long n = spec.size();
    std::vector<std::complex<double>> a(f.begin(), f.end());

    if (spec.d == 1) {
        dft_inplace(a);
    } else {
        const int L = spec.L;
        std::vector<std::complex<double>> line(static_cast<std::size_t>(L));
        for (int r = 0; r < L; ++r) {          // transform rows
            for (int k = 0; k < L; ++k) line[k] = a[static_cast<std::size_t>(r) * L + k];
            dft_inplace(line);
            for (int k = 0; k < L; ++k) a[static_cast<std::size_t>(r) * L + k] = line[k];
        }
        for (int col = 0; col < L; ++col) {    // transform columns
            for (int k = 0; k < L; ++k) line[k] = a[static_cast<std::size_t>(k) * L + col];
            dft_inplace(line);
            for (int k = 0; k < L; ++k) a[static_cast<std::size_t>(k) * L + col] = line[k];
        }
    }

    std::vector<double> values(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
        if (std::abs(a[i].imag()) > 1e-10)
            throw numeric_error("circulant_eigenvalues: eigenvalue has imaginary part " +
                                std::to_string(a[i].imag()) +
                                " (profile not even?)");
        values[i] = a[i].real();
    }
    Spectrum s = make_spectrum(std::move(values), static_cast<int>(n));
    return s;
}

/// Dense materialization of the circulant matrix; test oracle for the
/// FFT route.
inline Eigen::MatrixXd circulant_dense(const CirculantSpec& spec) {
    spec.validate();
    const std::vector<double> f = spec.profile();
    const long n = spec.size();
    Eigen::MatrixXd m(n, n);
    if (spec.d == 1) {
        for (long i = 0; i < n; ++i)
            for (long j = 0; j < n; ++j)
                m(i, j) = f[static_cast<std::size_t>(((i - j) % n + n) % n)];
    } else {
        const int L = spec.L;
        for (long i = 0; i < n; ++i) {
            const int i1 = static_cast<int>(i / L), i2 = static_cast<int>(i % L);
            for (long j = 0; j < n; ++j) {
                const int j1 = static_cast<int>(j / L), j2 = static_cast<int>(j % L);
                const int d1 = ((i1 - j1) % L + L) % L;
                const int d2 = ((i2 - j2) % L + L) % L;
                m(i, j) = f[static_cast<std::size_t>(d1) * L + d2];
            }
        }
    }
    return m;
}

}
