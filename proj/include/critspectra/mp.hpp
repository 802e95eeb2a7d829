#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "critspectra/errors.hpp"
#include "critspectra/numerics.hpp"

namespace critspectra {

inline constexpr double pi_const = 3.14159265358979323846;

/**
 * Marchenko-Pastur parameters: kappa = D/tau (matrix dimension over
 * series length) and the variance scale (1 for correlation matrices).
 */
struct MPParams {
    double kappa = 0.0;
    double scale = 1.0;

    void validate() const {
        if (!(kappa > 0.0)) throw precondition_error("MPParams: kappa must be > 0");
        if (!(scale > 0.0)) throw precondition_error("MPParams: scale must be > 0");
    }
    double lambda_minus() const { return scale * (1.0 - std::sqrt(kappa)) * (1.0 - std::sqrt(kappa)); }
    double lambda_plus()  const { return scale * (1.0 + std::sqrt(kappa)) * (1.0 + std::sqrt(kappa)); }
    /// Weight of the delta at zero (rank deficiency), nonzero for kappa > 1.
    double point_mass_at_zero() const { return kappa > 1.0 ? 1.0 - 1.0 / kappa : 0.0; }
};

/**
 * Continuous part of the Marchenko-Pastur density,
 *   rho(x) = sqrt((l+ - x)(x - l-)) / (2 pi kappa x scale),
 * zero outside [l-, l+]. For kappa > 1 the point mass at zero is carried
 * separately by MPParams::point_mass_at_zero().
 */
inline double mp_density(double lambda, const MPParams& p) {
    p.validate();
    const double lo = p.lambda_minus(), hi = p.lambda_plus();
    if (lambda <= lo || lambda >= hi) return 0.0;
    return std::sqrt((hi - lambda) * (lambda - lo)) /
           (2.0 * pi_const * p.kappa * lambda * p.scale);
}

/**
 * CDF of the MP law (point mass at zero included), computed by adaptive
 * quadrature after the substitution x = c + h sin(t), which removes the
 * square-root edge singularities.
 */
inline double mp_cdf(double lambda, const MPParams& p, double abs_tol = 1e-10) {
    p.validate();
    const double lo = p.lambda_minus(), hi = p.lambda_plus();
    const double mass0 = lambda >= 0.0 ? p.point_mass_at_zero() : 0.0;
    if (lambda <= lo) return mass0;
    if (lambda >= hi) return mass0 + (p.kappa > 1.0 ? 1.0 / p.kappa : 1.0);
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    const double t1 = std::asin(std::clamp((lambda - c) / h, -1.0, 1.0));
    const double continuous = integrate(
        [&](double t) {
            const double x = c + h * std::sin(t);
            const double w = h * std::cos(t);
            return w * w / (2.0 * pi_const * p.kappa * x * p.scale);
        },
        -0.5 * pi_const, t1, abs_tol);
    return mass0 + continuous;
}

/// Expected index n(lambda) = N * integral of the MP law up to lambda.
inline double mp_counting(double lambda, const MPParams& p, int n, double abs_tol = 1e-8) {
    if (n < 1) throw precondition_error("mp_counting: N must be >= 1");
    return static_cast<double>(n) * mp_cdf(lambda, p, abs_tol / static_cast<double>(n));
}

/// Inverse of mp_cdf on the continuous support (bisection).
inline double mp_quantile(double prob, const MPParams& p) {
    p.validate();
    if (!(prob >= 0.0 && prob <= 1.0))
        throw precondition_error("mp_quantile: probability out of [0,1]");
    double lo = p.lambda_minus(), hi = p.lambda_plus();
    for (int it = 0; it < 200 && hi - lo > 1e-12 * (1.0 + hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (mp_cdf(mid, p) < prob ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/**
 * Wigner surmise for the orthogonal class,
 *   P(S) = (pi/2) S exp(-pi S^2 / 4),
 * the RMT reference for nearest-neighbor spacings of real symmetric
 * correlation matrices.
 */
inline double wigner_surmise(double s) {
    if (s < 0.0) throw precondition_error("wigner_surmise: spacing must be >= 0");
    return 0.5 * pi_const * s * std::exp(-0.25 * pi_const * s * s);
}

/// Closed-form CDF of the Wigner surmise: 1 - exp(-pi S^2 / 4).
inline double wigner_surmise_cdf(double s) {
    if (s < 0.0) throw precondition_error("wigner_surmise_cdf: spacing must be >= 0");
    return 1.0 - std::exp(-0.25 * pi_const * s * s);
}

}
