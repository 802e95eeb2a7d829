#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "critspectra/errors.hpp"
#include "critspectra/ising.hpp"
#include "critspectra/rng.hpp"

namespace critspectra {

/**
 * Symmetric empirical correlation matrix with unit diagonal.
 *
 * Only the lower triangle is stored (row-major packed); the full dense
 * matrix is materialized on demand. rank_bound records min(D, tau) at
 * construction; rows whose series had zero variance are listed in
 * degenerate_sites (their off-diagonals are 0, diagonal 1).
 */
class CorrelationMatrix {
public:
    CorrelationMatrix(int dim, long tau)
        : dim_(dim), tau_(tau),
          tri_(static_cast<std::size_t>(dim) * (dim + 1) / 2, 0.0) {
        if (dim < 1) throw precondition_error("CorrelationMatrix: dim must be >= 1");
        for (int i = 0; i < dim; ++i) tri_[tri_index(i, i)] = 1.0;
    }

    int dim() const { return dim_; }
    long tau() const { return tau_; }
    int rank_bound() const {
        return static_cast<int>(std::min<long>(dim_, tau_));
    }

    double operator()(int i, int j) const {
        return i >= j ? tri_[tri_index(i, j)] : tri_[tri_index(j, i)];
    }

    /// Mutable access to the packed lower-triangle entry (i >= j).
    double& lower(int i, int j) { return tri_[tri_index(i, j)]; }

    const std::vector<double>& packed() const { return tri_; }
    std::vector<double>& packed() { return tri_; }

    const std::vector<int>& degenerate_sites() const { return degenerate_; }
    std::vector<int>& degenerate_sites() { return degenerate_; }

    Eigen::MatrixXd dense() const {
        Eigen::MatrixXd m(dim_, dim_);
        for (int i = 0; i < dim_; ++i) {
            for (int j = 0; j <= i; ++j) {
                const double v = tri_[tri_index(i, j)];
                m(i, j) = v;
                m(j, i) = v;
            }
        }
        return m;
    }

    static std::size_t tri_index(int i, int j) {
        return static_cast<std::size_t>(i) * (i + 1) / 2 + j;
    }

private:
    int dim_;
    long tau_;
    std::vector<double> tri_;
    std::vector<int> degenerate_;
};

namespace detail {

/// Row-block parallel loop; blocks write disjoint output so the result is
/// independent of the partitioning.
inline void parallel_rows(int rows, unsigned jobs, const std::function<void(int, int)>& body) {
    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min<unsigned>(jobs, static_cast<unsigned>(rows));
    if (jobs <= 1) {
        body(0, rows);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    const int chunk = (rows + static_cast<int>(jobs) - 1) / static_cast<int>(jobs);
    for (unsigned t = 0; t < jobs; ++t) {
        const int lo = static_cast<int>(t) * chunk;
        const int hi = std::min(rows, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back(body, lo, hi);
    }
    for (auto& th : pool) th.join();
}

}

/**
 * Pearson correlation of +-1 spin series, exact in integer arithmetic.
 *
 * Each row is packed into 64-bit words (bit = spin up); the product sum
 * S_mn = tau - 2 popcount(row_m XOR row_n), and for spins the variance is
 * 1 - mu^2, so
 *
 *   C_mn = (S_mn/tau - mu_m mu_n) / sqrt((1 - mu_m^2)(1 - mu_n^2)).
 *
 * Means and standard deviations use the population convention
 * (divisor tau). Identical estimator as the double-precision path.
 */
inline CorrelationMatrix build_correlation(const TimeSeriesMatrix& ts, unsigned jobs = 0) {
    if (ts.tau < 2) throw precondition_error("build_correlation: need tau >= 2 samples");
    const int n = ts.n_series;
    const long tau = ts.tau;
    const long words = (tau + 63) / 64;

    std::vector<std::uint64_t> bits(static_cast<std::size_t>(n) * words, 0);
    std::vector<long> ones(n, 0);
    for (int m = 0; m < n; ++m) {
        std::uint64_t* row = &bits[static_cast<std::size_t>(m) * words];
        const std::int8_t* src = &ts.data[static_cast<std::size_t>(m) * tau];
        long count = 0;
        for (long t = 0; t < tau; ++t) {
            if (src[t] > 0) {
                row[t >> 6] |= 1ULL << (t & 63);
                ++count;
            }
        }
        ones[m] = count;
    }

    std::vector<double> mu(n), inv_sigma(n);
    CorrelationMatrix corr(n, tau);
    for (int m = 0; m < n; ++m) {
        mu[m] = static_cast<double>(2 * ones[m] - tau) / static_cast<double>(tau);
        const double var = 1.0 - mu[m] * mu[m];
        if (ones[m] == 0 || ones[m] == tau) {
            corr.degenerate_sites().push_back(m);
            inv_sigma[m] = 0.0;  // forces zero off-diagonals
        } else {
            inv_sigma[m] = 1.0 / std::sqrt(var);
        }
    }

    detail::parallel_rows(n, jobs, [&](int lo, int hi) {
        for (int i = lo; i < hi; ++i) {
            const std::uint64_t* ri = &bits[static_cast<std::size_t>(i) * words];
            for (int j = 0; j < i; ++j) {
                const std::uint64_t* rj = &bits[static_cast<std::size_t>(j) * words];
                long diff = 0;
                for (long w = 0; w < words; ++w)
                    diff += std::popcount(ri[w] ^ rj[w]);
                const double s = static_cast<double>(tau - 2 * diff) /
                                 static_cast<double>(tau);
                corr.lower(i, j) = (s - mu[i] * mu[j]) * inv_sigma[i] * inv_sigma[j];
            }
        }
    });
    return corr;
}

/**
 * Pearson correlation of real-valued series (one row per series),
 * population convention. Same estimator as the spin path; used for the
 * random-matrix null models.
 */
inline CorrelationMatrix build_correlation(const Eigen::MatrixXd& rows) {
    const int n = static_cast<int>(rows.rows());
    const long tau = static_cast<long>(rows.cols());
    if (tau < 2) throw precondition_error("build_correlation: need tau >= 2 samples");

    Eigen::MatrixXd z = rows;
    std::vector<int> degenerate;
    for (int m = 0; m < n; ++m) {
        const double mean = z.row(m).mean();
        z.row(m).array() -= mean;
        const double var = z.row(m).squaredNorm() / static_cast<double>(tau);
        if (var == 0.0) {
            degenerate.push_back(m);
        } else {
            z.row(m) /= std::sqrt(var * static_cast<double>(tau));
        }
    }

    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(z);

    CorrelationMatrix corr(n, tau);
    corr.degenerate_sites() = degenerate;
    std::vector<bool> is_degenerate(n, false);
    for (int m : degenerate) is_degenerate[m] = true;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j)
            corr.lower(i, j) =
                (is_degenerate[i] || is_degenerate[j]) ? 0.0 : gram(i, j);
    return corr;
}

/// Random subsample of sites: fraction of N, or an explicit count.
struct SubsampleSpec {
    double fraction = 0.0;   // used when count == 0
    int count = 0;
    std::uint64_t seed = 0;

    int resolve_count(int n) const {
        const int k = count > 0
            ? count
            : static_cast<int>(std::lround(fraction * static_cast<double>(n)));
        if (k < 1 || k > n)
            throw precondition_error("SubsampleSpec: need 1 <= k <= N, got k=" +
                                     std::to_string(k));
        return k;
    }
};

/**
 * k rows chosen uniformly without replacement, deterministic given the
 * seed. Selected rows keep their original relative order (ascending site
 * index); the spatial arrangement is deliberately not used beyond the
 * retained site_indices audit trail.
 */
inline TimeSeriesMatrix subsample_sites(const TimeSeriesMatrix& ts, const SubsampleSpec& spec) {
    const int n = ts.n_series;
    const int k = spec.resolve_count(n);

    // Partial Fisher-Yates, then sort the chosen indices.
    std::vector<std::uint32_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0u);
    Rng rng(spec.seed);
    for (int i = 0; i < k; ++i) {
        const auto j = i + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(n - i)));
        std::swap(idx[i], idx[j]);
    }
    std::vector<std::uint32_t> chosen(idx.begin(), idx.begin() + k);
    std::sort(chosen.begin(), chosen.end());

    TimeSeriesMatrix out;
    out.n_series = k;
    out.tau = ts.tau;
    out.lattice_side = ts.lattice_side;
    out.seed = ts.seed;
    out.data.resize(static_cast<std::size_t>(k) * ts.tau);
    out.site_indices.resize(k);
    for (int r = 0; r < k; ++r) {
        const std::uint32_t src = chosen[r];
        out.site_indices[r] = ts.site_indices[src];
        std::copy_n(ts.data.begin() + static_cast<std::size_t>(src) * ts.tau, ts.tau,
                    out.data.begin() + static_cast<std::size_t>(r) * ts.tau);
    }
    return out;
}

/// Exponent of the entrywise power map.
struct PowerMapParams {
    double q = 1.0;
};

/**
 * Entrywise power map C_mn -> sgn(C_mn) |C_mn|^q. Symmetry and the unit
 * diagonal are preserved; zeros stay zero. Positive semidefiniteness is
 * not preserved for q != 1 -- lifting the exact zeros of a singular
 * matrix is the point of the map.
 */
inline CorrelationMatrix power_map(const CorrelationMatrix& c, const PowerMapParams& params) {
    if (!(params.q > 0.0))
        throw precondition_error("power_map: q must be > 0");
    CorrelationMatrix out = c;
    if (params.q == 1.0) return out;  // exact identity
    for (double& v : out.packed()) {
        if (v > 0.0)      v = std::pow(v, params.q);
        else if (v < 0.0) v = -std::pow(-v, params.q);
    }
    return out;
}

/// Principal submatrix on the given (strictly increasing) index set.
inline CorrelationMatrix principal_submatrix(const CorrelationMatrix& c,
                                             const std::vector<int>& indices) {
    CorrelationMatrix out(static_cast<int>(indices.size()), c.tau());
    for (std::size_t i = 0; i < indices.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            out.lower(static_cast<int>(i), static_cast<int>(j)) =
                c(indices[i], indices[j]);
    return out;
}

}
