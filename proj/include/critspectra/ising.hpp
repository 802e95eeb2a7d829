#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "critspectra/errors.hpp"
#include "critspectra/rng.hpp"

namespace critspectra {

/**
 * 2-D Ising model on a periodic L x L square lattice with single-spin
 * Metropolis dynamics.
 *
 * Hamiltonian: H = -J sum_<ij> s_i s_j, spins s_i in {-1, +1}.
 *
 * The temperature is carried as the dimensionless ratio beta2J = 2J/T
 * (the axis used throughout the toolkit); beta2J = 0 means infinite
 * temperature, i.e. every proposed flip is accepted.
 *
 * One time step = flips_per_step attempted single-spin flips
 * (default 10 L^2).
 */
struct SimConfig {
    int L = 0;                       // lattice side length
    double J = 1.0;                  // coupling strength
    double beta2J = 0.0;             // 2J/T
    std::uint64_t seed = 0;
    long equilibration_steps = 10'000;   // discarded time steps
    long tau = 0;                    // recorded time steps
    long flips_per_step = 0;         // 0 -> default 10 L^2

    long resolved_flips_per_step() const {
        return flips_per_step > 0 ? flips_per_step
                                  : 10L * static_cast<long>(L) * static_cast<long>(L);
    }

    void validate() const {
        if (L < 2) throw precondition_error("SimConfig: L must be >= 2");
        if (!(J > 0.0)) throw precondition_error("SimConfig: J must be > 0");
        if (beta2J < 0.0) throw precondition_error("SimConfig: beta2J must be >= 0");
        if (tau < 1) throw precondition_error("SimConfig: tau must be >= 1");
        if (equilibration_steps < 0)
            throw precondition_error("SimConfig: equilibrationSteps must be >= 0");
        if (resolved_flips_per_step() < 1)
            throw precondition_error("SimConfig: flipsPerStep must be >= 1");
    }
};

/// Onsager critical temperature T_c = 2J / ln(1 + sqrt(2)).
inline double critical_temperature(double J) {
    if (!(J > 0.0)) throw precondition_error("critical_temperature: J must be > 0");
    return 2.0 * J / std::log(1.0 + std::sqrt(2.0));
}

/// beta2J value at criticality: 2J/T_c = ln(1 + sqrt(2)), independent of J.
inline double critical_beta2J() { return std::log(1.0 + std::sqrt(2.0)); }

/**
 * Metropolis acceptance for an energy change dU at temperature 2J/beta2J,
 * expressed through m = dU/(2J): accept if m <= 0, else with probability
 * exp(-m * beta2J). Shared by the lattice dynamics and the toy-chain
 * balance tests.
 */
inline bool metropolis_accept_m(int m, double beta2J, Rng& rng) {
    if (m <= 0) return true;
    // beta2J = 0 gives threshold exp(0) = 1, so every draw accepts
    // (infinite temperature); the draw is still consumed so that batched
    // and single-flip paths stay stream-compatible.
    return rng.uniform01() < std::exp(static_cast<double>(m) * -beta2J);
}

/**
 * Spin state of one replica: spins, side length and the RNG driving its
 * trajectory. Sites are indexed row-major, site = row * L + col.
 */
class SpinLattice {
public:
    SpinLattice(int L, std::uint64_t seed) : L_(check_side(L)), n_(L * L), rng_(seed) {
        spins_.resize(n_);
        for (auto& s : spins_) s = rng_.next() & 1 ? int8_t{1} : int8_t{-1};
        build_neighbor_table();
    }

    SpinLattice(int L, std::vector<std::int8_t> spins, std::uint64_t seed)
        : L_(check_side(L)), n_(L * L), spins_(std::move(spins)), rng_(seed) {
        if (spins_.size() != static_cast<std::size_t>(n_))
            throw precondition_error("SpinLattice: spin array size mismatch");
        for (auto s : spins_)
            if (s != 1 && s != -1)
                throw precondition_error("SpinLattice: spins must be +1 or -1");
        build_neighbor_table();
    }

    int side() const { return L_; }
    int site_count() const { return n_; }
    const std::vector<std::int8_t>& spins() const { return spins_; }
    std::int8_t spin(int site) const { return spins_[site]; }

    void flip_spin(int site) { spins_[site] = -spins_[site]; }

    /// Sum of the 4 neighboring spins of `site`.
    int neighbor_sum(int site) const {
        const std::uint32_t* nb = &neighbors_[4 * site];
        return spins_[nb[0]] + spins_[nb[1]] + spins_[nb[2]] + spins_[nb[3]];
    }

    /// Energy change, in units of 2J, that flipping `site` would cause:
    /// m = s_site * (sum of 4 neighbors); dU = 2J m.
    int flip_cost_m(int site) const { return spins_[site] * neighbor_sum(site); }

    /**
     * One Metropolis proposal at `site`: accept if the energy is lowered,
     * else with probability exp(-dU / T). Mutates the lattice on
     * acceptance; returns whether the flip was accepted.
     */
    bool metropolis_flip(int site, double beta2J) {
        const bool accepted = metropolis_accept_m(flip_cost_m(site), beta2J, rng_);
        if (accepted) spins_[site] = -spins_[site];
        return accepted;
    }

    /// `flips` random single-spin Metropolis proposals.
    void run_flips(long flips, double beta2J) {
        // Acceptance thresholds only depend on m in {2, 4}; computed with
        // the same expression as metropolis_accept_m so both paths agree
        // bitwise.
        const double e2 = std::exp(2.0 * -beta2J);
        const double e4 = std::exp(4.0 * -beta2J);
        for (long k = 0; k < flips; ++k) {
            const int site = static_cast<int>(rng_.bounded(n_));
            const int m = spins_[site] * neighbor_sum(site);
            if (m <= 0) {
                spins_[site] = -spins_[site];
            } else {
                const double u = rng_.uniform01();
                if (u < (m == 2 ? e2 : e4)) spins_[site] = -spins_[site];
            }
        }
    }

    Rng& rng() { return rng_; }

private:
    static int check_side(int L) {
        if (L < 2) throw precondition_error("SpinLattice: L must be >= 2");
        if (L > 16384) throw capacity_error("SpinLattice: L too large");
        return L;
    }

    void build_neighbor_table() {
        neighbors_.resize(4 * static_cast<std::size_t>(n_));
        for (int r = 0; r < L_; ++r) {
            const int up = (r + L_ - 1) % L_, down = (r + 1) % L_;
            for (int c = 0; c < L_; ++c) {
                const int left = (c + L_ - 1) % L_, right = (c + 1) % L_;
                std::uint32_t* nb = &neighbors_[4 * static_cast<std::size_t>(r * L_ + c)];
                nb[0] = static_cast<std::uint32_t>(up * L_ + c);
                nb[1] = static_cast<std::uint32_t>(down * L_ + c);
                nb[2] = static_cast<std::uint32_t>(r * L_ + left);
                nb[3] = static_cast<std::uint32_t>(r * L_ + right);
            }
        }
    }

    int L_;
    int n_;
    std::vector<std::int8_t> spins_;
    std::vector<std::uint32_t> neighbors_;
    Rng rng_;
};

/// Integer bond sum sum_<ij> s_i s_j (energy in units of -J).
inline long total_bond_sum(const SpinLattice& lattice) {
    const int L = lattice.side();
    const auto& s = lattice.spins();
    long sum = 0;
    for (int r = 0; r < L; ++r) {
        const int down = (r + 1) % L;
        for (int c = 0; c < L; ++c) {
            const int right = (c + 1) % L;
            sum += s[r * L + c] * (s[down * L + c] + s[r * L + right]);
        }
    }
    return sum;
}

/// Total energy H = -J sum over the 2 L^2 torus bonds.
inline double total_energy(const SpinLattice& lattice, double J) {
    if (!(J > 0.0)) throw precondition_error("total_energy: J must be > 0");
    return -J * static_cast<double>(total_bond_sum(lattice));
}

/**
 * Recorded per-site spin trajectories: N rows (sites) by tau columns
 * (time steps), row-major. site_indices maps each row back to its
 * lattice site.
 */
struct TimeSeriesMatrix {
    int n_series = 0;                 // N
    long tau = 0;
    int lattice_side = 0;             // L of the generating lattice (0 if n/a)
    std::uint64_t seed = 0;           // generating seed, for audit
    std::vector<std::int8_t> data;    // n_series * tau, row-major
    std::vector<std::uint32_t> site_indices;

    std::int8_t at(int series, long t) const { return data[series * tau + t]; }

    /// Mean of all recorded values (global magnetization estimate).
    double mean_value() const {
        long sum = 0;
        for (auto v : data) sum += v;
        return static_cast<double>(sum) / static_cast<double>(data.size());
    }

    /// View with only the first `tau_window` recorded steps retained.
    TimeSeriesMatrix truncated(long tau_window) const {
        if (tau_window < 1 || tau_window > tau)
            throw precondition_error("truncated: tau window out of range");
        TimeSeriesMatrix out;
        out.n_series = n_series;
        out.tau = tau_window;
        out.lattice_side = lattice_side;
        out.seed = seed;
        out.site_indices = site_indices;
        out.data.resize(static_cast<std::size_t>(n_series) * tau_window);
        for (int m = 0; m < n_series; ++m)
            std::copy_n(data.begin() + static_cast<std::size_t>(m) * tau,
                        tau_window,
                        out.data.begin() + static_cast<std::size_t>(m) * tau_window);
        return out;
    }
};

// Refuse runs whose recording buffer alone would exceed this cap.
inline constexpr std::uint64_t max_recording_bytes = 1ULL << 33;  // 8 GiB

/**
 * Full trajectory recording: starting from a uniformly random
 * configuration drawn from config.seed, run equilibration_steps time
 * steps (discarded), then tau recorded steps, storing the whole lattice
 * after each recorded step as one column. Deterministic given the config.
 */
inline TimeSeriesMatrix simulate(const SimConfig& config) {
    config.validate();
    const std::uint64_t n = static_cast<std::uint64_t>(config.L) *
                            static_cast<std::uint64_t>(config.L);
    const std::uint64_t bytes = n * static_cast<std::uint64_t>(config.tau);
    if (n > std::numeric_limits<int>::max() || bytes > max_recording_bytes)
        throw capacity_error("simulate: recording buffer for L=" +
                             std::to_string(config.L) + ", tau=" +
                             std::to_string(config.tau) + " exceeds capacity");

    SpinLattice lattice(config.L, split_seed(config.seed, "ising"));
    const long flips = config.resolved_flips_per_step();

    for (long step = 0; step < config.equilibration_steps; ++step)
        lattice.run_flips(flips, config.beta2J);

    TimeSeriesMatrix ts;
    ts.n_series = static_cast<int>(n);
    ts.tau = config.tau;
    ts.lattice_side = config.L;
    ts.seed = config.seed;
    ts.data.resize(static_cast<std::size_t>(bytes));
    ts.site_indices.resize(n);
    for (std::uint64_t i = 0; i < n; ++i)
        ts.site_indices[i] = static_cast<std::uint32_t>(i);

    for (long t = 0; t < config.tau; ++t) {
        lattice.run_flips(flips, config.beta2J);
        const auto& s = lattice.spins();
        for (std::uint64_t i = 0; i < n; ++i)
            ts.data[i * config.tau + t] = s[i];
    }
    return ts;
}

/// Mean nearest-neighbor spin product over all bonds and recorded steps.
inline double mean_bond_correlation(const TimeSeriesMatrix& ts) {
    const int L = ts.lattice_side;
    if (L < 2 || ts.n_series != L * L)
        throw precondition_error("mean_bond_correlation: needs a full-lattice recording");
    long sum = 0;
    for (long t = 0; t < ts.tau; ++t) {
        for (int r = 0; r < L; ++r) {
            const int down = (r + 1) % L;
            for (int c = 0; c < L; ++c) {
                const int right = (c + 1) % L;
                const int s = ts.at(r * L + c, t);
                sum += s * (ts.at(down * L + c, t) + ts.at(r * L + right, t));
            }
        }
    }
    return static_cast<double>(sum) /
           (2.0 * static_cast<double>(L) * L * static_cast<double>(ts.tau));
}

}
