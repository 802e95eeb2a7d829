#pragma once

#include <atomic>
#include <cmath>
#include <string>
#include <thread>
#include <vector>

#include "critspectra/errors.hpp"
#include "critspectra/fit.hpp"
#include "critspectra/ising.hpp"
#include "critspectra/spectra.hpp"

namespace critspectra {

/// Everything of a SimConfig except the lattice size, plus the rules that
/// scale with it: tau = tauOverN * L^2 and the fit window divisors.
struct StudyTemplate {
    double J = 1.0;
    double beta2J = 0.0;
    std::uint64_t seed = 0;
    long equilibration_steps = 10'000;
    double tau_over_n = 5.0;
    int window_min_div = 400;
    int window_max_div = 40;

    SimConfig config_for(int L, int run) const {
        SimConfig c;
        c.L = L;
        c.J = J;
        c.beta2J = beta2J;
        c.equilibration_steps = equilibration_steps;
        c.tau = std::lround(tau_over_n * static_cast<double>(L) * L);
        c.seed = split_seed(seed, "study:L=" + std::to_string(L) +
                                      ":run=" + std::to_string(run));
        return c;
    }

    FitWindow window_for(long n) const {
        const int lo = static_cast<int>(std::lround(
            static_cast<double>(n) / static_cast<double>(window_min_div)));
        const int hi = static_cast<int>(std::lround(
            static_cast<double>(n) / static_cast<double>(window_max_div)));
        return {std::max(2, lo), std::max(2, hi)};
    }
};

/// One simulate -> correlate -> decompose -> fit pass.
inline PowerLawFit zipf_fit_for_config(const SimConfig& config, const FitWindow& window) {
    const TimeSeriesMatrix ts = simulate(config);
    const Spectrum s = correlation_spectrum(ts);
    return fit_power_law(s, window);
}

struct StudyRun {
    int L = 0;
    int run = 0;
    std::uint64_t seed = 0;
    PowerLawFit fit;
};

struct SizeStudyPoint {
    int L = 0;
    double zeta = 0.0;     // mean over runs
    double stderr_ = 0.0;  // standard error over runs (0 for a single run)
    std::vector<StudyRun> runs;
};

/**
 * Exponent-versus-lattice-size study: for each size, runsPerSize full
 * pipeline passes with independent derived seeds; the fit window scales
 * with N = L^2. Runs fan out over a bounded worker pool; aggregation is
 * deterministic given the seed list. Pipeline errors are annotated with
 * the (L, seed) that produced them.
 */
inline std::vector<SizeStudyPoint> exponent_vs_size(const std::vector<int>& sizes,
                                                    int runs_per_size,
                                                    const StudyTemplate& tmpl,
                                                    unsigned jobs = 0) {
    if (sizes.size() < 2)
        throw precondition_error("exponent_vs_size: need at least 2 sizes");
    if (runs_per_size < 1)
        throw precondition_error("exponent_vs_size: runsPerSize must be >= 1");

    struct Task {
        int L;
        int run;
    };
    std::vector<Task> tasks;
    for (int L : sizes)
        for (int r = 0; r < runs_per_size; ++r) tasks.push_back({L, r});

    std::vector<StudyRun> results(tasks.size());
    std::vector<std::string> failures(tasks.size());
    std::atomic<std::size_t> cursor{0};

    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min<unsigned>(jobs, static_cast<unsigned>(tasks.size()));
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= tasks.size()) return;
            const SimConfig config = tmpl.config_for(tasks[i].L, tasks[i].run);
            StudyRun out{tasks[i].L, tasks[i].run, config.seed, {}};
            try {
                out.fit = zipf_fit_for_config(
                    config, tmpl.window_for(static_cast<long>(config.L) * config.L));
            } catch (const std::exception& e) {
                failures[i] = "study run L=" + std::to_string(tasks[i].L) +
                              " seed=" + std::to_string(config.seed) + ": " + e.what();
            }
            results[i] = out;
        }
    };
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (const auto& f : failures)
        if (!f.empty()) throw numeric_error(f);

    std::vector<SizeStudyPoint> points;
    for (int L : sizes) {
        SizeStudyPoint p;
        p.L = L;
        std::vector<double> zetas;
        for (std::size_t i = 0; i < tasks.size(); ++i) {
            if (tasks[i].L != L) continue;
            p.runs.push_back(results[i]);
            zetas.push_back(results[i].fit.zeta);
        }
        p.zeta = mean(zetas);
        p.stderr_ = zetas.size() > 1
            ? std::sqrt(sample_variance(zetas) / static_cast<double>(zetas.size()))
            : 0.0;
        points.push_back(std::move(p));
    }
    return points;
}

}
