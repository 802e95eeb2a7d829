// critspectra -- batch front-end for the criticality spectra toolkit.
//
// Subcommands: simulate, spectrum, rmt-baseline, oracle, study.
// Exit codes: 0 success, 2 config error, 3 precondition error,
// 4 numerical failure.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <critspectra/critspectra.hpp>

namespace cs = critspectra;
namespace fs = std::filesystem;

namespace {

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

unsigned default_jobs() {
    if (const char* env = std::getenv("CRITSPECTRA_JOBS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    return 0;  // auto
}

/// Parses a series-length window: "256", "N/4", "3N/4", or "N".
long parse_tau_window(const std::string& text, long n) {
    const auto npos = text.find('N');
    try {
        if (npos == std::string::npos) {
            std::size_t pos = 0;
            const long v = std::stol(text, &pos);
            if (pos != text.size()) throw std::invalid_argument(text);
            return v;
        }
        long a = 1, b = 1;
        if (npos > 0) {
            std::size_t pos = 0;
            a = std::stol(text.substr(0, npos), &pos);
            if (pos != npos) throw std::invalid_argument(text);
        }
        const std::string rest = text.substr(npos + 1);
        if (!rest.empty()) {
            if (rest[0] != '/') throw std::invalid_argument(text);
            std::size_t pos = 0;
            b = std::stol(rest.substr(1), &pos);
            if (pos != rest.size() - 1 || b < 1) throw std::invalid_argument(text);
        }
        return std::lround(static_cast<double>(a) * static_cast<double>(n) /
                           static_cast<double>(b));
    } catch (const std::exception&) {
        throw cs::config_error("cannot parse tau window '" + text +
                               "' (expected an integer, N, N/k or aN/k)");
    }
}

std::map<std::string, std::string> base_comments(const cs::RunManifest& m) {
    return {{"config_digest", m.config_digest},
            {"seed", std::to_string(m.seed)},
            {"version", m.version}};
}

void finish_manifest(cs::RunManifest& m, const fs::path& out_dir, const Timer& timer) {
    m.wall_clock_seconds = timer.seconds();
    m.config_digest = cs::config_digest(m.config);
    cs::write_manifest(out_dir / "manifest.json", m);
}

fs::path prepare_out_dir(const std::string& out) {
    fs::path dir(out);
    fs::create_directories(dir);
    return dir;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

int cmd_simulate(const std::string& config_path, const std::string& out, bool csv) {
    Timer timer;
    const cs::ConfigFile cfg = cs::ConfigFile::parse_file(config_path);
    const cs::SimConfig sim = cs::resolve_sim_config(cfg);
    const fs::path out_dir = prepare_out_dir(out);

    Timer sim_timer;
    const cs::TimeSeriesMatrix ts = cs::simulate(sim);
    const double sim_seconds = sim_timer.seconds();
    const double steps = static_cast<double>(sim.equilibration_steps + sim.tau);
    std::printf("simulate: L=%d tau=%ld beta2J=%g  %.2f steps/s (%.2e flips/s)\n",
                sim.L, sim.tau, sim.beta2J, steps / sim_seconds,
                steps * static_cast<double>(sim.resolved_flips_per_step()) / sim_seconds);

    cs::RunManifest m;
    m.subcommand = "simulate";
    m.seed = sim.seed;
    m.config = cs::canonical_sim_config(sim);
    m.config_digest = cs::config_digest(m.config);

    const fs::path dump = out_dir / "timeseries.csts";
    cs::io::write_timeseries(dump, ts);
    cs::io::write_metadata_sidecar(dump, base_comments(m));
    m.artifacts.push_back(dump.string());
    if (csv) {
        const fs::path dump_csv = out_dir / "timeseries.csv";
        cs::io::write_timeseries_csv(dump_csv, ts,
                                     "config_digest=" + m.config_digest +
                                         " seed=" + std::to_string(m.seed));
        m.artifacts.push_back(dump_csv.string());
    }
    finish_manifest(m, out_dir, timer);
    return 0;
}

// ---------------------------------------------------------------------------
// spectrum
// ---------------------------------------------------------------------------

struct SpectrumOptions {
    std::string input;
    std::string out;
    std::string observables = "auto";
    std::string tau_window;
    std::string unfold_method = "poly:7";
    double subsample = 0.0;         // <= 1: fraction, > 1: count
    std::uint64_t seed = 0;          // subsample seed
    bool seed_given = false;
    double power_q = 0.0;            // 0 = no power map
    bool mp_overlay = false;
    int bins = 0;
    std::string fit_window;          // "a,b" override
    std::string sigma2_r = "1,2,3,4,5,6,7,8,9,10";
    unsigned jobs = 0;
};

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream ss(text);
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

cs::UnfoldMethod parse_unfold(const std::string& text, double kappa) {
    if (text == "mp") {
        if (!(kappa > 0.0) || kappa >= 1.0)
            throw cs::precondition_error(
                "mp unfolding needs kappa = D/tau in (0,1); use poly for singular spectra");
        return {cs::UnfoldMethod::Kind::mp_analytic, 0, kappa};
    }
    if (text.rfind("poly", 0) == 0) {
        int order = 7;
        if (text.size() > 4) {
            if (text[4] != ':') throw cs::config_error("unknown unfold method '" + text + "'");
            order = std::atoi(text.c_str() + 5);
            if (order < 1) throw cs::config_error("bad polynomial order in '" + text + "'");
        }
        return {cs::UnfoldMethod::Kind::polynomial, order, 0.0};
    }
    throw cs::config_error("unknown unfold method '" + text + "' (expected mp or poly[:k])");
}

int cmd_spectrum(const SpectrumOptions& opt) {
    Timer timer;
    cs::TimeSeriesMatrix ts = cs::io::read_timeseries(opt.input);
    const fs::path out_dir = prepare_out_dir(opt.out);

    std::map<std::string, std::string> resolved;
    resolved["input"] = opt.input;
    resolved["input_seed"] = std::to_string(ts.seed);

    if (!opt.tau_window.empty()) {
        const long w = parse_tau_window(opt.tau_window, ts.n_series);
        if (w < 1 || w > ts.tau)
            throw cs::precondition_error("tau window " + std::to_string(w) +
                                         " outside the recorded range [1, " +
                                         std::to_string(ts.tau) + "]");
        ts = ts.truncated(w);
        resolved["tau_window"] = std::to_string(w);
    }

    std::uint64_t sub_seed = opt.seed_given
        ? opt.seed
        : cs::split_seed(ts.seed, "subsample");
    if (opt.subsample > 0.0) {
        cs::SubsampleSpec spec;
        if (opt.subsample <= 1.0)
            spec.fraction = opt.subsample;
        else
            spec.count = static_cast<int>(std::lround(opt.subsample));
        spec.seed = sub_seed;
        ts = cs::subsample_sites(ts, spec);
        resolved["subsample"] = cs::canonical_number(opt.subsample);
        resolved["subsample_seed"] = std::to_string(sub_seed);
    }

    const int d = ts.n_series;
    const double kappa = static_cast<double>(d) / static_cast<double>(ts.tau);
    resolved["D"] = std::to_string(d);
    resolved["tau"] = std::to_string(ts.tau);

    bool want_emerging = opt.power_q > 0.0;
    std::vector<std::string> wanted;
    if (opt.observables == "auto") {
        wanted = {"zipf", "density", "spacing", "sigma2", "fit"};
        if (want_emerging) wanted.push_back("emerging");
    } else {
        wanted = split_list(opt.observables);
    }
    for (const auto& w : wanted)
        if (w != "zipf" && w != "density" && w != "spacing" && w != "sigma2" &&
            w != "fit" && w != "emerging")
            throw cs::config_error("unknown observable '" + w + "'");
    const auto has = [&](const char* name) {
        return std::find(wanted.begin(), wanted.end(), name) != wanted.end();
    };

    if (has("emerging")) {
        if (!(opt.power_q > 0.0))
            throw cs::precondition_error(
                "emerging spectrum requested without --power-map q");
        if (ts.tau >= d)
            throw cs::precondition_error(
                "emerging spectrum needs a singular matrix: the recorded series "
                "length tau=" + std::to_string(ts.tau) + " must be smaller than the "
                "matrix dimension D=" + std::to_string(d) +
                " (shorten with --tau-window or enlarge the lattice)");
        resolved["power_map_q"] = cs::canonical_number(opt.power_q);
    }

    cs::RunManifest m;
    m.subcommand = "spectrum";
    m.seed = ts.seed;
    m.config = resolved;
    m.config_digest = cs::config_digest(m.config);
    auto comments = base_comments(m);

    const cs::Spectrum spectrum = cs::correlation_spectrum(ts, opt.jobs);
    const int rank = cs::measured_rank(spectrum);

    if (has("zipf")) {
        const cs::ZipfSeries z = cs::zipf_series(spectrum);
        std::vector<std::string> cols = {"n", "lambda"};
        const bool overlay = opt.mp_overlay && kappa < 1.0;
        if (overlay) cols.push_back("mp_lambda");
        const cs::MPParams mp{kappa, 1.0};
        std::vector<std::vector<double>> rows;
        rows.reserve(z.points.size());
        for (const auto& p : z.points) {
            std::vector<double> row = {static_cast<double>(p.rank), p.value};
            if (overlay) {
                // Expected eigenvalue at this rank from the MP counting
                // function, by inversion.
                const double prob =
                    1.0 - (static_cast<double>(p.rank) - 0.5) / static_cast<double>(d);
                row.push_back(cs::mp_quantile(prob, mp));
            }
            rows.push_back(std::move(row));
        }
        auto c = comments;
        c["nonpositive_count"] = std::to_string(z.nonpositive.size());
        if (overlay) c["kappa"] = cs::canonical_number(kappa);
        cs::io::write_csv(out_dir / "zipf.csv", cols, rows, c);
        m.artifacts.push_back((out_dir / "zipf.csv").string());
    }

    if (has("density")) {
        const cs::DensityEstimate est = cs::density_histogram(spectrum, opt.bins);
        std::vector<std::string> cols = {"bin_center", "density"};
        if (opt.mp_overlay) cols.push_back("mp_density");
        std::vector<std::vector<double>> rows;
        const cs::MPParams mp{kappa, 1.0};
        for (std::size_t b = 0; b < est.densities.size(); ++b) {
            const double center = 0.5 * (est.bin_edges[b] + est.bin_edges[b + 1]);
            std::vector<double> row = {center, est.densities[b]};
            if (opt.mp_overlay) row.push_back(cs::mp_density(center, mp));
            rows.push_back(std::move(row));
        }
        auto c = comments;
        if (opt.mp_overlay) {
            c["model"] = "MP";
            c["kappa"] = cs::canonical_number(kappa);
        }
        cs::io::write_csv(out_dir / "density.csv", cols, rows, c);
        m.artifacts.push_back((out_dir / "density.csv").string());
    }

    if (has("spacing") || has("sigma2")) {
        // For singular spectra only the nonzero part is unfolded.
        cs::Spectrum for_unfold = spectrum;
        if (rank < d) {
            for_unfold.values.resize(rank);
            for_unfold.source_dim = rank;
        }
        const cs::UnfoldMethod method = parse_unfold(opt.unfold_method, kappa);
        const std::vector<double> unfolded = cs::unfold(for_unfold, method);

        if (has("spacing")) {
            const cs::SpacingDistribution sp = cs::spacing_distribution(unfolded, opt.bins);
            if (!sp.mean_spacing_ok)
                std::fprintf(stderr,
                             "warning: unfolded mean spacing %.3f outside [0.9, 1.1]; "
                             "spacing statistics may be distorted\n",
                             sp.mean_spacing);
            std::vector<std::vector<double>> rows;
            for (std::size_t b = 0; b < sp.density.densities.size(); ++b)
                rows.push_back({0.5 * (sp.density.bin_edges[b] + sp.density.bin_edges[b + 1]),
                                sp.density.densities[b]});
            auto c = comments;
            c["mean_spacing"] = cs::canonical_number(sp.mean_spacing);
            cs::io::write_csv(out_dir / "spacing.csv", {"S", "P"}, rows, c);
            m.artifacts.push_back((out_dir / "spacing.csv").string());
        }
        if (has("sigma2")) {
            std::vector<double> rs;
            for (const auto& item : split_list(opt.sigma2_r)) rs.push_back(std::stod(item));
            const double range =
                *std::max_element(unfolded.begin(), unfolded.end()) -
                *std::min_element(unfolded.begin(), unfolded.end());
            std::erase_if(rs, [&](double r) { return r > range / 10.0; });
            if (rs.empty())
                throw cs::precondition_error("all requested sigma2 r values exceed range/10");
            const auto nv = cs::number_variance(std::span<const double>(unfolded), rs);
            std::vector<std::vector<double>> rows;
            for (const auto& [r, s2] : nv) rows.push_back({r, s2});
            cs::io::write_csv(out_dir / "sigma2.csv", {"r", "sigma2"}, rows, comments);
            m.artifacts.push_back((out_dir / "sigma2.csv").string());
        }
    }

    if (has("fit")) {
        cs::FitWindow window = cs::default_fit_window(d);
        if (!opt.fit_window.empty()) {
            const auto parts = split_list(opt.fit_window);
            if (parts.size() != 2)
                throw cs::config_error("--fit-window expects nMin,nMax");
            window = {std::atoi(parts[0].c_str()), std::atoi(parts[1].c_str())};
        }
        try {
            const cs::PowerLawFit fit = cs::fit_power_law(spectrum, window);
            auto c = comments;
            cs::io::write_csv(out_dir / "fit.csv",
                              {"zeta", "log_prefactor", "n_min", "n_max", "rmse",
                               "point_count", "excluded_count"},
                              {{fit.zeta, fit.log_prefactor, static_cast<double>(fit.n_min),
                                static_cast<double>(fit.n_max), fit.rmse,
                                static_cast<double>(fit.point_count),
                                static_cast<double>(fit.excluded_count)}},
                              c);
            m.artifacts.push_back((out_dir / "fit.csv").string());
            std::printf("fit: zeta=%.4f rmse=%.4g window=[%d,%d]\n", fit.zeta, fit.rmse,
                        fit.n_min, fit.n_max);
        } catch (const std::exception& e) {
            if (opt.observables != "auto") throw;
            std::fprintf(stderr, "warning: power-law fit skipped: %s\n", e.what());
        }
    }

    if (has("emerging")) {
        const cs::CorrelationMatrix corr = cs::build_correlation(ts, opt.jobs);
        const cs::Spectrum mapped = cs::spectrum_of(cs::power_map(corr, {opt.power_q}));
        const cs::SplitSpectrum split = cs::split_emerging(mapped, rank);
        if (split.gap <= 0.0)
            std::fprintf(stderr,
                         "warning: emerging spectrum not separated from the bulk "
                         "(gap = %g); use a q closer to 1\n",
                         split.gap);
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < split.emerging.values.size(); ++i)
            rows.push_back({static_cast<double>(i + 1), split.emerging.values[i]});
        auto c = comments;
        c["q"] = cs::canonical_number(opt.power_q);
        c["bulk_count"] = std::to_string(split.bulk.values.size());
        c["gap"] = cs::canonical_number(split.gap);
        cs::io::write_csv(out_dir / "emerging.csv", {"index", "lambda"}, rows, c);
        m.artifacts.push_back((out_dir / "emerging.csv").string());
    }

    finish_manifest(m, out_dir, timer);
    return 0;
}

// ---------------------------------------------------------------------------
// rmt-baseline
// ---------------------------------------------------------------------------

int cmd_rmt_baseline(int dim, long tau, double q, int replicas, std::uint64_t seed,
                     const std::string& out, int bins) {
    Timer timer;
    const fs::path out_dir = prepare_out_dir(out);

    cs::RunManifest m;
    m.subcommand = "rmt-baseline";
    m.seed = seed;
    m.config = {{"D", std::to_string(dim)},
                {"tau", std::to_string(tau)},
                {"q", cs::canonical_number(q)},
                {"replicas", std::to_string(replicas)},
                {"seed", std::to_string(seed)}};
    m.config_digest = cs::config_digest(m.config);
    auto comments = base_comments(m);
    comments["model"] = "WISHART";

    const std::vector<double> values = cs::rmt_emerging_values(dim, tau, q, replicas, seed);
    {
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < values.size(); ++i)
            rows.push_back({static_cast<double>(i + 1), values[i]});
        cs::io::write_csv(out_dir / "emerging.csv", {"index", "lambda"}, rows, comments);
        m.artifacts.push_back((out_dir / "emerging.csv").string());
    }
    {
        const cs::DensityEstimate est =
            cs::density_histogram(std::span<const double>(values), bins);
        std::vector<std::vector<double>> rows;
        for (std::size_t b = 0; b < est.densities.size(); ++b)
            rows.push_back({0.5 * (est.bin_edges[b] + est.bin_edges[b + 1]),
                            est.densities[b]});
        cs::io::write_csv(out_dir / "emerging_density.csv", {"bin_center", "density"},
                          rows, comments);
        m.artifacts.push_back((out_dir / "emerging_density.csv").string());
    }
    finish_manifest(m, out_dir, timer);
    return 0;
}

// ---------------------------------------------------------------------------
// oracle
// ---------------------------------------------------------------------------

int cmd_oracle(int d, int L, double theta, const std::string& out,
               const std::string& window_text) {
    Timer timer;
    const fs::path out_dir = prepare_out_dir(out);

    cs::CirculantSpec spec;
    spec.d = d;
    spec.L = L;
    spec.theta = theta;
    const cs::Spectrum s = cs::circulant_eigenvalues(spec);

    cs::RunManifest m;
    m.subcommand = "oracle";
    m.seed = 0;
    m.config = {{"d", std::to_string(d)},
                {"L", std::to_string(L)},
                {"theta", cs::canonical_number(theta)}};
    m.config_digest = cs::config_digest(m.config);
    auto comments = base_comments(m);
    comments["model"] = "CIRCULANT";

    const cs::ZipfSeries z = cs::zipf_series(s);
    std::vector<std::vector<double>> rows;
    for (const auto& p : z.points)
        rows.push_back({static_cast<double>(p.rank), p.value});
    cs::io::write_csv(out_dir / "zipf_theory.csv", {"n", "lambda"}, rows, comments);
    m.artifacts.push_back((out_dir / "zipf_theory.csv").string());

    cs::FitWindow window = cs::oracle_fit_window(d, static_cast<long>(s.size()));
    if (!window_text.empty()) {
        const auto parts = split_list(window_text);
        if (parts.size() != 2) throw cs::config_error("--window expects nMin,nMax");
        window = {std::atoi(parts[0].c_str()), std::atoi(parts[1].c_str())};
    }
    const double zeta_theory = theta < static_cast<double>(d)
        ? cs::theoretical_zeta(d, theta)
        : 0.0;
    if (window.n_max - window.n_min + 1 < 5) {
        std::fprintf(stderr,
                     "warning: window [%d,%d] too small for a reliable fit "
                     "(need >= 5 points); increase L\n",
                     window.n_min, window.n_max);
    } else {
        const cs::PowerLawFit fit = cs::fit_power_law(z, window);
        std::printf("oracle: d=%d L=%d theta=%g  zeta_fit=%.4f (theory %.4f) "
                    "rmse=%.3g window=[%d,%d]\n",
                    d, L, theta, fit.zeta, zeta_theory, fit.rmse, fit.n_min, fit.n_max);
        auto c = comments;
        c["zeta_theory"] = cs::canonical_number(zeta_theory);
        cs::io::write_csv(out_dir / "fit.csv",
                          {"zeta", "log_prefactor", "n_min", "n_max", "rmse",
                           "point_count", "excluded_count"},
                          {{fit.zeta, fit.log_prefactor, static_cast<double>(fit.n_min),
                            static_cast<double>(fit.n_max), fit.rmse,
                            static_cast<double>(fit.point_count),
                            static_cast<double>(fit.excluded_count)}},
                          c);
        m.artifacts.push_back((out_dir / "fit.csv").string());
    }
    finish_manifest(m, out_dir, timer);
    return 0;
}

// ---------------------------------------------------------------------------
// study
// ---------------------------------------------------------------------------

int cmd_study(const std::string& config_path, const std::string& out, unsigned jobs) {
    Timer timer;
    const cs::ConfigFile cfg = cs::ConfigFile::parse_file(config_path);
    const fs::path out_dir = prepare_out_dir(out);

    static const std::vector<std::string> known = {
        "sizes", "runsPerSize", "J", "beta2J", "seed", "equilibrationSteps",
        "tauOverN", "windowMinDiv", "windowMaxDiv"};
    for (const auto& [key, entry] : cfg.raw())
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw cs::config_error("unknown study field '" + key + "' (line " +
                                   std::to_string(entry.second) + ")");

    const std::vector<int> sizes = cfg.get_int_list("sizes");
    const int runs = static_cast<int>(cfg.get_long("runsPerSize", 3));
    cs::StudyTemplate tmpl;
    tmpl.J = cfg.get_double("J", 1.0);
    tmpl.beta2J = cfg.get_beta2J("beta2J", cs::critical_beta2J());
    tmpl.seed = cfg.get_u64("seed");
    tmpl.equilibration_steps = cfg.get_long("equilibrationSteps", 10'000);
    tmpl.tau_over_n = cfg.get_double("tauOverN", 5.0);
    tmpl.window_min_div = static_cast<int>(cfg.get_long("windowMinDiv", 400));
    tmpl.window_max_div = static_cast<int>(cfg.get_long("windowMaxDiv", 40));

    cs::RunManifest m;
    m.subcommand = "study";
    m.seed = tmpl.seed;
    m.config = {{"J", cs::canonical_number(tmpl.J)},
                {"beta2J", cs::canonical_number(tmpl.beta2J)},
                {"equilibrationSteps", std::to_string(tmpl.equilibration_steps)},
                {"runsPerSize", std::to_string(runs)},
                {"seed", std::to_string(tmpl.seed)},
                {"sizes", cfg.get_string("sizes")},
                {"tauOverN", cs::canonical_number(tmpl.tau_over_n)},
                {"windowMaxDiv", std::to_string(tmpl.window_max_div)},
                {"windowMinDiv", std::to_string(tmpl.window_min_div)}};
    m.config_digest = cs::config_digest(m.config);
    auto comments = base_comments(m);

    const auto points = cs::exponent_vs_size(sizes, runs, tmpl, jobs);

    std::vector<std::vector<double>> rows;
    for (const auto& p : points) {
        for (const auto& run : p.runs) {
            rows.push_back({static_cast<double>(p.L), p.zeta, p.stderr_,
                            static_cast<double>(run.fit.n_min),
                            static_cast<double>(run.fit.n_max), run.fit.rmse});
        }
        std::printf("study: L=%d  zeta=%.4f +- %.4f\n", p.L, p.zeta, p.stderr_);
    }
    cs::io::write_csv(out_dir / "study.csv",
                      {"L", "zeta", "stderr", "n_min", "n_max", "rmse"}, rows, comments);
    m.artifacts.push_back((out_dir / "study.csv").string());
    finish_manifest(m, out_dir, timer);
    return 0;
}

int dispatch(int argc, char** argv) {
    CLI::App app{"criticality spectra toolkit: Ising simulation, correlation "
                 "spectra, RMT baselines and power-law diagnostics"};
    app.require_subcommand(1);
    app.fallthrough();
    unsigned jobs = default_jobs();
    app.add_option("--jobs", jobs, "max concurrent runs (default CRITSPECTRA_JOBS or auto)");

    // simulate
    auto* sim = app.add_subcommand("simulate", "run a Metropolis trajectory and dump it");
    std::string sim_config, sim_out = ".";
    bool sim_csv = false;
    sim->add_option("--config", sim_config, "simulation config file")->required();
    sim->add_option("--out", sim_out, "output directory");
    sim->add_flag("--csv", sim_csv, "also export the recording as CSV");

    // spectrum
    auto* spc = app.add_subcommand("spectrum", "spectral observables of a recording");
    SpectrumOptions sopt;
    spc->add_option("--input", sopt.input, "CSTS time-series dump")->required();
    spc->add_option("--out", sopt.out, "output directory")->required();
    spc->add_option("--observables", sopt.observables,
                    "comma list of zipf,density,spacing,sigma2,fit,emerging (default auto)");
    spc->add_option("--subsample", sopt.subsample,
                    "random site fraction (<=1) or count (>1)");
    auto* seed_opt = spc->add_option("--seed", sopt.seed, "subsample seed");
    spc->add_option("--tau-window", sopt.tau_window,
                    "use only the first tau steps (int, N, N/k or aN/k)");
    spc->add_option("--power-map", sopt.power_q, "power-map exponent q");
    spc->add_flag("--mp-overlay", sopt.mp_overlay, "add MP reference columns to density.csv");
    spc->add_option("--unfold", sopt.unfold_method, "unfolding: mp or poly[:order]");
    spc->add_option("--bins", sopt.bins, "histogram bin count (default sqrt rule)");
    spc->add_option("--fit-window", sopt.fit_window, "fit window nMin,nMax");
    spc->add_option("--sigma2-r", sopt.sigma2_r, "comma list of r values");

    // rmt-baseline
    auto* rmt = app.add_subcommand("rmt-baseline", "numerical Wishart emerging-spectrum baseline");
    int rmt_d = 256, rmt_replicas = 20, rmt_bins = 0;
    long rmt_tau = 32;
    double rmt_q = 1.001;
    std::uint64_t rmt_seed = 1;
    std::string rmt_out;
    rmt->add_option("-D,--dim", rmt_d, "matrix dimension");
    rmt->add_option("--tau", rmt_tau, "series length (must be < D)");
    rmt->add_option("-q,--power-map", rmt_q, "power-map exponent");
    rmt->add_option("--replicas", rmt_replicas, "ensemble size");
    rmt->add_option("--seed", rmt_seed, "ensemble seed");
    rmt->add_option("--out", rmt_out, "output directory")->required();
    rmt->add_option("--bins", rmt_bins, "histogram bin count");

    // oracle
    auto* orc = app.add_subcommand("oracle", "circulant FFT check of the Zipf exponent");
    int orc_d = 2, orc_L = 64;
    double orc_theta = 0.25;
    std::string orc_out, orc_window;
    orc->add_option("-d,--dim", orc_d, "torus dimension (1 or 2)");
    orc->add_option("-L,--side", orc_L, "side length");
    orc->add_option("--theta", orc_theta, "correlation decay exponent");
    orc->add_option("--out", orc_out, "output directory")->required();
    orc->add_option("--window", orc_window, "fit window nMin,nMax (default N/400,N/40)");

    // study
    auto* stu = app.add_subcommand("study", "exponent-versus-size study");
    std::string stu_config, stu_out;
    stu->add_option("--config", stu_config, "study config file")->required();
    stu->add_option("--out", stu_out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // help/version exit 0, parse failures are config errors
    }

    sopt.seed_given = seed_opt->count() > 0;
    sopt.jobs = jobs;

    if (sim->parsed()) return cmd_simulate(sim_config, sim_out, sim_csv);
    if (spc->parsed()) return cmd_spectrum(sopt);
    if (rmt->parsed())
        return cmd_rmt_baseline(rmt_d, rmt_tau, rmt_q, rmt_replicas, rmt_seed, rmt_out, rmt_bins);
    if (orc->parsed()) return cmd_oracle(orc_d, orc_L, orc_theta, orc_out, orc_window);
    if (stu->parsed()) return cmd_study(stu_config, stu_out, jobs);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const cs::config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const cs::capacity_error& e) {
        std::fprintf(stderr, "capacity error: %s\n", e.what());
        return 3;
    } catch (const cs::precondition_error& e) {
        std::fprintf(stderr, "precondition error: %s\n", e.what());
        return 3;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "precondition error: %s\n", e.what());
        return 3;
    } catch (const cs::numeric_error& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 4;
    }
}
