#include <catch2/catch.hpp>

#include <critspectra/correlation.hpp>
#include <critspectra/rng.hpp>
#include <critspectra/spectra.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

using namespace critspectra;

namespace {

TimeSeriesMatrix coin_flip_ts(int n, long tau, std::uint64_t seed) {
    TimeSeriesMatrix ts;
    ts.n_series = n;
    ts.tau = tau;
    ts.data.resize(static_cast<std::size_t>(n) * tau);
    ts.site_indices.resize(n);
    Rng rng(seed);
    for (auto& v : ts.data) v = rng.next() & 1 ? int8_t{1} : int8_t{-1};
    for (int i = 0; i < n; ++i) ts.site_indices[i] = static_cast<std::uint32_t>(i);
    return ts;
}

}

TEST_CASE("eigenvalues of the identity") {
    const auto s = eigenvalues_symmetric(Eigen::MatrixXd::Identity(5, 5));
    REQUIRE(s.values == std::vector<double>{1, 1, 1, 1, 1});
}

TEST_CASE("eigenvalues of the 2x2 all-ones matrix") {
    Eigen::MatrixXd m(2, 2);
    m << 1, 1, 1, 1;
    const auto s = eigenvalues_symmetric(m);
    REQUIRE(s.values[0] == Approx(2.0).margin(1e-12));
    REQUIRE(s.values[1] == Approx(0.0).margin(1e-12));
}

TEST_CASE("non-symmetric input is rejected") {
    Eigen::MatrixXd m(2, 2);
    m << 1, 0.5, 0.4, 1;
    REQUIRE_THROWS_AS(eigenvalues_symmetric(m), precondition_error);
}

TEST_CASE("eigenpairs satisfy the residual bound") {
    const auto ts = coin_flip_ts(24, 64, 42);
    const Eigen::MatrixXd m = build_correlation(ts).dense();
    const auto pairs = eigenpairs_symmetric(m);
    const double norm = m.operatorNorm();
    for (int k : {0, 5, 23}) {
        const Eigen::VectorXd v = pairs.vectors.col(k);
        const double residual = (m * v - pairs.values[k] * v).norm();
        REQUIRE(residual <= 1e-8 * norm);
    }
}

TEST_CASE("zipf series keeps 1-based ranks") {
    const auto z = zipf_series(make_spectrum({0.25, 4.0, 1.0}));
    REQUIRE(z.points.size() == 3);
    REQUIRE(z.points[0].rank == 1);
    REQUIRE(z.points[0].value == 4.0);
    REQUIRE(z.points[1].rank == 2);
    REQUIRE(z.points[1].value == 1.0);
    REQUIRE(z.points[2].rank == 3);
    REQUIRE(z.points[2].value == 0.25);
    REQUIRE(z.nonpositive.empty());
}

TEST_CASE("zipf series diverts non-positive values to the overflow list") {
    const auto z = zipf_series(make_spectrum({2.0, 0.0, -0.5}));
    REQUIRE(z.points.size() == 1);
    REQUIRE(z.points[0].rank == 1);
    REQUIRE(z.nonpositive == std::vector<double>{0.0, -0.5});
}

TEST_CASE("split_emerging separates by magnitude with a positive gap") {
    const auto s = make_spectrum({3.0, 1.0, 0.002, -0.001});
    const auto split = split_emerging(s, 2);
    REQUIRE(split.bulk.values == std::vector<double>{3.0, 1.0});
    REQUIRE(split.emerging.values == std::vector<double>{0.002, -0.001});
    REQUIRE(split.gap == Approx(0.998).margin(1e-12));
}

TEST_CASE("split_emerging rejects degenerate requests") {
    const auto s = make_spectrum({3.0, 1.0, 0.5});
    REQUIRE_THROWS_AS(split_emerging(s, 3), precondition_error);
    REQUIRE_THROWS_AS(split_emerging(s, 0), precondition_error);
}

TEST_CASE("split_emerging is invariant under global scaling") {
    const auto s = make_spectrum({5.0, -2.0, 0.3, -0.04, 0.001});
    const auto a = split_emerging(s, 3);
    std::vector<double> scaled(s.values);
    for (auto& v : scaled) v *= 7.5;
    const auto b = split_emerging(make_spectrum(std::move(scaled)), 3);
    for (std::size_t i = 0; i < a.emerging.values.size(); ++i)
        REQUIRE(b.emerging.values[i] == Approx(7.5 * a.emerging.values[i]).epsilon(1e-12));
}

TEST_CASE("histogram of uniform samples is flat") {
    Rng rng(8);
    std::vector<double> xs(1000);
    for (auto& x : xs) x = rng.uniform01();
    std::vector<double> edges(11);
    for (int b = 0; b <= 10; ++b) edges[b] = 0.1 * b;
    const auto est = density_histogram(std::span<const double>(xs), edges);
    // 3 sigma multinomial bound: sigma = sqrt(p(1-p)/n)/width ~ 0.095.
    for (double d : est.densities) REQUIRE(d == Approx(1.0).margin(0.285));
    REQUIRE(est.integral() == Approx(1.0).margin(1e-10));
}

TEST_CASE("constant samples occupy a single unit bin") {
    const std::vector<double> xs(20, 3.25);
    const auto est = density_histogram(std::span<const double>(xs));
    REQUIRE(est.densities.size() == 1);
    const double width = est.bin_edges[1] - est.bin_edges[0];
    REQUIRE(est.densities[0] == Approx(1.0 / width).epsilon(1e-12));
}

TEST_CASE("histograms always integrate to one") {
    Rng rng(9);
    std::vector<double> xs(777);
    for (auto& x : xs) x = rng.normal() * 3.0 + 1.0;
    for (int bins : {0, 5, 40}) {
        const auto est = density_histogram(std::span<const double>(xs), bins);
        REQUIRE(est.integral() == Approx(1.0).margin(1e-10));
    }
}

TEST_CASE("histogram rejects fewer than 2 samples") {
    const std::vector<double> one{1.0};
    REQUIRE_THROWS_AS(density_histogram(std::span<const double>(one)), precondition_error);
    REQUIRE_THROWS_AS(density_histogram(std::span<const double>{}), precondition_error);
}

TEST_CASE("linear unfolding of an equally spaced spectrum gives unit spacings") {
    std::vector<double> vals(64);
    std::iota(vals.begin(), vals.end(), 1.0);
    const auto unfolded =
        unfold(make_spectrum(vals), {UnfoldMethod::Kind::polynomial, 1, 0.0}, 0.0);
    REQUIRE(unfolded.size() == 64);
    for (std::size_t i = 0; i + 1 < unfolded.size(); ++i)
        REQUIRE(unfolded[i + 1] - unfolded[i] == Approx(1.0).margin(1e-9));
}

TEST_CASE("unfolding is independent of input order") {
    std::vector<double> vals(50);
    Rng rng(17);
    for (auto& v : vals) v = rng.uniform01() * 10.0;
    std::vector<double> shuffled(vals);
    std::reverse(shuffled.begin(), shuffled.end());
    const auto a = unfold_polynomial(make_spectrum(vals));
    const auto b = unfold_polynomial(make_spectrum(shuffled));
    REQUIRE(a == b);
}

TEST_CASE("unfolding rejects tiny or degenerate inputs") {
    REQUIRE_THROWS_AS(unfold_polynomial(make_spectrum({1, 2, 3})), precondition_error);
    const std::vector<double> flat(16, 2.0);
    REQUIRE_THROWS_AS(unfold_polynomial(make_spectrum(flat)), numeric_error);
    REQUIRE_THROWS_AS(unfold_mp(make_spectrum({1, 2, 3}), 0.0), precondition_error);
}

TEST_CASE("edge trimming retains the central 80 percent") {
    std::vector<double> vals(100);
    std::iota(vals.begin(), vals.end(), 1.0);
    const auto unfolded = unfold_polynomial(make_spectrum(vals), 1);
    REQUIRE(unfolded.size() == 80);
}

TEST_CASE("picket fence spacings collapse to one bin") {
    std::vector<double> vals(100);
    std::iota(vals.begin(), vals.end(), 1.0);
    const auto sp = spacing_distribution(vals);
    REQUIRE(sp.mean_spacing == Approx(1.0).epsilon(1e-12));
    REQUIRE(sp.mean_spacing_ok);
    REQUIRE(sp.density.densities.size() == 1);
}

TEST_CASE("poisson spacings follow the exponential law") {
    Rng rng(31);
    const int n = 10000;
    std::vector<double> points(n);
    for (auto& p : points) p = rng.uniform01() * static_cast<double>(n);
    const auto spacings = nearest_neighbor_spacings(points);
    const double ks = ks_distance(spacings,
                                  [](double s) { return 1.0 - std::exp(-s); });
    REQUIRE(ks < 0.02);
}

TEST_CASE("number variance of poisson points grows like r") {
    Rng rng(13);
    const int n = 100000;
    std::vector<double> points(n);
    for (auto& p : points) p = rng.uniform01() * static_cast<double>(n);
    const std::vector<double> rs{1.0, 2.0, 5.0, 10.0};
    const auto nv = number_variance(std::span<const double>(points), rs);
    for (const auto& [r, s2] : nv)
        REQUIRE(s2 == Approx(r).epsilon(0.05));
}

TEST_CASE("number variance of a picket fence stays below 1/4") {
    std::vector<double> vals(2000);
    std::iota(vals.begin(), vals.end(), 1.0);
    const std::vector<double> rs{2.0, 2.5, 5.0, 7.5};
    const auto nv = number_variance(std::span<const double>(vals), rs);
    // The population bound is 1/4; the bias-corrected estimator over a
    // finite window sequence sits O(1/n) above it.
    for (const auto& [r, s2] : nv) REQUIRE(s2 <= 0.2504);
}

TEST_CASE("number variance rejects oversized windows") {
    std::vector<double> vals(100);
    std::iota(vals.begin(), vals.end(), 1.0);
    const std::vector<double> rs{50.0};
    REQUIRE_THROWS_AS(number_variance(std::span<const double>(vals), rs),
                      precondition_error);
}

TEST_CASE("spatial and temporal spectra share their nonzero part") {
    const auto ts = coin_flip_ts(48, 12, 2000);
    const auto spatial = spectrum_of(build_correlation(ts));
    const auto temporal = temporal_gram_spectrum(ts);
    REQUIRE(temporal.size() == spatial.size());
    const int rank = measured_rank(spatial);
    REQUIRE(measured_rank(temporal) == rank);
    for (int i = 0; i < rank; ++i)
        REQUIRE(temporal.values[i] ==
                Approx(spatial.values[i]).epsilon(1e-8));
}

TEST_CASE("trace identity for unmapped correlation spectra") {
    const auto ts = coin_flip_ts(32, 64, 64);
    const auto s = spectrum_of(build_correlation(ts));
    REQUIRE_NOTHROW(validate_correlation_spectrum(s));
    REQUIRE(s.sum() == Approx(32.0).margin(1e-8 * 32.0));
}

TEST_CASE("spectral observables are permutation invariant") {
    const auto ts = coin_flip_ts(20, 50, 4);
    const Eigen::MatrixXd m = build_correlation(ts).dense();
    std::vector<int> perm(20);
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937 urbg(7);
    std::shuffle(perm.begin(), perm.end(), urbg);
    Eigen::MatrixXd pm(20, 20);
    for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j) pm(i, j) = m(perm[i], perm[j]);
    const auto a = eigenvalues_symmetric(m);
    const auto b = eigenvalues_symmetric(pm);
    for (std::size_t i = 0; i < a.size(); ++i)
        REQUIRE(a.values[i] == Approx(b.values[i]).margin(1e-9));
}
