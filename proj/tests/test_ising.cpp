#include <catch2/catch.hpp>

#include <critspectra/ising.hpp>

#include <array>
#include <cmath>
#include <vector>

using namespace critspectra;

namespace {

SpinLattice uniform_lattice(int L, int8_t value, std::uint64_t seed) {
    return SpinLattice(L, std::vector<std::int8_t>(static_cast<std::size_t>(L) * L, value), seed);
}

SpinLattice checkerboard_lattice(int L, std::uint64_t seed) {
    std::vector<std::int8_t> spins(static_cast<std::size_t>(L) * L);
    for (int r = 0; r < L; ++r)
        for (int c = 0; c < L; ++c)
            spins[r * L + c] = ((r + c) % 2 == 0) ? int8_t{1} : int8_t{-1};
    return SpinLattice(L, std::move(spins), seed);
}

}

TEST_CASE("critical temperature follows the Onsager closed form") {
    REQUIRE(critical_temperature(1.0) == Approx(2.269185314213022).epsilon(1e-12));
    REQUIRE(critical_temperature(2.0) == Approx(4.538370628426044).epsilon(1e-12));
    REQUIRE(critical_temperature(0.5) == Approx(1.134592657106511).epsilon(1e-12));
    REQUIRE_THROWS_AS(critical_temperature(0.0), precondition_error);
    REQUIRE_THROWS_AS(critical_temperature(-1.0), precondition_error);
}

TEST_CASE("total energy over the torus bonds") {
    SECTION("all spins up: 2 L^2 aligned bonds") {
        const auto lattice = uniform_lattice(4, 1, 0);
        REQUIRE(total_energy(lattice, 1.0) == -32.0);
    }
    SECTION("checkerboard: all bonds anti-aligned") {
        const auto lattice = checkerboard_lattice(4, 0);
        REQUIRE(total_energy(lattice, 1.0) == 32.0);
    }
    SECTION("single flipped spin costs 8J") {
        std::vector<std::int8_t> spins(16, 1);
        spins[5] = -1;
        const SpinLattice lattice(4, std::move(spins), 0);
        REQUIRE(total_energy(lattice, 1.0) == -24.0);
    }
}

TEST_CASE("metropolis flip accepts every energy-lowering move") {
    // A single down spin in an up sea: flipping it lowers the energy by 8J.
    for (double beta2J : {0.001, 0.5, 2.0, 25.0}) {
        std::vector<std::int8_t> spins(16, 1);
        spins[3] = -1;
        SpinLattice lattice(4, std::move(spins), 7);
        REQUIRE(lattice.flip_cost_m(3) == -4);
        REQUIRE(lattice.metropolis_flip(3, beta2J));
        REQUIRE(lattice.spin(3) == 1);
    }
}

TEST_CASE("metropolis acceptance rate matches the Boltzmann factor") {
    // beta2J chosen so that exp(-dU/T) = exp(-4 beta2J) = 0.3 for dU = +8J.
    const double beta2J = 0.30099320108148403;
    auto lattice = uniform_lattice(4, 1, 12345);
    REQUIRE(lattice.flip_cost_m(0) == 4);
    const int proposals = 1'000'000;
    int accepted = 0;
    for (int i = 0; i < proposals; ++i) {
        if (lattice.metropolis_flip(0, beta2J)) {
            ++accepted;
            lattice.flip_spin(0);  // restore the all-up state
        }
    }
    const double rate = static_cast<double>(accepted) / proposals;
    REQUIRE(rate == Approx(0.300).margin(0.002));
}

TEST_CASE("infinite temperature accepts everything") {
    SpinLattice lattice(8, 99);
    int accepted = 0;
    for (int i = 0; i < 1000; ++i)
        if (lattice.metropolis_flip(static_cast<int>(lattice.rng().bounded(64)), 0.0))
            ++accepted;
    REQUIRE(accepted == 1000);
}

TEST_CASE("toy-chain stationary distribution matches Boltzmann within 3 sigma") {
    // Two-spin chain with a single bond: H = -J s0 s1. Flipping either spin
    // changes the energy by dU = 2J s0 s1, i.e. m = s0 s1 for the shared
    // acceptance kernel. Sampled every 10 kernel steps to decorrelate.
    const double beta2J = 1.0;
    std::array<int, 2> s{1, 1};
    Rng rng(2024);
    std::array<long, 4> counts{};  // state index (s0>0)*2 + (s1>0)
    const long samples = 1'000'000;
    for (long i = 0; i < samples; ++i) {
        for (int burst = 0; burst < 10; ++burst) {
            const int site = static_cast<int>(rng.bounded(2));
            if (metropolis_accept_m(s[0] * s[1], beta2J, rng)) s[site] = -s[site];
        }
        ++counts[(s[0] > 0 ? 2 : 0) + (s[1] > 0 ? 1 : 0)];
    }
    // Boltzmann weights: exp(+-beta2J/2) per state (E = -J s0 s1, T = 2J/beta2J).
    // State order: (-,-) aligned, (-,+), (+,-), (+,+) aligned.
    const double w_same = std::exp(0.5 * beta2J), w_diff = std::exp(-0.5 * beta2J);
    const double z = 2.0 * (w_same + w_diff);
    const std::array<double, 4> target{w_same / z, w_diff / z, w_diff / z, w_same / z};
    for (int state = 0; state < 4; ++state) {
        const double freq = static_cast<double>(counts[state]) / samples;
        const double sigma = std::sqrt(target[state] * (1.0 - target[state]) /
                                       static_cast<double>(samples));
        INFO("state " << state << " freq " << freq << " target " << target[state]);
        REQUIRE(std::abs(freq - target[state]) <= 3.0 * sigma);
    }
}

TEST_CASE("energy bookkeeping: accumulated local changes equal the global difference") {
    SpinLattice lattice(8, 31);
    const long initial = total_bond_sum(lattice);
    long accumulated_m = 0;
    for (int i = 0; i < 20000; ++i) {
        const int site = static_cast<int>(lattice.rng().bounded(64));
        const int m = lattice.flip_cost_m(site);
        if (lattice.metropolis_flip(site, 0.9)) accumulated_m += m;
    }
    // dU = 2J m corresponds to a bond-sum change of -2m.
    REQUIRE(total_bond_sum(lattice) == initial - 2 * accumulated_m);
}

TEST_CASE("global spin flip with the same proposal stream mirrors the trajectory") {
    const SpinLattice reference(8, 555);
    std::vector<std::int8_t> flipped(reference.spins());
    for (auto& v : flipped) v = -v;

    SpinLattice a(8, reference.spins(), 777);
    SpinLattice b(8, std::move(flipped), 777);
    const double beta2J = 0.5;  // above T_c
    for (int step = 0; step < 50; ++step) {
        a.run_flips(640, beta2J);
        b.run_flips(640, beta2J);
    }
    for (int site = 0; site < 64; ++site)
        REQUIRE(a.spin(site) == -b.spin(site));
}

TEST_CASE("simulate is deterministic given the config") {
    SimConfig config;
    config.L = 4;
    config.tau = 3;
    config.seed = 99;
    config.equilibration_steps = 2;
    const auto a = simulate(config);
    const auto b = simulate(config);
    REQUIRE(a.data == b.data);
    REQUIRE(a.site_indices == b.site_indices);
}

TEST_CASE("recording matches the flip count contract") {
    SimConfig config;
    config.L = 4;
    config.tau = 3;
    config.seed = 4242;
    config.equilibration_steps = 2;
    const auto ts = simulate(config);

    SpinLattice replay(4, split_seed(config.seed, "ising"));
    const long flips = config.resolved_flips_per_step();
    replay.run_flips(config.equilibration_steps * flips, config.beta2J);
    for (long k = 0; k < config.tau; ++k) {
        // Column k is the state after (equilibration + k + 1) * flips proposals.
        replay.run_flips(flips, config.beta2J);
        for (int site = 0; site < 16; ++site)
            REQUIRE(ts.at(site, k) == replay.spin(site));
    }
}

TEST_CASE("high-temperature run is disordered") {
    SimConfig config;
    config.L = 32;
    config.tau = 5120;
    config.seed = 2718;
    config.beta2J = 0.001;
    config.equilibration_steps = 200;
    const auto ts = simulate(config);
    REQUIRE(std::abs(ts.mean_value()) < 0.02);
}

TEST_CASE("critical run has the Onsager bond correlation", "[slow]") {
    SimConfig config;
    config.L = 32;
    config.tau = 256;
    config.seed = 31415;
    config.beta2J = critical_beta2J();
    const auto ts = simulate(config);
    const double bond = mean_bond_correlation(ts);
    // Infinite-lattice anchor sqrt(2)/2 ~ 0.707.
    REQUIRE(bond > 0.6);
    REQUIRE(bond < 0.8);
}

TEST_CASE("absurd sizes are rejected before allocation") {
    SimConfig config;
    config.L = 5000;
    config.tau = 1'000'000;
    config.seed = 1;
    REQUIRE_THROWS_AS(simulate(config), capacity_error);
    config.L = 60000;  // L^2 alone overflows the site index
    config.tau = 1;
    REQUIRE_THROWS_AS(simulate(config), capacity_error);
}

TEST_CASE("config validation rejects bad fields") {
    SimConfig config;
    config.L = 1;
    config.tau = 1;
    REQUIRE_THROWS_AS(simulate(config), precondition_error);
    config.L = 4;
    config.tau = 0;
    REQUIRE_THROWS_AS(simulate(config), precondition_error);
    config.tau = 4;
    config.J = 0.0;
    REQUIRE_THROWS_AS(simulate(config), precondition_error);
    config.J = 1.0;
    config.beta2J = -0.1;
    REQUIRE_THROWS_AS(simulate(config), precondition_error);
}
