#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <complex>
#include <random>

#include "doe/netmodel.hpp"
#include "doe/powerflow.hpp"
#include "doe/scenario.hpp"
#include "support/pf_oracle.hpp"
#include "support/testutil.hpp"

using namespace doe;

static Network feeder76() {
    return load_network(std::string(DOE_DATA_DIR) + "/network76.json");
}

static std::vector<LoadProfile> loads76(const Network& net) {
    return load_profiles(std::string(DOE_DATA_DIR) + "/loads76.csv", &net);
}

static LoadSnapshot snapshot_at(const Network& net, const std::vector<LoadProfile>& profiles,
                                int t) {
    LoadSnapshot loads(net.buses.size(), {0, 0});
    for (const auto& lp : profiles) loads[net.bus_index(lp.bus_id)] = {lp.p[t], lp.q[t]};
    return loads;
}

TEST_CASE("zero loads: flat voltage in one iteration") {
    std::mt19937 rng(3);
    Network net = testutil::random_tree(10, rng);
    net.slack_voltage = 1.03;
    auto sol = solve(net, LoadSnapshot(10, {0, 0}));
    CHECK(sol.converged);
    CHECK(sol.iterations == 1);
    for (const auto& v : sol.v) {
        CHECK(std::abs(v) == doctest::Approx(1.03).epsilon(1e-14));
        CHECK(std::arg(v) == doctest::Approx(0.0).epsilon(1e-14));
    }
}

TEST_CASE("2-bus case matches the fixed-point oracle") {
    Network net = testutil::two_bus(0.01, 0.01);
    LoadSnapshot loads{{0, 0}, {0.1, 0.0}};

    // independent oracle: v <- v_slack - z*conj(s/v) to 1e-12
    std::complex<double> z{0.01, 0.01}, s{0.1, 0.0}, v{1.0, 0.0};
    for (int i = 0; i < 1000; ++i) {
        auto v_new = std::complex<double>{1.0, 0.0} - z * std::conj(s / v);
        if (std::abs(v_new - v) < 1e-12) {
            v = v_new;
            break;
        }
        v = v_new;
    }

    auto sol = solve(net, loads);
    REQUIRE(sol.converged);
    CHECK(std::abs(sol.v[1]) == doctest::Approx(std::abs(v)).epsilon(1e-10));
    CHECK(std::abs(sol.v[0]) == 1.0); // slack held exactly
}

TEST_CASE("monotone sanity: heavier active load lowers |v1|") {
    Network net = testutil::two_bus(0.02, 0.0);
    double prev = 2.0;
    for (double p = 0.05; p <= 0.5; p += 0.05) {
        auto sol = solve(net, {{0, 0}, {p, 0.0}});
        REQUIRE(sol.converged);
        double mag = std::abs(sol.v[1]);
        CHECK(mag < prev);
        prev = mag;
    }
}

TEST_CASE("oracle equivalence on random networks with <= 5 buses") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> load(0.0, 0.3);
    for (int trial = 0; trial < 50; ++trial) {
        std::uniform_int_distribution<int> size(2, 5);
        int n = size(rng);
        Network net = testutil::random_tree(n, rng);
        LoadSnapshot loads(n, {0, 0});
        for (int i = 1; i < n; ++i) loads[i] = {load(rng), load(rng) * 0.3};
        auto sol = solve(net, loads);
        REQUIRE(sol.converged);
        auto ref = oracle::fixed_point_solve(net, loads);
        for (int i = 0; i < n; ++i)
            CHECK(std::abs(sol.v[i]) == doctest::Approx(std::abs(ref[i])).epsilon(1e-8));
    }
}

TEST_CASE("76-bus feeder: converged, tight residual, plausible voltages") {
    Network net = feeder76();
    auto profiles = loads76(net);
    for (int t = 0; t < 24; ++t) {
        auto loads = snapshot_at(net, profiles, t);
        auto sol = solve(net, loads);
        REQUIRE(sol.converged);
        CHECK(sol.max_mismatch <= 1e-8);
        for (const auto& v : sol.v) {
            CHECK(std::abs(v) > 0.9);
            CHECK(std::abs(v) < 1.1);
        }
        // independent branch-equation residual
        CHECK(oracle::branch_equation_residual(net, loads, sol.v) <= 1e-7);
    }
}

TEST_CASE("residual property over random converged solutions") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> load(0.0, 0.1);
    PowerFlowOptions opts;
    for (int trial = 0; trial < 20; ++trial) {
        std::uniform_int_distribution<int> size(3, 30);
        int n = size(rng);
        Network net = testutil::random_tree(n, rng);
        LoadSnapshot loads(n, {0, 0});
        for (int i = 1; i < n; ++i) loads[i] = {load(rng), load(rng) * 0.4};
        auto sol = solve(net, loads, opts);
        REQUIRE(sol.converged);
        CHECK(oracle::branch_equation_residual(net, loads, sol.v) <= 10 * opts.tolerance);
    }
}

TEST_CASE("zero-impedance branch is an error at solve time") {
    Network net = testutil::two_bus(0.0, 0.0);
    CHECK_THROWS_AS(solve(net, LoadSnapshot(2, {0, 0})), InputError);
}

TEST_CASE("batch of one matches solve() per timestep") {
    Network net = feeder76();
    auto profiles = loads76(net);
    auto scenarios = generate_scenarios(profiles, {0.0, 0.0}, 1, 42);
    auto batch = batch_solve(net, scenarios);
    CHECK(batch.non_converged.empty());
    for (int t = 0; t < 24; ++t) {
        auto sol = solve(net, snapshot_at(net, profiles, t));
        for (std::size_t i = 0; i < net.buses.size(); ++i)
            CHECK(batch.voltages.at(0, static_cast<int>(i), t) == std::abs(sol.v[i]));
    }
}

TEST_CASE("batch tensor is dense with the declared shape") {
    Network net = feeder76();
    auto profiles = loads76(net);
    auto scenarios = generate_scenarios(profiles, {0.15, 0.0}, 50, 7);
    auto batch = batch_solve(net, scenarios);
    CHECK(batch.non_converged.empty());
    CHECK(batch.voltages.n == 50);
    CHECK(batch.voltages.bus_ids.size() == 76);
    CHECK(batch.voltages.horizon == 24);
    CHECK(batch.voltages.v_mag.size() == 50u * 76u * 24u);
    for (double v : batch.voltages.v_mag) CHECK(v > 0.0);
}

TEST_CASE("parallel and serial batch solves are bit-identical") {
    Network net = feeder76();
    auto profiles = loads76(net);
    auto scenarios = generate_scenarios(profiles, {0.15, 0.0}, 20, 99);
    auto a = batch_solve(net, scenarios);
    auto b = batch_solve_serial(net, scenarios);
    REQUIRE(a.voltages.v_mag.size() == b.voltages.v_mag.size());
    for (std::size_t i = 0; i < a.voltages.v_mag.size(); ++i)
        CHECK(a.voltages.v_mag[i] == b.voltages.v_mag[i]);
}

TEST_CASE("non-convergence is reported per cell, remaining cells complete") {
    // absurd load at one timestep only
    Network net = testutil::two_bus(0.05, 0.05);
    std::vector<LoadProfile> profiles{{1, {0.1, 50.0, 0.1}, {0.0, 0.0, 0.0}}};
    auto scenarios = generate_scenarios(profiles, {0.0, 0.0}, 2, 0);
    auto batch = batch_solve(net, scenarios);
    REQUIRE(batch.non_converged.size() == 2);
    CHECK(batch.non_converged[0].scenario == 0);
    CHECK(batch.non_converged[0].t == 1);
    CHECK(batch.non_converged[1].scenario == 1);
    CHECK(batch.non_converged[1].t == 1);
    // healthy cells still solved
    CHECK(batch.voltages.at(0, 1, 0) > 0.9);
    CHECK(batch.voltages.at(1, 1, 2) > 0.9);
}

TEST_CASE("voltage scenario CSV round-trip") {
    Network net = feeder76();
    auto profiles = loads76(net);
    auto scenarios = generate_scenarios(profiles, {0.1, 0.0}, 3, 5);
    auto batch = batch_solve(net, scenarios);
    testutil::TempDir dir;
    save_voltage_scenarios(batch.voltages, dir.file("v.csv"));
    auto back = load_voltage_scenarios(dir.file("v.csv"));
    REQUIRE(back.v_mag.size() == batch.voltages.v_mag.size());
    CHECK(back.bus_ids == batch.voltages.bus_ids);
    for (std::size_t i = 0; i < back.v_mag.size(); ++i)
        CHECK(back.v_mag[i] == batch.voltages.v_mag[i]);
}
