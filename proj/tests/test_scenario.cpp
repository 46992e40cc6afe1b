#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include <omp.h>

#include "doe/scenario.hpp"
#include "support/testutil.hpp"

using namespace doe;

static std::vector<LoadProfile> base_profiles() {
    return {{1, {0.1, 0.2, 0.3}, {0.01, 0.02, 0.03}},
            {2, {0.4, 0.5, 0.6}, {0.0, 0.0, 0.0}}};
}

TEST_CASE("sigma = 0 reproduces the base profiles in every scenario") {
    auto base = base_profiles();
    auto set = generate_scenarios(base, {0.0, 0.0}, 5, 123);
    for (int s = 0; s < 5; ++s)
        for (int b = 0; b < 2; ++b)
            for (int t = 0; t < 3; ++t) {
                CHECK(set.at(s, b, t).real() == base[b].p[t]);
                CHECK(set.at(s, b, t).imag() == base[b].q[t]);
            }
}

TEST_CASE("same seed: identical; different seed: different") {
    auto base = base_profiles();
    auto a = generate_scenarios(base, {0.2, 0.0}, 10, 42);
    auto b = generate_scenarios(base, {0.2, 0.0}, 10, 42);
    auto c = generate_scenarios(base, {0.2, 0.0}, 10, 43);
    CHECK(a.profiles == b.profiles);
    CHECK(a.profiles != c.profiles);
}

TEST_CASE("thread count does not change the generated tensor") {
    auto base = base_profiles();
    int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    auto serial = generate_scenarios(base, {0.3, 0.0}, 64, 7);
    omp_set_num_threads(std::max(4, saved));
    auto parallel = generate_scenarios(base, {0.3, 0.0}, 64, 7);
    omp_set_num_threads(saved);
    CHECK(serial.profiles == parallel.profiles);
}

TEST_CASE("sample moments match the analytic truncated-gaussian moments") {
    // floor = 0 truncates 10 sd below the mean, so the analytic moments are
    // computed from the standard truncated-normal formulas as the oracle.
    const double sigma = 0.1, floor = 0.0, mean = 1.0;
    const double a = (floor - mean) / sigma;
    auto phi = [](double z) {
        return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
    };
    auto Phi = [](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); };
    const double lambda = phi(a) / (1.0 - Phi(a));
    const double true_mean = mean + sigma * lambda;
    const double true_var = sigma * sigma * (1.0 + a * lambda - lambda * lambda);

    std::vector<LoadProfile> base{{1, {1.0}, {0.0}}};
    auto set = generate_scenarios(base, {sigma, floor}, 10000, 2024);
    double sum = 0.0, sum2 = 0.0;
    for (int s = 0; s < set.n; ++s) {
        double m = set.at(s, 0, 0).real();
        sum += m;
        sum2 += m * m;
    }
    double sample_mean = sum / set.n;
    double sample_sd = std::sqrt(sum2 / set.n - sample_mean * sample_mean);
    CHECK(std::abs(sample_mean - true_mean) < 0.01 * true_mean);
    CHECK(std::abs(sample_sd - std::sqrt(true_var)) < 0.05 * std::sqrt(true_var));
}

TEST_CASE("floor = 0 keeps active loads nonnegative") {
    std::vector<LoadProfile> base{{1, {0.5, 0.0, 1.0}, {0.1, 0.0, 0.2}}};
    auto set = generate_scenarios(base, {2.0, 0.0}, 500, 9);
    for (const auto& c : set.profiles) CHECK(c.real() >= 0.0);
}

TEST_CASE("multipliers are keyed by (seed, s, bus, t), not generation order") {
    // a subset of the buses generates the same values as the full set
    std::vector<LoadProfile> full = base_profiles();
    std::vector<LoadProfile> only_second{full[1]};
    auto a = generate_scenarios(full, {0.25, 0.0}, 8, 31);
    auto b = generate_scenarios(only_second, {0.25, 0.0}, 8, 31);
    for (int s = 0; s < 8; ++s)
        for (int t = 0; t < 3; ++t) CHECK(a.at(s, 1, t) == b.at(s, 0, t));
}

TEST_CASE("scenario CSV round-trip") {
    auto set = generate_scenarios(base_profiles(), {0.2, 0.0}, 4, 55);
    testutil::TempDir dir;
    save_scenarios(set, dir.file("sc.csv"));
    auto back = load_scenarios(dir.file("sc.csv"));
    CHECK(back.n == set.n);
    CHECK(back.bus_ids == set.bus_ids);
    CHECK(back.horizon == set.horizon);
    CHECK(back.profiles == set.profiles);
}

TEST_CASE("preconditions") {
    CHECK_THROWS_AS(generate_scenarios(base_profiles(), {0.1, 0.0}, 0, 1), InputError);
    CHECK_THROWS_AS(generate_scenarios(base_profiles(), {-0.1, 0.0}, 1, 1), InputError);
    CHECK_THROWS_AS(generate_scenarios({}, {0.1, 0.0}, 1, 1), InputError);
}
