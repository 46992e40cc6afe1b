#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "doe/fnaproxy.hpp"
#include "doe/netmodel.hpp"
#include "doe/powerflow.hpp"
#include "doe/robust.hpp"
#include "doe/scenario.hpp"
#include "support/testutil.hpp"

using namespace doe;

static EnvelopePolicy anrc() {
    return {0.92, 1.08, 0.04, -1.0, 1.0, PolicyMode::Anrc};
}
static EnvelopePolicy prc() {
    return {0.92, 1.08, 0.04, -1.0, 1.0, PolicyMode::Prc};
}

TEST_CASE("shrinkage of reference envelopes") {
    DOESeries doe;
    doe.bus_ids = {1};
    doe.horizon = 3;
    doe.p = {{-1, 1, false}, {-1, 0, false}, {0, 0, true}};
    doe.q = {{-1, 1, false}, {-1, -1, false}, {-1, 1, false}};
    auto s = shrinkage(doe, anrc(), prc());
    CHECK(s.s_p[0] == 0.0);
    CHECK(s.s_p[1] == 0.5);
    CHECK(s.s_p[2] == 1.0); // empty
    CHECK(s.s_q[1] == 1.0); // single point
    CHECK(s.s_q[0] == 0.0);
}

TEST_CASE("degenerate policy range is an error") {
    DOESeries doe;
    doe.bus_ids = {1};
    doe.horizon = 1;
    doe.p = {{0, 0, false}};
    doe.q = {{0, 0, false}};
    EnvelopePolicy flat = anrc();
    flat.x_min = flat.x_max = 0.5;
    flat.mode = PolicyMode::Prc;
    CHECK_THROWS_AS(shrinkage(doe, flat, prc()), InputError);
}

TEST_CASE("invariant under simultaneous affine rescaling") {
    DOESeries doe, scaled;
    doe.bus_ids = scaled.bus_ids = {1};
    doe.horizon = scaled.horizon = 2;
    doe.p = {{-1, 0.25, false}, {-0.5, 0.5, false}};
    doe.q = doe.p;
    const double k = 3.5;
    for (const auto& e : doe.p) scaled.p.push_back({e.lower * k, e.upper * k, false});
    scaled.q = scaled.p;

    EnvelopePolicy pol = anrc();
    EnvelopePolicy pol_scaled = pol;
    pol_scaled.x_min *= k;
    pol_scaled.x_max *= k;
    auto a = shrinkage(doe, pol, pol);
    auto b = shrinkage(scaled, pol_scaled, pol_scaled);
    for (std::size_t i = 0; i < a.s_p.size(); ++i) {
        CHECK(a.s_p[i] == doctest::Approx(b.s_p[i]).epsilon(1e-12));
        CHECK(a.s_q[i] == doctest::Approx(b.s_q[i]).epsilon(1e-12));
    }
}

TEST_CASE("anti-monotone in envelope width") {
    EnvelopePolicy pol = anrc();
    double prev = 2.0;
    for (double hi = 1.0; hi >= -1.0; hi -= 0.25) {
        DOESeries doe;
        doe.bus_ids = {1};
        doe.horizon = 1;
        doe.p = {{-1, hi, false}};
        doe.q = {{-1, 1, false}};
        double s = shrinkage(doe, pol, prc()).s_p[0];
        CHECK(s >= 0.0);
        CHECK(s <= 1.0);
        CHECK(s <= 1.0 - (hi + 1.0) / 2.0 + 1e-12);
        CHECK((1.0 - (hi + 1.0) / 2.0) == doctest::Approx(s).epsilon(1e-12));
        (void)prev;
    }
}

TEST_CASE("76-bus run: shrinkage appears exactly where quantiles leave the green band") {
    auto net = load_network(std::string(DOE_DATA_DIR) + "/network76.json");
    auto base = load_profiles(std::string(DOE_DATA_DIR) + "/loads76.csv", &net);
    auto scenarios = generate_scenarios(base, {0.15, 0.0}, 200, 2024);
    auto batch = batch_solve(net, scenarios);
    REQUIRE(batch.non_converged.empty());

    UBands bands;
    auto doe = m1_doe(anrc(), prc(), batch.voltages, {0.05}, &bands);
    auto s = shrinkage(doe, anrc(), prc());

    const double green_lo = 0.92 + 0.04, green_hi = 1.08 - 0.04;
    int shrunk_cells = 0;
    for (std::size_t i = 0; i < s.s_p.size(); ++i) {
        bool band_exit = bands.u_low[i] < green_lo - 1e-9 || bands.u_high[i] > green_hi + 1e-9;
        bool band_inside = bands.u_low[i] >= green_lo && bands.u_high[i] <= green_hi;
        if (band_exit) {
            CHECK(s.s_p[i] > 0.0);
            ++shrunk_cells;
        }
        if (band_inside) CHECK(s.s_p[i] == 0.0);
    }
    // the synthetic feeder is loaded enough that the evening peak binds
    CHECK(shrunk_cells > 0);
}

TEST_CASE("shrinkage CSV export") {
    DOESeries doe;
    doe.bus_ids = {3};
    doe.horizon = 1;
    doe.p = {{-1, 0, false}};
    doe.q = {{-1, 1, false}};
    auto s = shrinkage(doe, anrc(), prc());
    testutil::TempDir dir;
    save_shrinkage(s, dir.file("s.csv"));
    CHECK(testutil::slurp(dir.file("s.csv")) == "bus_id,t,s_p,s_q\n3,0,0.5,0\n");
}
