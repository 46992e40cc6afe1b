#pragma once

#include <string>
#include <vector>

#include "doe/errors.hpp"

namespace doe {

enum class PolicyMode {
    Anrc,       // forbid only voltage-worsening directions (clamp one bound to 0)
    Prc,        // collapse toward the voltage-correcting limit
    PrcBanded,  // experimental non-monotone PRC variant (see EnvelopePolicy::band)
};

// Piecewise P(U)/Q(U) projection parameters. Power is injection-positive
// here; netmodel loads are consumption-positive, the CLI negates at the
// boundary.
struct EnvelopePolicy {
    double u_min = 0.92;
    double u_max = 1.08;
    double delta_perm = 0.04;
    double x_min = -1.0;
    double x_max = 1.0;
    PolicyMode mode = PolicyMode::Anrc;
    // PrcBanded only: in the red zone the envelope re-opens to a band of this
    // width above the corrective limit, which makes the bounds non-monotone.
    double band = 0.2;

    void validate() const; // throws InputError on broken invariants
    bool operator==(const EnvelopePolicy&) const = default;
};

struct Envelope {
    double lower = 0.0;
    double upper = 0.0;
    bool empty = false;

    double width() const { return empty ? 0.0 : upper - lower; }
    bool operator==(const Envelope&) const = default;
};

// Feasible [lower, upper] power range at voltage u. Zones: green inside
// [u_min+delta, u_max-delta] keeps the full range; the yellow bands shrink it
// linearly; beyond u_min/u_max the range clamps (never an error, never NaN).
Envelope bounds(const EnvelopePolicy& policy, double u);

Envelope intersect(const Envelope& a, const Envelope& b);

struct DOESeries {
    std::vector<int> bus_ids;
    int horizon = 0;
    std::vector<Envelope> p; // flat (bus, t)
    std::vector<Envelope> q;

    std::size_t idx(int bus, int t) const {
        return static_cast<std::size_t>(bus) * horizon + t;
    }
};

// Per-bus measured voltage series, e.g. parsed from `bus_id,t,v_mag_pu`.
struct VoltageSeries {
    std::vector<int> bus_ids;
    int horizon = 0;
    std::vector<double> v; // flat (bus, t)

    double at(int bus, int t) const {
        return v[static_cast<std::size_t>(bus) * horizon + t];
    }
};

// Real-time DOE: element-wise bounds() over the measured series. Strictly
// local per bus; no topology input exists on this path.
DOESeries rt_doe(const EnvelopePolicy& p_policy, const EnvelopePolicy& q_policy,
                 const VoltageSeries& v);

// CSV `bus_id,t,p_lo,p_hi,q_lo,q_hi,empty`; empty rows carry zeros + flag.
void save_doe(const DOESeries& doe, const std::string& path);
DOESeries load_doe(const std::string& path);

// CSV `bus_id,t,v_mag_pu`.
VoltageSeries load_voltage_series(const std::string& path);
void save_voltage_series(const VoltageSeries& v, const std::string& path);

} // namespace doe
