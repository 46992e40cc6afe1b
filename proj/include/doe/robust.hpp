#pragma once

#include <span>
#include <string>
#include <vector>

#include "doe/envelope.hpp"
#include "doe/powerflow.hpp"

namespace doe {

struct CCConfig {
    double alpha = 0.05; // chance-constraint level in (0,1)
    // Default: alpha/2 per tail (U_L at alpha/2, U_H at 1-alpha/2). One-sided
    // puts the full alpha on each tail instead.
    bool one_sided = false;

    void validate() const;
    double lower_q() const { return one_sided ? alpha : alpha / 2.0; }
    double upper_q() const { return one_sided ? 1.0 - alpha : 1.0 - alpha / 2.0; }
};

// Order-statistic quantile: x_(k) with k = max(1, ceil(q*n)) over the sorted
// samples. Throws InputError on an empty sample list.
double ecdf_quantile(std::span<const double> samples, double q);

// Per-node voltage bands [U_L, U_H] used by M1 (the communicated artifact).
struct UBands {
    std::vector<int> bus_ids;
    int horizon = 0;
    std::vector<double> u_low;  // flat (bus, t)
    std::vector<double> u_high;
};

// M1: chance constraint on voltages. Per (bus, t) the ECDF quantiles give
// [U_L, U_H]; the DOE is bounds(U_L) ∩ bounds(U_H).
DOESeries m1_doe(const EnvelopePolicy& policy_p, const EnvelopePolicy& policy_q,
                 const VoltageScenarioSet& v, const CCConfig& cc,
                 UBands* bands_out = nullptr);

// M2: chance constraint on envelopes. Per (bus, t) bounds() is evaluated for
// every scenario, then the robust upper is the low-tail quantile of the
// per-scenario uppers and the robust lower the high-tail quantile of the
// lowers.
DOESeries m2_doe(const EnvelopePolicy& policy_p, const EnvelopePolicy& policy_q,
                 const VoltageScenarioSet& v, const CCConfig& cc,
                 bool parallel = true);

struct EnvelopeError {
    double delta_p = 0.0;
    double delta_q = 0.0;
    // Cells where either series has an empty envelope are excluded from the
    // sums rather than given a fabricated width.
    int excluded_p = 0;
    int excluded_q = 0;
};

// Sum over (bus, t) of |a.lo - b.lo| + |a.hi - b.hi|, for P and Q separately.
EnvelopeError envelope_error(const DOESeries& a, const DOESeries& b);

struct BenchmarkReport {
    int n_scenarios = 0;
    int n_buses = 0;
    int horizon = 0;
    int repetitions = 0;
    std::vector<double> m1_samples_ms;
    std::vector<double> m2_samples_ms;
    double m1_ms = 0.0; // totals over all repetitions
    double m2_ms = 0.0;
    double ratio = 0.0; // m2_ms / m1_ms
    int m1_series_per_node = 2;
    int m2_series_per_node = 0; // = n_scenarios
};

// Wall-clock comparison of m1_doe vs m2_doe on identical in-memory inputs,
// one discarded warm-up run each, single worker by default so the ratio is
// hardware-meaningful.
BenchmarkReport benchmark(const EnvelopePolicy& policy_p, const EnvelopePolicy& policy_q,
                          const VoltageScenarioSet& v, const CCConfig& cc,
                          int repetitions, bool parallel_m2 = false);

// CSV `bus_id,t,u_low_pu,u_high_pu`.
void save_u_bands(const UBands& bands, const std::string& path);

// JSON report with the fields above.
void save_benchmark_report(const BenchmarkReport& report, const std::string& path);

} // namespace doe
