#include "doe/robust.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "doe/csvio.hpp"
#include "json.hpp"

namespace doe {

void CCConfig::validate() const {
    if (!(alpha > 0 && alpha < 1)) throw InputError("chance-constraint alpha must be in (0,1)");
}

namespace {

// k = max(1, ceil(q*n)), with a small backoff so that q*n landing on an
// integer is not pushed up by floating-point noise.
std::size_t quantile_index(std::size_t n, double q) {
    double k = std::ceil(q * static_cast<double>(n) - 1e-9);
    if (k < 1.0) k = 1.0;
    if (k > static_cast<double>(n)) k = static_cast<double>(n);
    return static_cast<std::size_t>(k);
}

double quantile_inplace(std::vector<double>& buf, double q) {
    std::size_t k = quantile_index(buf.size(), q);
    std::nth_element(buf.begin(), buf.begin() + (k - 1), buf.end());
    return buf[k - 1];
}

} // namespace

double ecdf_quantile(std::span<const double> samples, double q) {
    if (samples.empty()) throw InputError("ecdf_quantile: empty sample list");
    if (!(q >= 0 && q <= 1)) throw InputError("ecdf_quantile: q must be in [0,1]");
    std::vector<double> buf(samples.begin(), samples.end());
    return quantile_inplace(buf, q);
}

DOESeries m1_doe(const EnvelopePolicy& policy_p, const EnvelopePolicy& policy_q,
                 const VoltageScenarioSet& v, const CCConfig& cc, UBands* bands_out) {
    policy_p.validate();
    policy_q.validate();
    cc.validate();
    const int n_bus = static_cast<int>(v.bus_ids.size());
    const int T = v.horizon;

    DOESeries doe;
    doe.bus_ids = v.bus_ids;
    doe.horizon = T;
    doe.p.resize(static_cast<std::size_t>(n_bus) * T);
    doe.q.resize(doe.p.size());
    if (bands_out) {
        bands_out->bus_ids = v.bus_ids;
        bands_out->horizon = T;
        bands_out->u_low.resize(doe.p.size());
        bands_out->u_high.resize(doe.p.size());
    }

    std::vector<double> samples(v.n);
    for (int b = 0; b < n_bus; ++b)
        for (int t = 0; t < T; ++t) {
            for (int s = 0; s < v.n; ++s) samples[s] = v.at(s, b, t);
            double u_low = quantile_inplace(samples, cc.lower_q());
            double u_high = quantile_inplace(samples, cc.upper_q());
            auto i = doe.idx(b, t);
            doe.p[i] = intersect(bounds(policy_p, u_low), bounds(policy_p, u_high));
            doe.q[i] = intersect(bounds(policy_q, u_low), bounds(policy_q, u_high));
            if (bands_out) {
                bands_out->u_low[i] = u_low;
                bands_out->u_high[i] = u_high;
            }
        }
    return doe;
}

DOESeries m2_doe(const EnvelopePolicy& policy_p, const EnvelopePolicy& policy_q,
                 const VoltageScenarioSet& v, const CCConfig& cc, bool parallel) {
    policy_p.validate();
    policy_q.validate();
    cc.validate();
    const int n_bus = static_cast<int>(v.bus_ids.size());
    const int T = v.horizon;

    DOESeries doe;
    doe.bus_ids = v.bus_ids;
    doe.horizon = T;
    doe.p.resize(static_cast<std::size_t>(n_bus) * T);
    doe.q.resize(doe.p.size());

    const std::size_t cells = doe.p.size();
#pragma omp parallel if (parallel)
    {
        std::vector<double> lo_p(v.n), hi_p(v.n), lo_q(v.n), hi_q(v.n);
#pragma omp for schedule(static)
        for (std::size_t c = 0; c < cells; ++c) {
            int b = static_cast<int>(c / T);
            int t = static_cast<int>(c % T);
            for (int s = 0; s < v.n; ++s) {
                double u = v.at(s, b, t);
                Envelope ep = bounds(policy_p, u);
                Envelope eq = bounds(policy_q, u);
                lo_p[s] = ep.lower;
                hi_p[s] = ep.upper;
                lo_q[s] = eq.lower;
                hi_q[s] = eq.upper;
            }
            // conservative tails: low quantile of uppers, high quantile of lowers
            double p_hi = quantile_inplace(hi_p, cc.lower_q());
            double p_lo = quantile_inplace(lo_p, cc.upper_q());
            double q_hi = quantile_inplace(hi_q, cc.lower_q());
            double q_lo = quantile_inplace(lo_q, cc.upper_q());
            doe.p[c] = (p_lo > p_hi) ? Envelope{0.0, 0.0, true} : Envelope{p_lo, p_hi, false};
            doe.q[c] = (q_lo > q_hi) ? Envelope{0.0, 0.0, true} : Envelope{q_lo, q_hi, false};
        }
    }
    return doe;
}

EnvelopeError envelope_error(const DOESeries& a, const DOESeries& b) {
    if (a.bus_ids != b.bus_ids || a.horizon != b.horizon)
        throw InputError("envelope_error: DOE series index sets differ");
    EnvelopeError err;
    for (std::size_t i = 0; i < a.p.size(); ++i) {
        if (a.p[i].empty || b.p[i].empty) {
            ++err.excluded_p;
        } else {
            err.delta_p += std::abs(a.p[i].lower - b.p[i].lower) +
                           std::abs(a.p[i].upper - b.p[i].upper);
        }
        if (a.q[i].empty || b.q[i].empty) {
            ++err.excluded_q;
        } else {
            err.delta_q += std::abs(a.q[i].lower - b.q[i].lower) +
                           std::abs(a.q[i].upper - b.q[i].upper);
        }
    }
    return err;
}

BenchmarkReport benchmark(const EnvelopePolicy& policy_p, const EnvelopePolicy& policy_q,
                          const VoltageScenarioSet& v, const CCConfig& cc, int repetitions,
                          bool parallel_m2) {
    if (repetitions < 1) throw InputError("benchmark: repetitions must be >= 1");
    using clock = std::chrono::steady_clock;
    auto ms = [](clock::time_point a, clock::time_point b) {
        return std::chrono::duration<double, std::milli>(b - a).count();
    };

    BenchmarkReport report;
    report.n_scenarios = v.n;
    report.n_buses = static_cast<int>(v.bus_ids.size());
    report.horizon = v.horizon;
    report.repetitions = repetitions;
    report.m2_series_per_node = v.n;

    // one discarded warm-up run each
    (void)m1_doe(policy_p, policy_q, v, cc);
    (void)m2_doe(policy_p, policy_q, v, cc, parallel_m2);

    for (int r = 0; r < repetitions; ++r) {
        auto t0 = clock::now();
        (void)m1_doe(policy_p, policy_q, v, cc);
        auto t1 = clock::now();
        (void)m2_doe(policy_p, policy_q, v, cc, parallel_m2);
        auto t2 = clock::now();
        report.m1_samples_ms.push_back(ms(t0, t1));
        report.m2_samples_ms.push_back(ms(t1, t2));
        report.m1_ms += report.m1_samples_ms.back();
        report.m2_ms += report.m2_samples_ms.back();
    }
    report.ratio = report.m1_ms > 0 ? report.m2_ms / report.m1_ms : 0.0;
    return report;
}

void save_u_bands(const UBands& bands, const std::string& path) {
    auto out = csv::open_out(path);
    out << "bus_id,t,u_low_pu,u_high_pu\n";
    for (std::size_t b = 0; b < bands.bus_ids.size(); ++b)
        for (int t = 0; t < bands.horizon; ++t) {
            auto i = static_cast<std::size_t>(b) * bands.horizon + t;
            out << bands.bus_ids[b] << "," << t << "," << csv::fmt(bands.u_low[i]) << ","
                << csv::fmt(bands.u_high[i]) << "\n";
        }
}

void save_benchmark_report(const BenchmarkReport& report, const std::string& path) {
    nlohmann::json j;
    j["n_scenarios"] = report.n_scenarios;
    j["n_buses"] = report.n_buses;
    j["horizon"] = report.horizon;
    j["repetitions"] = report.repetitions;
    j["m1_ms"] = report.m1_ms;
    j["m2_ms"] = report.m2_ms;
    j["ratio"] = report.ratio;
    j["m1_series_per_node"] = report.m1_series_per_node;
    j["m2_series_per_node"] = report.m2_series_per_node;
    j["m1_samples_ms"] = report.m1_samples_ms;
    j["m2_samples_ms"] = report.m2_samples_ms;
    auto out = csv::open_out(path);
    out << j.dump(2) << "\n";
}

} // namespace doe
