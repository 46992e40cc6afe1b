#include "doe/fnaproxy.hpp"

#include <algorithm>

#include "doe/csvio.hpp"

namespace doe {

ShrinkageSeries shrinkage(const DOESeries& doe, const EnvelopePolicy& policy_p,
                          const EnvelopePolicy& policy_q) {
    if (!(policy_p.x_max > policy_p.x_min) || !(policy_q.x_max > policy_q.x_min))
        throw InputError("shrinkage: policy range is degenerate");

    ShrinkageSeries s;
    s.bus_ids = doe.bus_ids;
    s.horizon = doe.horizon;
    s.s_p.resize(doe.p.size());
    s.s_q.resize(doe.q.size());
    const double wp = policy_p.x_max - policy_p.x_min;
    const double wq = policy_q.x_max - policy_q.x_min;
    for (std::size_t i = 0; i < doe.p.size(); ++i) {
        s.s_p[i] = std::clamp(1.0 - doe.p[i].width() / wp, 0.0, 1.0);
        s.s_q[i] = std::clamp(1.0 - doe.q[i].width() / wq, 0.0, 1.0);
    }
    return s;
}

void save_shrinkage(const ShrinkageSeries& s, const std::string& path) {
    auto out = csv::open_out(path);
    out << "bus_id,t,s_p,s_q\n";
    for (std::size_t b = 0; b < s.bus_ids.size(); ++b)
        for (int t = 0; t < s.horizon; ++t) {
            auto i = static_cast<std::size_t>(b) * s.horizon + t;
            out << s.bus_ids[b] << "," << t << "," << csv::fmt(s.s_p[i]) << ","
                << csv::fmt(s.s_q[i]) << "\n";
        }
}

} // namespace doe
