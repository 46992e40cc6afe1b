#pragma once

#include <string>
#include <vector>

#include "doe/envelope.hpp"

namespace doe {

// Relative width reduction of each envelope: 0 = full range, 1 = empty or
// single point. Used as the flexibility-need indicator exported for external
// comparison.
struct ShrinkageSeries {
    std::vector<int> bus_ids;
    int horizon = 0;
    std::vector<double> s_p; // flat (bus, t), each in [0,1]
    std::vector<double> s_q;
};

// s = 1 - width(envelope) / (x_max - x_min); empty envelopes give s = 1.
// Throws InputError when a policy range is degenerate (x_max == x_min).
ShrinkageSeries shrinkage(const DOESeries& doe, const EnvelopePolicy& policy_p,
                          const EnvelopePolicy& policy_q);

// CSV `bus_id,t,s_p,s_q`.
void save_shrinkage(const ShrinkageSeries& s, const std::string& path);

} // namespace doe
