#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "doe/netmodel.hpp"

namespace doe {

// Counter-based random stream: every draw is a pure function of
// (key, counter), so cells can be generated in any order or in parallel and
// always produce the same values.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t s, std::uint64_t i, std::uint64_t t);

    double next_unit();                       // uniform in (0,1)
    double next_truncated_gaussian(double mean, double sd, double lower);

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

struct NoiseConfig {
    double sigma = 0.15; // relative sd of the multiplicative noise
    double floor = 0.0;  // lower truncation of the multiplier
};

struct ScenarioSet {
    int n = 0;
    std::uint64_t seed = 0;
    std::vector<int> bus_ids;
    int horizon = 0;
    // flat (scenario, bus, t), consumption-positive
    std::vector<std::complex<double>> profiles;

    std::complex<double>& at(int s, int bus, int t) {
        return profiles[(static_cast<std::size_t>(s) * bus_ids.size() + bus) * horizon + t];
    }
    const std::complex<double>& at(int s, int bus, int t) const {
        return profiles[(static_cast<std::size_t>(s) * bus_ids.size() + bus) * horizon + t];
    }
};

// Multiplicative truncated-Gaussian noise around the base profiles. The
// multiplier for cell (s, bus, t) is keyed on (seed, s, bus_id, t), never on
// generation order.
ScenarioSet generate_scenarios(const std::vector<LoadProfile>& base, const NoiseConfig& cfg,
                               int n, std::uint64_t seed);

// CSV `scenario,bus_id,t,p_pu,q_pu`.
void save_scenarios(const ScenarioSet& set, const std::string& path);
ScenarioSet load_scenarios(const std::string& path);

} // namespace doe
