#pragma once

#include <string>
#include <vector>

#include "doe/errors.hpp"

namespace doe {

struct Bus {
    int id = 0;
    std::string name;
    bool has_load = false;
    bool slack = false;
};

struct Branch {
    int from_bus = 0;
    int to_bus = 0;
    double r = 0.0; // pu
    double x = 0.0; // pu
};

struct BaseValues {
    double v_base_kv = 1.0;
    double s_base_kva = 1.0;
};

// Radial per-unit network. Immutable after load_network/validate; safe for
// concurrent reads.
struct Network {
    std::vector<Bus> buses;
    std::vector<Branch> branches;
    int slack_bus = 0;
    double slack_voltage = 1.0; // pu magnitude
    BaseValues base;

    int bus_index(int bus_id) const; // -1 if unknown
};

// Active/reactive consumption series for one bus, consumption-positive.
struct LoadProfile {
    int bus_id = 0;
    std::vector<double> p; // pu per timestep
    std::vector<double> q;
};

struct Violation {
    std::string what;
};

// Structural checks: connected, acyclic, |branches| = |buses|-1, unique ids,
// single slack, branch endpoints valid, nonnegative impedances.
std::vector<Violation> validate_radial(const Network& net);

// Parses the JSON network file and validates it. Throws InputError on parse
// or validation failure.
Network load_network(const std::string& path);
void save_network(const Network& net, const std::string& path);

// CSV `bus_id,t,p_pu,q_pu`; all buses must share the same horizon T and exist
// in the network when one is given (pass nullptr to skip the check).
std::vector<LoadProfile> load_profiles(const std::string& path, const Network* net);
void save_profiles(const std::vector<LoadProfile>& profiles, const std::string& path);

} // namespace doe
