#pragma once

#include <complex>
#include <string>
#include <vector>

#include "doe/netmodel.hpp"
#include "doe/scenario.hpp"

namespace doe {

struct PowerFlowOptions {
    double tolerance = 1e-8; // pu power mismatch
    int max_iterations = 100;
};

struct VoltageSolution {
    std::vector<std::complex<double>> v; // per bus index, pu
    bool converged = false;
    int iterations = 0;
    double max_mismatch = 0.0; // pu
};

// Per-bus consumption snapshot, indexed like net.buses.
using LoadSnapshot = std::vector<std::complex<double>>;

// Backward-forward sweep (current summation) from a flat start. Non-converged
// runs return converged=false; a zero-impedance branch throws InputError.
VoltageSolution solve(const Network& net, const LoadSnapshot& loads,
                      const PowerFlowOptions& opts = {});

struct VoltageScenarioSet {
    int n = 0;
    std::vector<int> bus_ids;
    int horizon = 0;
    std::vector<double> v_mag; // flat (scenario, bus, t), pu

    double& at(int s, int bus, int t) {
        return v_mag[(static_cast<std::size_t>(s) * bus_ids.size() + bus) * horizon + t];
    }
    double at(int s, int bus, int t) const {
        return v_mag[(static_cast<std::size_t>(s) * bus_ids.size() + bus) * horizon + t];
    }
};

struct CellDiagnostic {
    int scenario = 0;
    int t = 0;
    double max_mismatch = 0.0;
};

struct BatchResult {
    VoltageScenarioSet voltages;
    std::vector<CellDiagnostic> non_converged; // ordered by (scenario, t)
};

// Solves every (scenario, t) snapshot. Cells are independent, so the parallel
// version partitions them across OpenMP threads; output layout is fixed by
// index and bit-identical to the serial reference for any thread count.
BatchResult batch_solve(const Network& net, const ScenarioSet& scenarios,
                        const PowerFlowOptions& opts = {});
BatchResult batch_solve_serial(const Network& net, const ScenarioSet& scenarios,
                               const PowerFlowOptions& opts = {});

// CSV `scenario,bus_id,t,v_mag_pu`.
void save_voltage_scenarios(const VoltageScenarioSet& set, const std::string& path);
VoltageScenarioSet load_voltage_scenarios(const std::string& path);

} // namespace doe
