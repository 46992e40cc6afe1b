#include "doe/powerflow.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "doe/csvio.hpp"

namespace doe {

namespace {

// Tree structure precomputed once per network: BFS order from slack, parent
// pointers, parent-branch impedance per bus.
struct SweepPlan {
    std::vector<int> order;   // bus indices, slack first, parents before children
    std::vector<int> parent;  // bus index of parent, -1 for slack
    std::vector<std::complex<double>> z_parent; // impedance of branch to parent
    int slack = 0;
};

SweepPlan build_plan(const Network& net) {
    const int n = static_cast<int>(net.buses.size());
    SweepPlan plan;
    plan.parent.assign(n, -1);
    plan.z_parent.assign(n, {0.0, 0.0});
    plan.slack = net.bus_index(net.slack_bus);
    if (plan.slack < 0) throw InputError("slack bus id not present in bus list");

    std::multimap<int, std::pair<int, std::complex<double>>> adj;
    for (const auto& br : net.branches) {
        std::complex<double> z{br.r, br.x};
        if (std::abs(z) == 0.0)
            throw InputError("zero-impedance branch " + std::to_string(br.from_bus) + "->" +
                             std::to_string(br.to_bus));
        int a = net.bus_index(br.from_bus);
        int b = net.bus_index(br.to_bus);
        if (a < 0 || b < 0) throw InputError("branch references unknown bus");
        adj.insert({a, {b, z}});
        adj.insert({b, {a, z}});
    }

    std::vector<bool> seen(n, false);
    seen[plan.slack] = true;
    plan.order.push_back(plan.slack);
    for (std::size_t head = 0; head < plan.order.size(); ++head) {
        int u = plan.order[head];
        auto [lo, hi] = adj.equal_range(u);
        for (auto it = lo; it != hi; ++it) {
            auto [v, z] = it->second;
            if (seen[v]) continue;
            seen[v] = true;
            plan.parent[v] = u;
            plan.z_parent[v] = z;
            plan.order.push_back(v);
        }
    }
    if (static_cast<int>(plan.order.size()) != n)
        throw InputError("network is not connected; validate it before solving");
    return plan;
}

VoltageSolution solve_with_plan(const Network& net, const SweepPlan& plan,
                                const LoadSnapshot& loads, const PowerFlowOptions& opts) {
    const int n = static_cast<int>(net.buses.size());
    if (static_cast<int>(loads.size()) != n)
        throw InputError("load snapshot size does not match bus count");

    VoltageSolution sol;
    sol.v.assign(n, {net.slack_voltage, 0.0}); // flat start

    std::vector<std::complex<double>> inj(n);    // load current drawn at each bus
    std::vector<std::complex<double>> branch(n); // current on the branch into each bus

    for (int it = 1; it <= opts.max_iterations; ++it) {
        // Backward: accumulate subtree currents from leaves toward the slack.
        for (int i = 0; i < n; ++i) {
            inj[i] = std::conj(loads[i] / sol.v[i]);
            branch[i] = inj[i];
        }
        for (auto r = plan.order.rbegin(); r != plan.order.rend(); ++r) {
            int u = *r;
            if (plan.parent[u] >= 0) branch[plan.parent[u]] += branch[u];
        }
        // Forward: voltage drops from the slack outward.
        double max_dv = 0.0;
        for (int u : plan.order) {
            if (plan.parent[u] < 0) continue;
            std::complex<double> v_new = sol.v[plan.parent[u]] - plan.z_parent[u] * branch[u];
            max_dv = std::max(max_dv, std::abs(v_new - sol.v[u]));
            sol.v[u] = v_new;
        }
        // Power mismatch at the updated voltages.
        double max_ds = 0.0;
        for (int i = 0; i < n; ++i) {
            if (i == plan.slack) continue;
            max_ds = std::max(max_ds, std::abs(sol.v[i] * std::conj(inj[i]) - loads[i]));
        }
        sol.iterations = it;
        sol.max_mismatch = max_ds;
        if (max_dv <= opts.tolerance && max_ds <= opts.tolerance) {
            sol.converged = true;
            break;
        }
    }
    return sol;
}

} // namespace

VoltageSolution solve(const Network& net, const LoadSnapshot& loads,
                      const PowerFlowOptions& opts) {
    return solve_with_plan(net, build_plan(net), loads, opts);
}

static BatchResult batch_solve_impl(const Network& net, const ScenarioSet& scenarios,
                                    const PowerFlowOptions& opts, bool parallel) {
    const auto plan = build_plan(net);
    const int n_bus = static_cast<int>(net.buses.size());
    const int n_sc = scenarios.n;
    const int T = scenarios.horizon;

    // scenario bus -> network bus index
    std::vector<int> map(scenarios.bus_ids.size());
    for (std::size_t b = 0; b < scenarios.bus_ids.size(); ++b) {
        map[b] = net.bus_index(scenarios.bus_ids[b]);
        if (map[b] < 0)
            throw InputError("scenario bus " + std::to_string(scenarios.bus_ids[b]) +
                             " not in network");
    }

    BatchResult result;
    result.voltages.n = n_sc;
    result.voltages.horizon = T;
    for (const auto& b : net.buses) result.voltages.bus_ids.push_back(b.id);
    result.voltages.v_mag.assign(static_cast<std::size_t>(n_sc) * n_bus * T, 0.0);
    std::vector<double> mismatch(static_cast<std::size_t>(n_sc) * T, -1.0);

#pragma omp parallel for collapse(2) schedule(static) if (parallel)
    for (int s = 0; s < n_sc; ++s) {
        for (int t = 0; t < T; ++t) {
            LoadSnapshot loads(n_bus, {0.0, 0.0});
            for (std::size_t b = 0; b < map.size(); ++b)
                loads[map[b]] = scenarios.at(s, static_cast<int>(b), t);
            auto sol = solve_with_plan(net, plan, loads, opts);
            for (int i = 0; i < n_bus; ++i)
                result.voltages.at(s, i, t) = std::abs(sol.v[i]);
            if (!sol.converged)
                mismatch[static_cast<std::size_t>(s) * T + t] = sol.max_mismatch;
        }
    }
    // Diagnostics ordered by (scenario, t) regardless of scheduling.
    for (int s = 0; s < n_sc; ++s)
        for (int t = 0; t < T; ++t) {
            double m = mismatch[static_cast<std::size_t>(s) * T + t];
            if (m >= 0.0) result.non_converged.push_back({s, t, m});
        }
    return result;
}

BatchResult batch_solve(const Network& net, const ScenarioSet& scenarios,
                        const PowerFlowOptions& opts) {
    return batch_solve_impl(net, scenarios, opts, true);
}

BatchResult batch_solve_serial(const Network& net, const ScenarioSet& scenarios,
                               const PowerFlowOptions& opts) {
    return batch_solve_impl(net, scenarios, opts, false);
}

void save_voltage_scenarios(const VoltageScenarioSet& set, const std::string& path) {
    auto out = csv::open_out(path);
    out << "scenario,bus_id,t,v_mag_pu\n";
    for (int s = 0; s < set.n; ++s)
        for (std::size_t b = 0; b < set.bus_ids.size(); ++b)
            for (int t = 0; t < set.horizon; ++t)
                out << s << "," << set.bus_ids[b] << "," << t << ","
                    << csv::fmt(set.at(s, static_cast<int>(b), t)) << "\n";
}

VoltageScenarioSet load_voltage_scenarios(const std::string& path) {
    auto table = csv::read_file(path);
    int c_s = table.require_column("scenario");
    int c_bus = table.require_column("bus_id");
    int c_t = table.require_column("t");
    int c_v = table.require_column("v_mag_pu");

    std::map<std::tuple<long, int, long>, double> cells;
    std::map<int, int> bus_order;
    long max_s = -1, max_t = -1;
    for (const auto& row : table.rows) {
        long s = csv::to_long(row[c_s], path);
        int bus = static_cast<int>(csv::to_long(row[c_bus], path));
        long t = csv::to_long(row[c_t], path);
        double v = csv::to_double(row[c_v], path);
        if (v <= 0) throw InputError(path + ": non-positive voltage magnitude");
        max_s = std::max(max_s, s);
        max_t = std::max(max_t, t);
        bus_order.emplace(bus, 0);
        if (!cells.emplace(std::make_tuple(s, bus, t), v).second)
            throw InputError(path + ": duplicate voltage cell");
    }
    if (cells.empty()) throw InputError(path + ": no voltage rows");

    VoltageScenarioSet set;
    set.n = static_cast<int>(max_s + 1);
    set.horizon = static_cast<int>(max_t + 1);
    int idx = 0;
    for (auto& [bus, order] : bus_order) {
        order = idx++;
        set.bus_ids.push_back(bus);
    }
    set.v_mag.resize(static_cast<std::size_t>(set.n) * set.bus_ids.size() * set.horizon);
    if (cells.size() != set.v_mag.size())
        throw InputError(path + ": voltage scenario grid is not dense");
    for (const auto& [key, val] : cells) {
        auto [s, bus, t] = key;
        set.at(static_cast<int>(s), bus_order.at(bus), static_cast<int>(t)) = val;
    }
    return set;
}

} // namespace doe
