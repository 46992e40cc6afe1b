#include "doe/netmodel.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <queue>
#include <set>

#include "doe/csvio.hpp"
#include "json.hpp"

namespace doe {

int Network::bus_index(int bus_id) const {
    for (std::size_t i = 0; i < buses.size(); ++i)
        if (buses[i].id == bus_id) return static_cast<int>(i);
    return -1;
}

std::vector<Violation> validate_radial(const Network& net) {
    std::vector<Violation> out;
    auto add = [&](std::string msg) { out.push_back({std::move(msg)}); };

    if (net.buses.empty()) {
        add("network has no buses");
        return out;
    }

    std::set<int> ids;
    int slack_count = 0;
    for (const auto& b : net.buses) {
        if (!ids.insert(b.id).second) add("duplicate bus id " + std::to_string(b.id));
        if (b.slack) ++slack_count;
    }
    if (slack_count == 0) add("no slack bus designated");
    if (slack_count > 1) add("multiple slack buses designated");
    if (slack_count == 1) {
        const auto it = std::find_if(net.buses.begin(), net.buses.end(),
                                     [](const Bus& b) { return b.slack; });
        if (it->id != net.slack_bus)
            add("slack_bus field does not match the bus marked slack");
    }

    for (const auto& br : net.branches) {
        if (!ids.count(br.from_bus) || !ids.count(br.to_bus))
            add("branch " + std::to_string(br.from_bus) + "->" + std::to_string(br.to_bus) +
                " references unknown bus");
        if (br.from_bus == br.to_bus)
            add("branch self-loop at bus " + std::to_string(br.from_bus));
        if (br.r < 0 || br.x < 0)
            add("negative impedance on branch " + std::to_string(br.from_bus) + "->" +
                std::to_string(br.to_bus));
        if (br.r == 0 && br.x == 0)
            add("zero-impedance branch " + std::to_string(br.from_bus) + "->" +
                std::to_string(br.to_bus));
    }

    if (net.branches.size() != net.buses.size() - 1)
        add("branch count " + std::to_string(net.branches.size()) + " != bus count - 1 = " +
            std::to_string(net.buses.size() - 1));

    // BFS from slack over the undirected branch graph.
    if (slack_count == 1 && ids.count(net.slack_bus)) {
        std::multimap<int, int> adj;
        for (const auto& br : net.branches) {
            adj.insert({br.from_bus, br.to_bus});
            adj.insert({br.to_bus, br.from_bus});
        }
        std::set<int> seen{net.slack_bus};
        std::queue<int> frontier;
        frontier.push(net.slack_bus);
        while (!frontier.empty()) {
            int u = frontier.front();
            frontier.pop();
            auto [lo, hi] = adj.equal_range(u);
            for (auto it = lo; it != hi; ++it)
                if (seen.insert(it->second).second) frontier.push(it->second);
        }
        if (seen.size() != net.buses.size())
            add("network disconnected: BFS from slack reaches " + std::to_string(seen.size()) +
                " of " + std::to_string(net.buses.size()) + " buses");
        // Connected + |E| = |V|-1 already implies acyclic; flag the cycle case
        // explicitly when both hold for the reachable component.
        if (seen.size() == net.buses.size() && net.branches.size() >= net.buses.size())
            add("network contains a cycle");
    }
    return out;
}

Network load_network(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open network file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputError("network file parse error (" + path + "): " + e.what());
    }
    Network net;
    try {
        for (const auto& jb : j.at("buses")) {
            Bus b;
            b.id = jb.at("id").get<int>();
            b.name = jb.value("name", std::string{});
            b.slack = jb.value("slack", false);
            if (b.slack) net.slack_bus = b.id;
            net.buses.push_back(std::move(b));
        }
        for (const auto& jb : j.at("branches")) {
            Branch br;
            br.from_bus = jb.at("from").get<int>();
            br.to_bus = jb.at("to").get<int>();
            br.r = jb.at("r_pu").get<double>();
            br.x = jb.at("x_pu").get<double>();
            net.branches.push_back(br);
        }
        if (j.contains("base")) {
            net.base.v_base_kv = j["base"].value("v_base_kv", 1.0);
            net.base.s_base_kva = j["base"].value("s_base_kva", 1.0);
        }
        net.slack_voltage = j.value("slack_voltage_pu", 1.0);
    } catch (const nlohmann::json::exception& e) {
        throw InputError("network file schema error (" + path + "): " + e.what());
    }

    auto violations = validate_radial(net);
    if (!violations.empty()) {
        std::string msg = "network validation failed (" + path + "):";
        for (const auto& v : violations) msg += "\n  - " + v.what;
        throw InputError(msg);
    }
    return net;
}

void save_network(const Network& net, const std::string& path) {
    nlohmann::json j;
    j["buses"] = nlohmann::json::array();
    for (const auto& b : net.buses)
        j["buses"].push_back({{"id", b.id}, {"name", b.name}, {"slack", b.slack}});
    j["branches"] = nlohmann::json::array();
    for (const auto& br : net.branches)
        j["branches"].push_back(
            {{"from", br.from_bus}, {"to", br.to_bus}, {"r_pu", br.r}, {"x_pu", br.x}});
    j["base"] = {{"v_base_kv", net.base.v_base_kv}, {"s_base_kva", net.base.s_base_kva}};
    j["slack_voltage_pu"] = net.slack_voltage;
    auto out = csv::open_out(path);
    out << j.dump(2) << "\n";
}

std::vector<LoadProfile> load_profiles(const std::string& path, const Network* net) {
    auto table = csv::read_file(path);
    int c_bus = table.require_column("bus_id");
    int c_t = table.require_column("t");
    int c_p = table.require_column("p_pu");
    int c_q = table.require_column("q_pu");

    std::map<int, std::map<long, std::pair<double, double>>> by_bus;
    for (const auto& row : table.rows) {
        int bus = static_cast<int>(csv::to_long(row[c_bus], path));
        long t = csv::to_long(row[c_t], path);
        if (t < 0) throw InputError(path + ": negative timestep " + std::to_string(t));
        double p = csv::to_double(row[c_p], path);
        double q = csv::to_double(row[c_q], path);
        if (!by_bus[bus].emplace(t, std::make_pair(p, q)).second)
            throw InputError(path + ": duplicate (bus " + std::to_string(bus) + ", t " +
                             std::to_string(t) + ")");
    }
    if (by_bus.empty()) throw InputError(path + ": no load rows");

    long horizon = -1;
    std::vector<LoadProfile> profiles;
    for (auto& [bus, series] : by_bus) {
        if (net && net->bus_index(bus) < 0)
            throw InputError(path + ": bus " + std::to_string(bus) + " not in network");
        long tmax = series.rbegin()->first;
        if (static_cast<long>(series.size()) != tmax + 1)
            throw InputError(path + ": bus " + std::to_string(bus) +
                             " has gaps in its timestep series");
        if (horizon < 0) horizon = tmax + 1;
        if (tmax + 1 != horizon)
            throw InputError(path + ": bus " + std::to_string(bus) +
                             " horizon differs from other buses");
        LoadProfile lp;
        lp.bus_id = bus;
        for (auto& [t, pq] : series) {
            lp.p.push_back(pq.first);
            lp.q.push_back(pq.second);
        }
        profiles.push_back(std::move(lp));
    }
    return profiles;
}

void save_profiles(const std::vector<LoadProfile>& profiles, const std::string& path) {
    auto out = csv::open_out(path);
    out << "bus_id,t,p_pu,q_pu\n";
    for (const auto& lp : profiles)
        for (std::size_t t = 0; t < lp.p.size(); ++t)
            out << lp.bus_id << "," << t << "," << csv::fmt(lp.p[t]) << "," << csv::fmt(lp.q[t])
                << "\n";
}

} // namespace doe
