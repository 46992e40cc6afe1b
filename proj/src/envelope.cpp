#include "doe/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "doe/csvio.hpp"

namespace doe {

void EnvelopePolicy::validate() const {
    if (!(u_min < u_max)) throw InputError("policy: u_min must be < u_max");
    if (!(delta_perm > 0)) throw InputError("policy: delta_perm must be > 0");
    if (!(u_min + delta_perm <= u_max - delta_perm))
        throw InputError("policy: yellow bands overlap (u_min+delta > u_max-delta)");
    if (!(x_min <= x_max)) throw InputError("policy: x_min must be <= x_max");
    if (mode == PolicyMode::Anrc && !(x_min <= 0.0 && 0.0 <= x_max))
        throw InputError("policy: ANRC requires x_min <= 0 <= x_max");
    if (mode == PolicyMode::PrcBanded && !(band >= 0))
        throw InputError("policy: band must be >= 0");
}

Envelope bounds(const EnvelopePolicy& policy, double u) {
    policy.validate();
    if (!(u > 0) || !std::isfinite(u)) throw InputError("bounds: voltage must be positive");

    const double yh0 = policy.u_max - policy.delta_perm; // upper yellow start
    const double yl1 = policy.u_min + policy.delta_perm; // lower yellow end

    if (u >= yl1 && u <= yh0) return {policy.x_min, policy.x_max, false};

    if (u > yh0 && u <= policy.u_max) {
        // clamp: rounding must not push the yellow edge past the red value
        double f = std::clamp((u - yh0) / policy.delta_perm, 0.0, 1.0);
        switch (policy.mode) {
            case PolicyMode::Anrc:
                return {policy.x_min, policy.x_max * (1.0 - f), false};
            case PolicyMode::Prc:
            case PolicyMode::PrcBanded:
                return {policy.x_min, policy.x_max + f * (policy.x_min - policy.x_max), false};
        }
    }
    if (u > policy.u_max) {
        switch (policy.mode) {
            case PolicyMode::Anrc:
                return {policy.x_min, 0.0, false};
            case PolicyMode::Prc:
                return {policy.x_min, policy.x_min, false};
            case PolicyMode::PrcBanded:
                return {policy.x_min, std::min(policy.x_max, policy.x_min + policy.band), false};
        }
    }
    if (u < yl1 && u >= policy.u_min) {
        double f = std::clamp((yl1 - u) / policy.delta_perm, 0.0, 1.0);
        switch (policy.mode) {
            case PolicyMode::Anrc:
                return {policy.x_min * (1.0 - f), policy.x_max, false};
            case PolicyMode::Prc:
            case PolicyMode::PrcBanded:
                return {policy.x_min + f * (policy.x_max - policy.x_min), policy.x_max, false};
        }
    }
    // u < u_min
    switch (policy.mode) {
        case PolicyMode::Anrc:
            return {0.0, policy.x_max, false};
        case PolicyMode::Prc:
            return {policy.x_max, policy.x_max, false};
        case PolicyMode::PrcBanded:
            return {std::max(policy.x_min, policy.x_max - policy.band), policy.x_max, false};
    }
    return {};
}

Envelope intersect(const Envelope& a, const Envelope& b) {
    if (a.empty || b.empty) return {0.0, 0.0, true};
    double lo = std::max(a.lower, b.lower);
    double hi = std::min(a.upper, b.upper);
    if (lo > hi) return {0.0, 0.0, true};
    return {lo, hi, false};
}

DOESeries rt_doe(const EnvelopePolicy& p_policy, const EnvelopePolicy& q_policy,
                 const VoltageSeries& v) {
    p_policy.validate();
    q_policy.validate();
    DOESeries doe;
    doe.bus_ids = v.bus_ids;
    doe.horizon = v.horizon;
    doe.p.resize(v.v.size());
    doe.q.resize(v.v.size());
    for (std::size_t b = 0; b < v.bus_ids.size(); ++b)
        for (int t = 0; t < v.horizon; ++t) {
            double u = v.at(static_cast<int>(b), t);
            auto i = doe.idx(static_cast<int>(b), t);
            doe.p[i] = bounds(p_policy, u);
            doe.q[i] = bounds(q_policy, u);
        }
    return doe;
}

void save_doe(const DOESeries& doe, const std::string& path) {
    auto out = csv::open_out(path);
    out << "bus_id,t,p_lo,p_hi,q_lo,q_hi,empty\n";
    for (std::size_t b = 0; b < doe.bus_ids.size(); ++b)
        for (int t = 0; t < doe.horizon; ++t) {
            auto i = doe.idx(static_cast<int>(b), t);
            const auto& p = doe.p[i];
            const auto& q = doe.q[i];
            bool empty = p.empty || q.empty;
            if (empty)
                out << doe.bus_ids[b] << "," << t << ",0,0,0,0,1\n";
            else
                out << doe.bus_ids[b] << "," << t << "," << csv::fmt(p.lower) << ","
                    << csv::fmt(p.upper) << "," << csv::fmt(q.lower) << "," << csv::fmt(q.upper)
                    << ",0\n";
        }
}

DOESeries load_doe(const std::string& path) {
    auto table = csv::read_file(path);
    int c_bus = table.require_column("bus_id");
    int c_t = table.require_column("t");
    int c_plo = table.require_column("p_lo");
    int c_phi = table.require_column("p_hi");
    int c_qlo = table.require_column("q_lo");
    int c_qhi = table.require_column("q_hi");
    int c_e = table.require_column("empty");

    struct Cell {
        Envelope p, q;
    };
    std::map<std::pair<int, long>, Cell> cells;
    long max_t = -1;
    std::map<int, int> bus_order;
    for (const auto& row : table.rows) {
        int bus = static_cast<int>(csv::to_long(row[c_bus], path));
        long t = csv::to_long(row[c_t], path);
        long e = csv::to_long(row[c_e], path);
        Cell c;
        if (e != 0) {
            c.p = {0.0, 0.0, true};
            c.q = {0.0, 0.0, true};
        } else {
            c.p = {csv::to_double(row[c_plo], path), csv::to_double(row[c_phi], path), false};
            c.q = {csv::to_double(row[c_qlo], path), csv::to_double(row[c_qhi], path), false};
        }
        max_t = std::max(max_t, t);
        bus_order.emplace(bus, 0);
        if (!cells.emplace(std::make_pair(bus, t), c).second)
            throw InputError(path + ": duplicate DOE cell");
    }
    if (cells.empty()) throw InputError(path + ": no DOE rows");

    DOESeries doe;
    doe.horizon = static_cast<int>(max_t + 1);
    int idx = 0;
    for (auto& [bus, order] : bus_order) {
        order = idx++;
        doe.bus_ids.push_back(bus);
    }
    doe.p.resize(doe.bus_ids.size() * doe.horizon);
    doe.q.resize(doe.bus_ids.size() * doe.horizon);
    if (cells.size() != doe.p.size()) throw InputError(path + ": DOE grid is not dense");
    for (const auto& [key, c] : cells) {
        auto i = doe.idx(bus_order.at(key.first), static_cast<int>(key.second));
        doe.p[i] = c.p;
        doe.q[i] = c.q;
    }
    return doe;
}

VoltageSeries load_voltage_series(const std::string& path) {
    auto table = csv::read_file(path);
    int c_bus = table.require_column("bus_id");
    int c_t = table.require_column("t");
    int c_v = table.require_column("v_mag_pu");

    std::map<std::pair<int, long>, double> cells;
    std::map<int, int> bus_order;
    long max_t = -1;
    for (const auto& row : table.rows) {
        int bus = static_cast<int>(csv::to_long(row[c_bus], path));
        long t = csv::to_long(row[c_t], path);
        double v = csv::to_double(row[c_v], path);
        if (!(v > 0)) throw InputError(path + ": voltage must be strictly positive (bus " +
                                       std::to_string(bus) + ", t " + std::to_string(t) + ")");
        max_t = std::max(max_t, t);
        bus_order.emplace(bus, 0);
        if (!cells.emplace(std::make_pair(bus, t), v).second)
            throw InputError(path + ": duplicate voltage row");
    }
    if (cells.empty()) throw InputError(path + ": no voltage rows");

    VoltageSeries vs;
    vs.horizon = static_cast<int>(max_t + 1);
    int idx = 0;
    for (auto& [bus, order] : bus_order) {
        order = idx++;
        vs.bus_ids.push_back(bus);
    }
    vs.v.resize(vs.bus_ids.size() * vs.horizon);
    if (cells.size() != vs.v.size()) throw InputError(path + ": voltage series is not dense");
    for (const auto& [key, v] : cells)
        vs.v[static_cast<std::size_t>(bus_order.at(key.first)) * vs.horizon + key.second] = v;
    return vs;
}

void save_voltage_series(const VoltageSeries& v, const std::string& path) {
    auto out = csv::open_out(path);
    out << "bus_id,t,v_mag_pu\n";
    for (std::size_t b = 0; b < v.bus_ids.size(); ++b)
        for (int t = 0; t < v.horizon; ++t)
            out << v.bus_ids[b] << "," << t << "," << csv::fmt(v.at(static_cast<int>(b), t))
                << "\n";
}

} // namespace doe
