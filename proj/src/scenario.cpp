#include "doe/scenario.hpp"

#include <cmath>
#include <map>
#include <numbers>

#include "doe/csvio.hpp"

namespace doe {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t splitmix64(std::uint64_t z) {
    z += kGolden;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t s, std::uint64_t i, std::uint64_t t) {
    std::uint64_t k = splitmix64(seed);
    k = splitmix64(k ^ s);
    k = splitmix64(k ^ i);
    k = splitmix64(k ^ t);
    key_ = k;
}

double CounterRng::next_unit() {
    std::uint64_t bits = splitmix64(key_ + counter_ * kGolden);
    ++counter_;
    // 53 random bits, shifted into (0,1); +0.5 keeps the draw strictly positive
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::next_truncated_gaussian(double mean, double sd, double lower) {
    if (sd == 0.0) return std::max(mean, lower);
    for (;;) {
        double u1 = next_unit();
        double u2 = next_unit();
        double z = std::sqrt(-2.0 * std::log(u1)) *
                   std::cos(2.0 * std::numbers::pi * u2);
        double v = mean + sd * z;
        if (v >= lower) return v;
    }
}

ScenarioSet generate_scenarios(const std::vector<LoadProfile>& base, const NoiseConfig& cfg,
                               int n, std::uint64_t seed) {
    if (n < 1) throw InputError("scenario count must be >= 1");
    if (cfg.sigma < 0 || cfg.floor < 0)
        throw InputError("noise config requires sigma >= 0 and floor >= 0");
    if (base.empty()) throw InputError("no base load profiles given");

    ScenarioSet set;
    set.n = n;
    set.seed = seed;
    set.horizon = static_cast<int>(base.front().p.size());
    for (const auto& lp : base) {
        if (static_cast<int>(lp.p.size()) != set.horizon)
            throw InputError("base load profiles disagree on horizon");
        set.bus_ids.push_back(lp.bus_id);
    }
    const int n_bus = static_cast<int>(set.bus_ids.size());
    set.profiles.resize(static_cast<std::size_t>(n) * n_bus * set.horizon);

#pragma omp parallel for collapse(2) schedule(static)
    for (int s = 0; s < n; ++s) {
        for (int b = 0; b < n_bus; ++b) {
            for (int t = 0; t < set.horizon; ++t) {
                CounterRng rng(seed, static_cast<std::uint64_t>(s),
                               static_cast<std::uint64_t>(base[b].bus_id),
                               static_cast<std::uint64_t>(t));
                double m = rng.next_truncated_gaussian(1.0, cfg.sigma, cfg.floor);
                set.at(s, b, t) = {base[b].p[t] * m, base[b].q[t] * m};
            }
        }
    }
    return set;
}

void save_scenarios(const ScenarioSet& set, const std::string& path) {
    auto out = csv::open_out(path);
    out << "scenario,bus_id,t,p_pu,q_pu\n";
    for (int s = 0; s < set.n; ++s)
        for (std::size_t b = 0; b < set.bus_ids.size(); ++b)
            for (int t = 0; t < set.horizon; ++t) {
                const auto& c = set.at(s, static_cast<int>(b), t);
                out << s << "," << set.bus_ids[b] << "," << t << "," << csv::fmt(c.real())
                    << "," << csv::fmt(c.imag()) << "\n";
            }
}

ScenarioSet load_scenarios(const std::string& path) {
    auto table = csv::read_file(path);
    int c_s = table.require_column("scenario");
    int c_bus = table.require_column("bus_id");
    int c_t = table.require_column("t");
    int c_p = table.require_column("p_pu");
    int c_q = table.require_column("q_pu");

    std::map<std::tuple<long, int, long>, std::complex<double>> cells;
    long max_s = -1, max_t = -1;
    std::map<int, int> bus_order;
    for (const auto& row : table.rows) {
        long s = csv::to_long(row[c_s], path);
        int bus = static_cast<int>(csv::to_long(row[c_bus], path));
        long t = csv::to_long(row[c_t], path);
        if (s < 0 || t < 0) throw InputError(path + ": negative scenario or timestep index");
        max_s = std::max(max_s, s);
        max_t = std::max(max_t, t);
        bus_order.emplace(bus, 0);
        if (!cells.emplace(std::make_tuple(s, bus, t),
                           std::complex<double>(csv::to_double(row[c_p], path),
                                                csv::to_double(row[c_q], path)))
                 .second)
            throw InputError(path + ": duplicate scenario cell");
    }
    if (cells.empty()) throw InputError(path + ": no scenario rows");

    ScenarioSet set;
    set.n = static_cast<int>(max_s + 1);
    set.horizon = static_cast<int>(max_t + 1);
    int idx = 0;
    for (auto& [bus, order] : bus_order) {
        order = idx++;
        set.bus_ids.push_back(bus);
    }
    set.profiles.resize(static_cast<std::size_t>(set.n) * set.bus_ids.size() * set.horizon);
    if (cells.size() != set.profiles.size())
        throw InputError(path + ": scenario grid is not dense (" + std::to_string(cells.size()) +
                         " cells, expected " + std::to_string(set.profiles.size()) + ")");
    for (const auto& [key, val] : cells) {
        auto [s, bus, t] = key;
        set.at(static_cast<int>(s), bus_order.at(bus), static_cast<int>(t)) = val;
    }
    return set;
}

} // namespace doe
