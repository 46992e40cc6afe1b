// Command-line front end: envelope pipelines for real-time and time-ahead
// operation, power flow, benchmark, P-Q charts and shrinkage export.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <omp.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "doe/csvio.hpp"
#include "doe/envelope.hpp"
#include "doe/errors.hpp"
#include "doe/fnaproxy.hpp"
#include "doe/netmodel.hpp"
#include "doe/pqchart.hpp"
#include "doe/powerflow.hpp"
#include "doe/robust.hpp"
#include "doe/scenario.hpp"

namespace fs = std::filesystem;
using namespace doe;

namespace {

constexpr const char* kVersion = "0.1.0";

void apply_thread_cap() {
    if (const char* env = std::getenv("DOE_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) omp_set_num_threads(n);
    }
}

struct PolicyFlags {
    double u_min = 0.92;
    double u_max = 1.08;
    double delta_perm = 0.04;
    double p_min = -1.0, p_max = 1.0;
    double q_min = -1.0, q_max = 1.0;
    std::string p_mode = "anrc";
    std::string q_mode = "prc";
    double band = 0.2;
    std::string policy_file; // optional per-node overrides

    void add_to(CLI::App* cmd) {
        cmd->add_option("--umin", u_min, "lower voltage limit U_min [pu]");
        cmd->add_option("--umax", u_max, "upper voltage limit U_max [pu]");
        cmd->add_option("--delta-perm", delta_perm, "permissible fluctuation band [pu]");
        cmd->add_option("--pmin", p_min, "P lower limit, injection-positive [pu]");
        cmd->add_option("--pmax", p_max, "P upper limit [pu]");
        cmd->add_option("--qmin", q_min, "Q lower limit [pu]");
        cmd->add_option("--qmax", q_max, "Q upper limit [pu]");
        cmd->add_option("--p-mode", p_mode, "P policy: anrc|prc|prc-banded");
        cmd->add_option("--q-mode", q_mode, "Q policy: anrc|prc|prc-banded");
        cmd->add_option("--band", band, "red-zone band width for prc-banded");
        cmd->add_option("--policy-file", policy_file,
                        "JSON with per-node policy overrides (keys: default, per_node)");
    }
};

PolicyMode parse_mode(const std::string& s) {
    if (s == "anrc") return PolicyMode::Anrc;
    if (s == "prc") return PolicyMode::Prc;
    if (s == "prc-banded") return PolicyMode::PrcBanded;
    throw InputError("unknown policy mode '" + s + "' (anrc|prc|prc-banded)");
}

struct PolicyPair {
    EnvelopePolicy p, q;
    bool operator==(const PolicyPair&) const = default;
};

void apply_overrides(EnvelopePolicy& pol, const nlohmann::json& j) {
    if (j.contains("u_min")) pol.u_min = j["u_min"].get<double>();
    if (j.contains("u_max")) pol.u_max = j["u_max"].get<double>();
    if (j.contains("delta_perm")) pol.delta_perm = j["delta_perm"].get<double>();
    if (j.contains("x_min")) pol.x_min = j["x_min"].get<double>();
    if (j.contains("x_max")) pol.x_max = j["x_max"].get<double>();
    if (j.contains("mode")) pol.mode = parse_mode(j["mode"].get<std::string>());
    if (j.contains("band")) pol.band = j["band"].get<double>();
}

// Global default pair plus optional per-node overrides from --policy-file.
struct PolicyTable {
    PolicyPair defaults;
    std::map<int, PolicyPair> per_node;

    PolicyPair for_bus(int bus_id) const {
        auto it = per_node.find(bus_id);
        return it == per_node.end() ? defaults : it->second;
    }
};

PolicyTable build_policies(const PolicyFlags& f) {
    PolicyTable table;
    table.defaults.p = {f.u_min, f.u_max, f.delta_perm, f.p_min, f.p_max,
                        parse_mode(f.p_mode), f.band};
    table.defaults.q = {f.u_min, f.u_max, f.delta_perm, f.q_min, f.q_max,
                        parse_mode(f.q_mode), f.band};
    if (!f.policy_file.empty()) {
        std::ifstream in(f.policy_file);
        if (!in) throw InputError("cannot open policy file: " + f.policy_file);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw InputError("policy file parse error: " + std::string(e.what()));
        }
        if (j.contains("default")) {
            if (j["default"].contains("p")) apply_overrides(table.defaults.p, j["default"]["p"]);
            if (j["default"].contains("q")) apply_overrides(table.defaults.q, j["default"]["q"]);
        }
        if (j.contains("per_node"))
            for (auto& [key, val] : j["per_node"].items()) {
                PolicyPair pair = table.defaults;
                if (val.contains("p")) apply_overrides(pair.p, val["p"]);
                if (val.contains("q")) apply_overrides(pair.q, val["q"]);
                table.per_node[std::stoi(key)] = pair;
            }
    }
    table.defaults.p.validate();
    table.defaults.q.validate();
    for (auto& [bus, pair] : table.per_node) {
        pair.p.validate();
        pair.q.validate();
    }
    return table;
}

fs::path prepare_out_dir(const std::string& out) {
    fs::path dir(out);
    fs::create_directories(dir);
    return dir;
}

void write_manifest(const fs::path& dir, const std::string& command,
                    const nlohmann::json& config) {
    nlohmann::json j;
    j["tool"] = "doe";
    j["version"] = kVersion;
    j["command"] = command;
    j["config"] = config;
    auto out = csv::open_out((dir / "manifest.json").string());
    out << j.dump(2) << "\n";
}

// Runs a per-(bus,t) DOE method with per-node policies by grouping buses that
// share a policy pair and merging the per-group results.
template <typename Fn>
DOESeries run_grouped(const VoltageScenarioSet& v, const PolicyTable& policies, Fn&& method) {
    DOESeries out;
    out.bus_ids = v.bus_ids;
    out.horizon = v.horizon;
    out.p.resize(v.bus_ids.size() * static_cast<std::size_t>(v.horizon));
    out.q.resize(out.p.size());

    std::vector<bool> done(v.bus_ids.size(), false);
    for (std::size_t b0 = 0; b0 < v.bus_ids.size(); ++b0) {
        if (done[b0]) continue;
        PolicyPair pair = policies.for_bus(v.bus_ids[b0]);
        std::vector<std::size_t> members;
        for (std::size_t b = b0; b < v.bus_ids.size(); ++b)
            if (!done[b] && policies.for_bus(v.bus_ids[b]) == pair) {
                members.push_back(b);
                done[b] = true;
            }
        VoltageScenarioSet sub;
        sub.n = v.n;
        sub.horizon = v.horizon;
        for (auto b : members) sub.bus_ids.push_back(v.bus_ids[b]);
        sub.v_mag.resize(static_cast<std::size_t>(v.n) * members.size() * v.horizon);
        for (int s = 0; s < v.n; ++s)
            for (std::size_t m = 0; m < members.size(); ++m)
                for (int t = 0; t < v.horizon; ++t)
                    sub.at(s, static_cast<int>(m), t) = v.at(s, static_cast<int>(members[m]), t);
        DOESeries part = method(pair, sub);
        for (std::size_t m = 0; m < members.size(); ++m)
            for (int t = 0; t < v.horizon; ++t) {
                out.p[out.idx(static_cast<int>(members[m]), t)] =
                    part.p[part.idx(static_cast<int>(m), t)];
                out.q[out.idx(static_cast<int>(members[m]), t)] =
                    part.q[part.idx(static_cast<int>(m), t)];
            }
    }
    return out;
}

int report_non_convergence(const std::vector<CellDiagnostic>& diags) {
    std::cerr << "power flow failed to converge in " << diags.size() << " cell(s):\n";
    for (const auto& d : diags)
        std::cerr << "  scenario " << d.scenario << ", t " << d.t
                  << ", max mismatch " << d.max_mismatch << " pu\n";
    return 3;
}

} // namespace

int main(int argc, char** argv) {
    apply_thread_cap();

    CLI::App app{"Dynamic operating envelopes for radial distribution networks"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    // ---- rt-doe: fully local, no network/topology input exists on this path
    auto* rt = app.add_subcommand("rt-doe", "Real-time DOE from measured voltages");
    std::string rt_voltages, rt_out = "out";
    rt->add_option("--voltages", rt_voltages, "CSV bus_id,t,v_mag_pu")->required();
    rt->add_option("--out", rt_out, "output directory");
    PolicyFlags rt_policy;
    rt_policy.add_to(rt);

    // ---- da-doe
    auto* da = app.add_subcommand("da-doe", "Time-ahead robust DOE from load scenarios");
    std::string da_network, da_loads, da_scenario_file, da_method = "m1", da_out = "out";
    int da_n = 1000;
    double da_sigma = 0.15, da_alpha = 0.05;
    std::uint64_t da_seed = 1;
    bool da_save_voltages = false, da_one_sided = false;
    da->add_option("--network", da_network, "network JSON")->required();
    da->add_option("--loads", da_loads, "base load CSV")->required();
    da->add_option("--scenarios", da_n, "Monte Carlo scenario count");
    da->add_option("--sigma", da_sigma, "relative forecast-error sd");
    da->add_option("--seed", da_seed, "scenario seed");
    da->add_option("--scenario-file", da_scenario_file, "bypass generation with this CSV");
    da->add_option("--alpha", da_alpha, "chance-constraint level");
    da->add_option("--method", da_method, "m1|m2");
    da->add_flag("--one-sided", da_one_sided, "one-sided chance constraint");
    da->add_flag("--save-voltages", da_save_voltages, "also export voltage scenarios CSV");
    da->add_option("--out", da_out, "output directory");
    PolicyFlags da_policy;
    da_policy.add_to(da);

    // ---- powerflow
    auto* pf = app.add_subcommand("powerflow", "Deterministic power flow on base loads");
    std::string pf_network, pf_loads, pf_out = "out";
    pf->add_option("--network", pf_network)->required();
    pf->add_option("--loads", pf_loads)->required();
    pf->add_option("--out", pf_out, "output directory");

    // ---- benchmark
    auto* bm = app.add_subcommand("benchmark", "Compare M1 vs M2 computation time");
    std::string bm_network, bm_loads, bm_out = "out";
    int bm_n = 1000, bm_reps = 5;
    double bm_sigma = 0.15, bm_alpha = 0.05;
    std::uint64_t bm_seed = 1;
    bool bm_parallel = false;
    bm->add_option("--network", bm_network)->required();
    bm->add_option("--loads", bm_loads)->required();
    bm->add_option("--scenarios", bm_n);
    bm->add_option("--sigma", bm_sigma);
    bm->add_option("--seed", bm_seed);
    bm->add_option("--alpha", bm_alpha);
    bm->add_option("--repetitions", bm_reps);
    bm->add_flag("--parallel", bm_parallel, "time M2 with OpenMP workers (reported separately)");
    bm->add_option("--out", bm_out, "output directory");
    PolicyFlags bm_policy;
    bm_policy.add_to(bm);

    // ---- pq-chart
    auto* pq = app.add_subcommand("pq-chart", "P-Q feasible region for one DOE cell");
    std::string pq_doe, pq_out = "out";
    int pq_bus = 0, pq_t = 0, pq_verts = 64;
    double pq_pf = 0.0, pq_smax = 0.0;
    pq->add_option("--doe", pq_doe, "DOE CSV")->required();
    pq->add_option("--bus", pq_bus)->required();
    pq->add_option("--t", pq_t)->required();
    pq->add_option("--pf", pq_pf, "power factor lower bound (omit = unconstrained)");
    pq->add_option("--smax", pq_smax, "converter capacity [pu] (omit = unconstrained)");
    pq->add_option("--disc-vertices", pq_verts);
    pq->add_option("--out", pq_out, "output directory");

    // ---- shrinkage
    auto* sh = app.add_subcommand("shrinkage", "Envelope shrinkage indicator export");
    std::string sh_doe, sh_out = "out";
    sh->add_option("--doe", sh_doe, "DOE CSV")->required();
    sh->add_option("--out", sh_out, "output directory");
    PolicyFlags sh_policy;
    sh_policy.add_to(sh);

    CLI11_PARSE(app, argc, argv);

    try {
        if (rt->parsed()) {
            auto policies = build_policies(rt_policy);
            auto v = load_voltage_series(rt_voltages);
            DOESeries out;
            out.bus_ids = v.bus_ids;
            out.horizon = v.horizon;
            out.p.resize(v.v.size());
            out.q.resize(v.v.size());
            for (std::size_t b = 0; b < v.bus_ids.size(); ++b) {
                PolicyPair pair = policies.for_bus(v.bus_ids[b]);
                for (int t = 0; t < v.horizon; ++t) {
                    auto i = out.idx(static_cast<int>(b), t);
                    double u = v.at(static_cast<int>(b), t);
                    out.p[i] = bounds(pair.p, u);
                    out.q[i] = bounds(pair.q, u);
                }
            }
            auto dir = prepare_out_dir(rt_out);
            save_doe(out, (dir / "rt_doe.csv").string());
            write_manifest(dir, "rt-doe", {{"voltages", rt_voltages}});
            std::cout << "wrote " << (dir / "rt_doe.csv").string() << "\n";
            return 0;
        }

        if (da->parsed() || bm->parsed()) {
            const bool is_da = da->parsed();
            const auto& flags = is_da ? da_policy : bm_policy;
            auto policies = build_policies(flags);
            auto net = load_network(is_da ? da_network : bm_network);
            auto base = load_profiles(is_da ? da_loads : bm_loads, &net);
            ScenarioSet scenarios;
            if (is_da && !da_scenario_file.empty())
                scenarios = load_scenarios(da_scenario_file);
            else
                scenarios = generate_scenarios(base, {is_da ? da_sigma : bm_sigma, 0.0},
                                               is_da ? da_n : bm_n, is_da ? da_seed : bm_seed);
            auto batch = batch_solve(net, scenarios);
            if (!batch.non_converged.empty()) return report_non_convergence(batch.non_converged);

            CCConfig cc{is_da ? da_alpha : bm_alpha, is_da && da_one_sided};
            cc.validate();

            if (is_da) {
                auto dir = prepare_out_dir(da_out);
                DOESeries result;
                if (da_method == "m1") {
                    UBands bands;
                    bands.bus_ids = batch.voltages.bus_ids;
                    bands.horizon = batch.voltages.horizon;
                    bands.u_low.resize(bands.bus_ids.size() *
                                       static_cast<std::size_t>(bands.horizon));
                    bands.u_high.resize(bands.u_low.size());
                    result = run_grouped(batch.voltages, policies,
                                         [&](const PolicyPair& pair, const VoltageScenarioSet& v) {
                                             UBands part;
                                             auto doe = m1_doe(pair.p, pair.q, v, cc, &part);
                                             for (std::size_t b = 0; b < v.bus_ids.size(); ++b) {
                                                 int gb = -1;
                                                 for (std::size_t k = 0; k < bands.bus_ids.size(); ++k)
                                                     if (bands.bus_ids[k] == v.bus_ids[b])
                                                         gb = static_cast<int>(k);
                                                 for (int t = 0; t < v.horizon; ++t) {
                                                     auto gi = static_cast<std::size_t>(gb) *
                                                                   bands.horizon + t;
                                                     auto pi = b * v.horizon + t;
                                                     bands.u_low[gi] = part.u_low[pi];
                                                     bands.u_high[gi] = part.u_high[pi];
                                                 }
                                             }
                                             return doe;
                                         });
                    save_u_bands(bands, (dir / "u_bands.csv").string());
                } else if (da_method == "m2") {
                    result = run_grouped(batch.voltages, policies,
                                         [&](const PolicyPair& pair, const VoltageScenarioSet& v) {
                                             return m2_doe(pair.p, pair.q, v, cc);
                                         });
                } else {
                    throw InputError("unknown method '" + da_method + "' (m1|m2)");
                }
                save_doe(result, (dir / "da_doe.csv").string());
                if (da_save_voltages)
                    save_voltage_scenarios(batch.voltages, (dir / "voltages.csv").string());
                write_manifest(dir, "da-doe",
                               {{"network", da_network},
                                {"loads", da_loads},
                                {"scenarios", scenarios.n},
                                {"sigma", da_sigma},
                                {"seed", da_seed},
                                {"alpha", da_alpha},
                                {"method", da_method}});
                std::cout << "wrote " << (dir / "da_doe.csv").string() << "\n";
            } else {
                auto dir = prepare_out_dir(bm_out);
                auto report = benchmark(policies.defaults.p, policies.defaults.q, batch.voltages,
                                        cc, bm_reps, bm_parallel);
                save_benchmark_report(report, (dir / "benchmark.json").string());
                write_manifest(dir, "benchmark",
                               {{"network", bm_network},
                                {"loads", bm_loads},
                                {"scenarios", bm_n},
                                {"seed", bm_seed},
                                {"repetitions", bm_reps},
                                {"parallel_m2", bm_parallel}});
                std::cout << "m1_ms=" << report.m1_ms << " m2_ms=" << report.m2_ms
                          << " ratio=" << report.ratio << "\n";
            }
            return 0;
        }

        if (pf->parsed()) {
            auto net = load_network(pf_network);
            auto base = load_profiles(pf_loads, &net);
            auto scenarios = generate_scenarios(base, {0.0, 0.0}, 1, 0);
            auto batch = batch_solve(net, scenarios);
            if (!batch.non_converged.empty()) return report_non_convergence(batch.non_converged);
            auto dir = prepare_out_dir(pf_out);
            save_voltage_scenarios(batch.voltages, (dir / "voltages.csv").string());
            write_manifest(dir, "powerflow", {{"network", pf_network}, {"loads", pf_loads}});
            std::cout << "wrote " << (dir / "voltages.csv").string() << "\n";
            return 0;
        }

        if (pq->parsed()) {
            auto doe = load_doe(pq_doe);
            int b = -1;
            for (std::size_t i = 0; i < doe.bus_ids.size(); ++i)
                if (doe.bus_ids[i] == pq_bus) b = static_cast<int>(i);
            if (b < 0 || pq_t < 0 || pq_t >= doe.horizon)
                throw InputError("cell (bus " + std::to_string(pq_bus) + ", t " +
                                 std::to_string(pq_t) + ") not present in " + pq_doe);
            PQConstraints c;
            if (pq->count("--pf")) c.pf_limit = pq_pf;
            if (pq->count("--smax")) c.s_max = pq_smax;
            c.disc_vertices = pq_verts;
            auto region = build_region(doe.p[doe.idx(b, pq_t)], doe.q[doe.idx(b, pq_t)], c);
            auto dir = prepare_out_dir(pq_out);
            save_region(region, (dir / "region.json").string());
            save_region_points(region, (dir / "region_points.csv").string());
            write_manifest(dir, "pq-chart",
                           {{"doe", pq_doe}, {"bus", pq_bus}, {"t", pq_t}});
            std::cout << "empty=" << (region.empty ? 1 : 0) << " area=" << area(region) << "\n";
            return 0;
        }

        if (sh->parsed()) {
            auto policies = build_policies(sh_policy);
            auto doe = load_doe(sh_doe);
            auto s = shrinkage(doe, policies.defaults.p, policies.defaults.q);
            auto dir = prepare_out_dir(sh_out);
            save_shrinkage(s, (dir / "shrinkage.csv").string());
            write_manifest(dir, "shrinkage", {{"doe", sh_doe}});
            std::cout << "wrote " << (dir / "shrinkage.csv").string() << "\n";
            return 0;
        }
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const ConvergenceError& e) {
        std::cerr << "convergence error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
