// Compares the serial reference batch power-flow sweep against the
// OpenMP-parallel version on the same scenario set and verifies the outputs
// are bit-identical.

#include <chrono>
#include <cstring>
#include <iostream>

#include <omp.h>

#include "doe/netmodel.hpp"
#include "doe/powerflow.hpp"
#include "doe/scenario.hpp"

using namespace doe;

int main(int argc, char** argv) {
    std::string network_path, loads_path;
    int n = 200;
    std::uint64_t seed = 1;
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        auto next = [&]() -> std::string {
            if (i + 1 >= argc) {
                std::cerr << "missing value for " << a << "\n";
                std::exit(2);
            }
            return argv[++i];
        };
        if (a == "--network") network_path = next();
        else if (a == "--loads") loads_path = next();
        else if (a == "--scenarios") n = std::stoi(next());
        else if (a == "--seed") seed = std::stoull(next());
        else {
            std::cerr << "usage: bench_sweep --network FILE --loads FILE"
                         " [--scenarios N] [--seed S]\n";
            return 2;
        }
    }
    if (network_path.empty() || loads_path.empty()) {
        std::cerr << "usage: bench_sweep --network FILE --loads FILE"
                     " [--scenarios N] [--seed S]\n";
        return 2;
    }

    auto net = load_network(network_path);
    auto base = load_profiles(loads_path, &net);
    auto scenarios = generate_scenarios(base, {0.15, 0.0}, n, seed);

    using clock = std::chrono::steady_clock;
    auto ms = [](clock::time_point a, clock::time_point b) {
        return std::chrono::duration<double, std::milli>(b - a).count();
    };

    // warm-up
    (void)batch_solve_serial(net, scenarios);

    auto t0 = clock::now();
    auto serial = batch_solve_serial(net, scenarios);
    auto t1 = clock::now();
    auto parallel = batch_solve(net, scenarios);
    auto t2 = clock::now();

    bool identical =
        serial.voltages.v_mag.size() == parallel.voltages.v_mag.size() &&
        std::memcmp(serial.voltages.v_mag.data(), parallel.voltages.v_mag.data(),
                    serial.voltages.v_mag.size() * sizeof(double)) == 0;

    double serial_ms = ms(t0, t1);
    double parallel_ms = ms(t1, t2);
    std::cout << "cells: " << scenarios.n << " scenarios x " << net.buses.size() << " buses x "
              << scenarios.horizon << " steps\n"
              << "threads: " << omp_get_max_threads() << "\n"
              << "serial:   " << serial_ms << " ms\n"
              << "parallel: " << parallel_ms << " ms (speedup "
              << (parallel_ms > 0 ? serial_ms / parallel_ms : 0.0) << "x)\n"
              << "bit-identical: " << (identical ? "yes" : "NO") << "\n";
    return identical ? 0 : 1;
}
