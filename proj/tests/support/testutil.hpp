#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <unistd.h>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "doe/netmodel.hpp"

namespace testutil {

// Fresh directory under the system temp dir, removed on destruction.
struct TempDir {
    std::filesystem::path path;

    TempDir() {
        static std::atomic<std::uint64_t> counter{0};
        path = std::filesystem::temp_directory_path() /
               ("doe_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

inline std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline doe::Network two_bus(double r = 0.01, double x = 0.01) {
    doe::Network net;
    net.buses = {{0, "slack", false, true}, {1, "load", true, false}};
    net.branches = {{0, 1, r, x}};
    net.slack_bus = 0;
    return net;
}

// Random radial network with n buses, bus 0 slack, parent(i) uniform over
// earlier buses.
inline doe::Network random_tree(int n, std::mt19937& rng) {
    doe::Network net;
    for (int i = 0; i < n; ++i)
        net.buses.push_back({i, "bus" + std::to_string(i), i > 0, i == 0});
    std::uniform_real_distribution<double> imp(0.002, 0.02);
    for (int i = 1; i < n; ++i) {
        std::uniform_int_distribution<int> pick(0, i - 1);
        net.branches.push_back({pick(rng), i, imp(rng), imp(rng)});
    }
    net.slack_bus = 0;
    return net;
}

} // namespace testutil
