// Timing comparison of the parallel enumeration kernels against their serial
// reference implementations, plus an agreement check, on a few model sizes.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "ising/exact.hpp"
#include "ising/model.hpp"
#include "ising/rng.hpp"

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point start) {
    return std::chrono::duration<double>(clock_type::now() - start).count();
}

ising::IsingModel random_model(int p, std::uint64_t seed) {
    ising::IsingModel model(p);
    ising::SplitMix64 rng(seed);
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j)
            if (rng.uniform01() < 3.0 / p) // sparse, degree about 3
                model.set_edge(i, j, 0.2 + 0.3 * rng.uniform01());
    return model;
}

} // namespace

int main() {
    std::printf("kernel benchmark: serial reference vs parallel (threads = %d)\n",
                ising::max_threads());
    std::printf("%-14s %4s %12s %12s %8s %s\n", "kernel", "p", "serial[s]",
                "parallel[s]", "speedup", "max|diff|");

    for (int p : {16, 18, 20}) {
        ising::IsingModel model = random_model(p, 0x9e3779b9u + p);

        auto t0 = clock_type::now();
        double z_serial = ising::log_partition_serial(model);
        double ts = seconds_since(t0);
        t0 = clock_type::now();
        double z_par = ising::log_partition(model);
        double tp = seconds_since(t0);
        std::printf("%-14s %4d %12.4f %12.4f %7.2fx %.3e\n", "log_partition", p, ts, tp,
                    ts / tp, std::fabs(z_serial - z_par));

        t0 = clock_type::now();
        std::vector<double> m_serial = ising::pair_moments_serial(model);
        ts = seconds_since(t0);
        t0 = clock_type::now();
        std::vector<double> m_par = ising::pair_moments(model);
        tp = seconds_since(t0);
        double diff = 0.0;
        for (std::size_t k = 0; k < m_serial.size(); ++k)
            diff = std::max(diff, std::fabs(m_serial[k] - m_par[k]));
        std::printf("%-14s %4d %12.4f %12.4f %7.2fx %.3e\n", "pair_moments", p, ts, tp,
                    ts / tp, diff);
    }
    return 0;
}
