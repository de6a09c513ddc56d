// Wall-clock comparison of the serial reference loop against the OpenMP
// trial loop, across the three erasure regimes.

#include <chrono>
#include <cstdio>

#include "paf/sim.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

double seconds(std::chrono::steady_clock::time_point a, std::chrono::steady_clock::time_point b) {
    return std::chrono::duration<double>(b - a).count();
}

}  // namespace

int main(int argc, char** argv) {
    std::int64_t trials = 400;
    if (argc > 1) trials = std::atoll(argv[1]);

    paf::model::ModelParams params;
    params.n = 1000;
    params.k = 10;
    params.p = 0.2;
    params.c = 1.0;

    std::printf("%-8s %10s %12s %12s %9s %s\n", "alpha", "trials", "serial_s", "parallel_s",
                "speedup", "ber");
    for (double alpha : {0.15, 0.45, 0.7}) {
        params.alpha = alpha;
        const auto t0 = std::chrono::steady_clock::now();
        const auto serial = paf::sim::estimate_ber_serial(params, params.k, trials, 42);
        const auto t1 = std::chrono::steady_clock::now();
        const auto parallel = paf::sim::estimate_ber(params, params.k, trials, 42);
        const auto t2 = std::chrono::steady_clock::now();
        if (serial.errors != parallel.errors || serial.trials != parallel.trials) {
            std::printf("MISMATCH between serial and parallel results at alpha=%.2f\n", alpha);
            return 1;
        }
        const double ts = seconds(t0, t1);
        const double tp = seconds(t1, t2);
        std::printf("%-8.2f %10lld %12.3f %12.3f %8.2fx %.4f\n", alpha,
                    static_cast<long long>(trials), ts, tp, ts / tp, parallel.ber);
    }
#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (OpenMP unavailable)\n");
#endif
    return 0;
}
