// Serial reference vs OpenMP run_suite on the eight supported shapes.
#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "qtrank/oracle.hpp"

using namespace qtrank;

int main(int argc, char** argv) {
    const int cases = argc > 1 ? std::atoi(argv[1]) : 200;
    const std::uint64_t seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 7;
    const Dims shapes[] = {{2, 2, 2}, {2, 2, 3}, {3, 2, 2}, {2, 3, 2}, {2, 3, 3}, {3, 3, 2}, {3, 2, 3}, {3, 3, 3}};
    std::printf("threads %d, %d cases per shape\n", omp_get_max_threads(), cases);
    std::printf("%-7s %10s %10s %8s %6s\n", "shape", "serial ms", "omp ms", "speedup", "same");
    double ts = 0.0, tp = 0.0;
    bool all_same = true;
    for (const Dims& d : shapes) {
        using clock = std::chrono::steady_clock;
        auto t0 = clock::now();
        const SuiteReport a = run_suite_serial(d, cases, seed, default_tolerances.verify);
        auto t1 = clock::now();
        const SuiteReport b = run_suite(d, cases, seed, default_tolerances.verify);
        auto t2 = clock::now();
        const double ms_s = std::chrono::duration<double, std::milli>(t1 - t0).count();
        const double ms_p = std::chrono::duration<double, std::milli>(t2 - t1).count();
        ts += ms_s;
        tp += ms_p;
        all_same = all_same && a == b;
        std::printf("%-7s %10.1f %10.1f %8.2f %6s\n", dims_string(d).c_str(), ms_s, ms_p, ms_s / ms_p,
                    a == b ? "yes" : "NO");
    }
    std::printf("%-7s %10.1f %10.1f %8.2f %6s\n", "total", ts, tp, ts / tp, all_same ? "yes" : "NO");
    return all_same ? 0 : 1;
}
