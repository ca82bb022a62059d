// Compares the parallel mining kernel against the serial reference on the
// synthetic master table. Usage: bench_miner [rows] [repeats]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "smartint/eval.hpp"

using namespace smartint;
using Clock = std::chrono::steady_clock;

namespace {

double time_ms(MiningResult (*mine)(const Table&, const MinerConfig&), const Table& t,
               const MinerConfig& cfg, int repeats, std::size_t* afds_out) {
    double best = 1e300;
    for (int i = 0; i < repeats; ++i) {
        auto t0 = Clock::now();
        MiningResult r = mine(t, cfg);
        double ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
        if (ms < best) best = ms;
        *afds_out = r.afds.size();
    }
    return best;
}

} // namespace

int main(int argc, char** argv) {
    std::size_t rows = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 2000;
    int repeats = argc > 2 ? std::atoi(argv[2]) : 3;

    Table master = generate_master(42, rows);
    std::printf("mining %zu rows x %zu attributes, best of %d runs\n", master.tuple_count(),
                master.attributes.size(), repeats);
    std::printf("%-16s %12s %12s %9s %8s\n", "max-specificity", "serial (ms)", "parallel (ms)",
                "speedup", "afds");

    for (double max_spec : {0.5, 0.8, 1.0}) {
        MinerConfig cfg;
        cfg.max_specificity = max_spec;
        cfg.keep_rules = false; // measure the lattice, not rule storage
        std::size_t n_serial = 0, n_parallel = 0;
        double serial = time_ms(mine_afds_serial, master, cfg, repeats, &n_serial);
        double parallel = time_ms(mine_afds, master, cfg, repeats, &n_parallel);
        if (n_serial != n_parallel) {
            std::fprintf(stderr, "output mismatch at max-specificity %.1f\n", max_spec);
            return 1;
        }
        std::printf("%-16.1f %12.1f %12.1f %8.2fx %8zu\n", max_spec, serial, parallel,
                    serial / parallel, n_serial);
    }
    return 0;
}
