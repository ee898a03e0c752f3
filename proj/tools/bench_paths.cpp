// Benchmark of the OpenMP path kernel against the serial reference on the
// unit-ball exit benchmark. Checks that both produce identical estimates.
#include <omp.h>

#include <chrono>
#include <cstdio>

#include "bhplab/path_sampler.hpp"

using namespace bhplab;

namespace {

double run(bool parallel, const ProcessSpec& proc, const HarvestPlan& plan, const PathConfig& cfg,
           long long n, Harvest* out) {
    const auto t0 = std::chrono::steady_clock::now();
    *out = parallel ? harvest_paths(proc, plan, cfg, n)
                    : harvest_paths_serial(proc, plan, cfg, n);
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    long long n = argc > 1 ? std::atoll(argv[1]) : 50000;

    struct Case {
        const char* name;
        SubordinatorSpec sub;
    } cases[] = {
        {"bm (pure drift)", SubordinatorSpec::pure_drift(1.0)},
        {"bm + stable(0.5)", SubordinatorSpec::bm_plus_stable(1.0, 0.5)},
        {"stable(0.75)", SubordinatorSpec(0.0, StableSub{0.75})},
    };

    std::printf("paths: %lld, max threads: %d\n", n, omp_get_max_threads());
    std::printf("%-18s %12s %12s %9s %10s\n", "process", "serial [s]", "parallel [s]", "speedup",
                "steps/s");
    for (const auto& c : cases) {
        ProcessSpec proc{2, c.sub};
        HarvestPlan plan;
        plan.outer = Region(Ball{vec0(), 1.0});
        plan.start = vec0();
        PathConfig cfg;
        cfg.dt = scale_adapted_dt(proc, 1.0, 1e-3);
        cfg.seed = 7;
        Harvest hs, hp;
        const double ts = run(false, proc, plan, cfg, n, &hs);
        const double tp = run(true, proc, plan, cfg, n, &hp);
        const bool identical = hs.tau_outer.n == hp.tau_outer.n &&
                               hs.tau_outer.mean == hp.tau_outer.mean &&
                               hs.tau_outer.m2 == hp.tau_outer.m2;
        const double steps = hs.tau_outer.mean / cfg.dt * static_cast<double>(n);
        std::printf("%-18s %12.3f %12.3f %8.2fx %10.3g  %s\n", c.name, ts, tp, ts / tp,
                    steps / tp, identical ? "bit-identical" : "MISMATCH");
        if (!identical) return 1;
    }
    return 0;
}
