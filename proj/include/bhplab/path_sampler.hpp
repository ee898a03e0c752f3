#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "bhplab/geometry.hpp"
#include "bhplab/sampling.hpp"
#include "bhplab/stats.hpp"
#include "bhplab/subordinator.hpp"

namespace bhplab {

// X_t = W_{S_t}; W is Brownian motion with generator Delta (per-coordinate
// variance 2t), S the subordinator.
struct ProcessSpec {
    int dim = 2;
    SubordinatorSpec subordinator = SubordinatorSpec::pure_drift(1.0);
};

struct OccupationGrid {
    Vec lo = vec0();
    double h = 0.1;
    int nx = 10, ny = 10;  // d = 2 only
};

struct PathConfig {
    double dt = 1e-3;
    long long max_steps = 400000;
    bool bridge_correction = true;
    std::uint64_t seed = 0;
    int workers = 0;              // 0: library default
    double jump_threshold = -1.0;  // < 0: auto (drift * dt)
    std::optional<OccupationGrid> occupation_bins;
    double censor_budget = 1e-3;  // hard-fail budget for mean-exit estimates
};

struct ExitRecord {
    double exit_time = 0.0;
    Vec exit_position = vec0();
    bool exited_by_jump = false;
    bool censored = false;
    bool continuous_exit = false;  // bridge-declared mid-step boundary exit
    std::vector<double> occupation;  // filled when occupation_bins is set
};

// Simulate one first-exit path from `region` started at x0 (must be inside).
ExitRecord simulate_exit(const ProcessSpec& proc, const Region& region, const Vec& x0,
                         const PathConfig& cfg, Rng& rng);

// Occupation probe: time spent in B(center, radius) and B(center, 2*radius)
// until exit from the outer region.
struct ProbeBall {
    Vec center = vec0();
    double radius = 0.1;
};

using ExitTarget = std::function<bool(const Vec&, int)>;

// One batch of paths harvests every requested statistic in a single sweep:
// outer exit time/position, optional inner-region first-exit data, and
// occupation near probes.
struct HarvestPlan {
    Region outer;
    Vec start = vec0();
    std::optional<Region> inner;
    std::vector<ExitTarget> outer_targets;  // evaluated at the outer exit position
    std::vector<ExitTarget> inner_targets;  // evaluated at the inner exit position
    std::vector<ProbeBall> probes;
    std::optional<Histogram> tau_histogram;  // template; copied per chunk
};

struct Harvest {
    long long n = 0;
    long long censored = 0;        // paths that never left the outer region
    long long inner_censored = 0;  // paths that never left the inner region
    Accum tau_outer;               // over non-censored paths
    Accum tau_inner;
    std::vector<Accum> outer_targets;
    std::vector<Accum> inner_targets;
    std::vector<std::array<Accum, 2>> occupation;  // per probe: [radius, 2*radius]
    Accum exited_by_jump;   // indicator over non-censored outer exits
    Accum boundary_exit;    // bridge-declared continuous exits
    Histogram tau_hist;

    void merge(const Harvest& o);
    double censored_fraction() const {
        return n > 0 ? static_cast<double>(censored) / static_cast<double>(n) : 0.0;
    }
};

// OpenMP kernel: paths are split into fixed chunks, each path owns the RNG
// stream keyed by (seed, path index), and chunk results merge in index order,
// so estimates are bit-identical for any worker count.
Harvest harvest_paths(const ProcessSpec& proc, const HarvestPlan& plan, const PathConfig& cfg,
                      long long n_paths);

// Serial reference implementation kept for testing; must produce results
// bit-identical to the parallel kernel.
Harvest harvest_paths_serial(const ProcessSpec& proc, const HarvestPlan& plan,
                             const PathConfig& cfg, long long n_paths);

// --- Estimators -----------------------------------------------------------

// Mean exit time from a region; hard-fails when the censored fraction exceeds
// the budget (censored mass biases the mean down without bound).
Estimate estimate_mean_exit_time(const ProcessSpec& proc, const Region& region, const Vec& x0,
                                 const PathConfig& cfg, long long n_paths);

// P_x(X_tau in A) for a decidable target on exit positions.
Estimate estimate_exit_distribution(const ProcessSpec& proc, const Region& region, const Vec& x0,
                                    const ExitTarget& target, const PathConfig& cfg,
                                    long long n_paths);

struct GreenEstimate {
    Estimate value;          // occupation / volume at bandwidth h_b
    Estimate value_2h;       // same at bandwidth 2*h_b (sensitivity report)
};

// G_D(x0, y) from expected occupation of B(y, h_b) divided by its volume.
GreenEstimate estimate_green(const ProcessSpec& proc, const Region& region, const Vec& x0,
                             const Vec& probe, double bandwidth, const PathConfig& cfg,
                             long long n_paths);

// P(sup_{s<=t} |Y_s| >= r) for the process started at the origin, discrete
// monitoring plus bridge correction against the sphere (correction can only
// raise the estimate; the flat-face approximation is documented).
Estimate estimate_sup_tail(const ProcessSpec& proc, double t, double r, const PathConfig& cfg,
                           long long n_paths);

// Scale-adapted time step: dt = c_dt / Phi(r), so the expected step count per
// path is scale-uniform across dyadic sweeps.
double scale_adapted_dt(const ProcessSpec& proc, double r, double c_dt);

}  // namespace bhplab
