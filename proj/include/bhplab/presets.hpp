#pragma once

#include <string>
#include <vector>

#include "bhplab/experiments.hpp"
#include "bhplab/report.hpp"

namespace bhplab {

// A schema-validated run configuration. Unknown keys are rejected with the
// path to the offending field; the seed is mandatory (no wall-clock default).
struct RunConfig {
    json raw;                 // canonical echo for the manifest
    std::string experiment;
    McBudget mc;
    VerdictConventions vc;
    int dim = 2;

    // experiment-dependent payload
    bool has_process = false;
    SubordinatorSpec subordinator = SubordinatorSpec::pure_drift(1.0);
    bool has_domain = false;
    DomainSpec domain = Ball{};
    Vec z0 = vec0();
    Vec x0 = vec0();
    std::vector<double> r_grid;
    double scale = 1.0;             // dt anchor for single-scale estimates
    double expected_slope = 0.0;    // exit-time-scaling
    double slope_tol = 0.1;
    int n_probes = 1;
    ConeScanParams cone_scan;
    ConeExponentParams cone_exponents;
    int n_triples = 1000;           // phi-doubling
    std::string mu2_label;
    // pde subcommand
    std::string pde_solve;          // "mean-exit" | "green" | "harmonic-measure"
    double pde_h = 1.0 / 128.0;
    bool pde_mirror = false;
    Vec pde_pole = vec0();
    double pde_window_halfwidth = 0.0;  // harmonic-measure target |x1| <= w on the boundary
    std::vector<double> pde_axis;       // axis profile export heights
};

RunConfig parse_run_config(const json& j);

struct PresetInfo {
    std::string name;
    std::string description;
};

std::vector<PresetInfo> list_presets();
json preset_config(const std::string& name);

// Executes a parsed config and returns the report (pde/phi runs return a
// completed informational report).
ExperimentReport run_experiment(const RunConfig& cfg, const std::string& out_dir);

}  // namespace bhplab
