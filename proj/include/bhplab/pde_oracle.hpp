#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "bhplab/geometry.hpp"

namespace bhplab {

// Node-centered masked grid carrying a finite-difference solution on a 2D
// domain; nodes sit at (x0 + i*h, y0 + j*h) and Dirichlet cells carry 0.
struct GridField {
    double h = 0.0;
    double x0 = 0.0, y0 = 0.0;
    int nx = 0, ny = 0;
    std::vector<double> values;        // nx*ny, row-major in j
    std::vector<std::uint8_t> interior;

    double node(int i, int j) const { return values[static_cast<std::size_t>(j) * nx + i]; }
    bool is_interior(int i, int j) const {
        return interior[static_cast<std::size_t>(j) * nx + i] != 0;
    }
    double x_of(int i) const { return x0 + i * h; }
    double y_of(int j) const { return y0 + j * h; }

    // Bilinear interpolation; exact at nodes.
    double at(double x, double y) const;
};

struct SolverOptions {
    double h = 1.0 / 128.0;
    // Mirror symmetry about x = 0; valid only for domains (and data) that are
    // symmetric, halves the unknown count of the large cone solves.
    bool mirror_x = false;
    double residual_tol = 1e-10;
    long long direct_limit = 700000;  // unknowns; larger systems go iterative
    int min_cells_across = 64;
};

// Solves Delta u = -1 with u = 0 on the boundary (W has generator Delta, so u
// is the Brownian mean exit time).
GridField solve_mean_exit_bm(const Region& dom, const SolverOptions& opt);

// Solves Delta G = -delta_pole (discrete delta of unit mass) with Dirichlet 0.
GridField solve_green_bm(const Region& dom, const Vec& pole, const SolverOptions& opt);

// Solves Delta u = 0 with boundary data 1 on the set, 0 elsewhere; the set
// predicate is evaluated at the boundary intersection points.
GridField solve_harmonic_measure_bm(const Region& dom,
                                    const std::function<bool(const Vec&)>& boundary_set,
                                    const SolverOptions& opt);

// Field values along the vertical axis x = 0 at heights a (relative to the
// grid origin); exact node reads when aligned, bilinear otherwise.
std::vector<double> axis_profile(const GridField& f, const std::vector<double>& heights);

}  // namespace bhplab
