#pragma once

#include <cmath>
#include <functional>

#include "bhplab/common.hpp"

namespace bhplab {

// Adaptive quadrature wrappers. Relative tolerance defaults to 1e-9 with a
// 1e-12 absolute floor: Phi and the subordination kernels sit inside two-sided
// bounds, so their own error has to be negligible against every test band.
struct QuadControls {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    // Integral magnitudes above this throw IntegrabilityError; only the
    // constructor-time integrability checks set a finite cap.
    double divergence_cap = HUGE_VAL;
};

// Integral over the finite interval (a, b); tolerates integrable endpoint
// singularities.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadControls& q = {});

// Integral over (a, infinity), a >= 0. Handles both exponential and power-law
// decay via the substitution s = a + t/(1-t).
double integrate_tail(const std::function<double(double)>& f, double a,
                      const QuadControls& q = {});

// Adaptive Gauss-Kronrod on a finite interval; the right tool for bounded
// oscillatory integrands where tanh-sinh stalls.
double integrate_gk(const std::function<double(double)>& f, double a, double b,
                    const QuadControls& q = {});

}  // namespace bhplab
