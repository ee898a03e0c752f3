#pragma once

// Test-only numerical oracles, independent of the library's quadrature path.

#include <cmath>
#include <functional>

namespace oracles {

inline double simpson(const std::function<double(double)>& f, double a, double m, double b,
                      double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                                   double fa, double fm, double fb, double whole, double eps,
                                   int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(f, a, lm, m, fa, flm, fm);
    const double right = simpson(f, m, rm, b, fm, frm, fb);
    if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * eps)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1);
}

// Independent adaptive quadrature at roughly 10x the library resolution.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double eps = 1e-12) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    return adaptive_simpson_rec(f, a, b, fa, fm, fb, simpson(f, a, m, b, fa, fm, fb), eps, 40);
}

// Brownian (generator Delta) mean exit time of the 2D annulus r_in < |x| < r_out:
// u(s) = (r_out^2 - s^2)/4 + A ln(s/r_out), A fixed by u(r_in) = 0.
inline double annulus_exit_time(double r_in, double r_out, double s) {
    const double A =
        ((r_out * r_out - r_in * r_in) / 4.0) / std::log(r_in / r_out);
    return (r_out * r_out - s * s) / 4.0 + A * std::log(s / r_out);
}

// Green function (occupation density for generator Delta) of the unit disk.
inline double disk_green(double x0, double y0, double x1, double y1) {
    const double r2 = x1 * x1 + y1 * y1;
    const double dx = x0 - x1, dy = y0 - y1;
    const double d = std::sqrt(dx * dx + dy * dy);
    if (r2 == 0.0) return std::log(1.0 / std::sqrt(x0 * x0 + y0 * y0)) / (2.0 * M_PI);
    const double sx = x1 / r2, sy = y1 / r2;  // image point
    const double dxs = x0 - sx, dys = y0 - sy;
    const double ds = std::sqrt(dxs * dxs + dys * dys);
    return std::log(ds * std::sqrt(r2) / d) / (2.0 * M_PI);
}

// Mean exit time of the symmetric 2a-stable process (exponent |xi|^(2a)) from
// B(0, r), started at |x|: Getoor's formula.
inline double stable_ball_exit(int d, double alpha2, double r, double xnorm) {
    const double g = alpha2;  // process index in (0,2)
    const double c = std::tgamma(d / 2.0) /
                     (std::pow(2.0, g) * std::tgamma(1.0 + g / 2.0) * std::tgamma((d + g) / 2.0));
    return c * std::pow(r * r - xnorm * xnorm, g / 2.0);
}

}  // namespace oracles
