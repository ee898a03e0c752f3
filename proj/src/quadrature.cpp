#include "bhplab/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>

namespace bhplab {

namespace {

double run_tanh_sinh(const std::function<double(double)>& f, double a, double b,
                     const QuadControls& q) {
    boost::math::quadrature::tanh_sinh<double> integrator(15);
    // Endpoint floor: tanh-sinh samples arbitrarily close to the endpoints,
    // where power-law densities overflow before their weights underflow. The
    // excluded sliver carries at most ~kDivergenceCap * 1e-100 mass for any
    // integrand that passes the cap check below.
    const double floor_ = 1e-60 * (b - a);
    auto guarded = [&](double x) {
        if (x - a < floor_ || b - x < floor_) return 0.0;
        const double v = f(x);
        return std::isnan(v) ? 0.0 : v;
    };
    double error = 0.0, l1 = 0.0;
    double v = integrator.integrate(guarded, a, b, q.rel_tol, &error, &l1);
    if (!std::isfinite(v) || std::fabs(v) > q.divergence_cap)
        throw IntegrabilityError("quadrature: integral diverges");
    if (error > q.rel_tol * std::max(1.0, std::fabs(l1)) && error > q.abs_tol &&
        error > 100.0 * q.rel_tol * std::max(1.0, std::fabs(v)))
        throw IntegrabilityError("quadrature: failed to converge to tolerance");
    return v;
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadControls& q) {
    if (!(b > a)) return 0.0;
    return run_tanh_sinh(f, a, b, q);
}

double integrate_gk(const std::function<double(double)>& f, double a, double b,
                    const QuadControls& q) {
    if (!(b > a)) return 0.0;
    double error = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, a, b, 15, q.rel_tol, &error);
    if (!std::isfinite(v)) throw IntegrabilityError("quadrature: non-finite integral value");
    if (error > std::max(q.abs_tol, 100.0 * q.rel_tol * std::max(1.0, std::fabs(v))))
        throw IntegrabilityError("quadrature: failed to converge to tolerance");
    return v;
}

double integrate_tail(const std::function<double(double)>& f, double a, const QuadControls& q) {
    // s = a + t/(1-t) maps t in (0,1) to (a, inf); Jacobian 1/(1-t)^2.
    auto g = [&f, a](double t) {
        const double om = 1.0 - t;
        const double s = a + t / om;
        const double v = f(s);
        return v / (om * om);
    };
    return run_tanh_sinh(g, 0.0, 1.0, q);
}

}  // namespace bhplab
