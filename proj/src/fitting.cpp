#include "bhplab/fitting.hpp"

#include <cmath>

#include "bhplab/common.hpp"

namespace bhplab {

namespace {

// Solve the 3x3 normal equations by Gaussian elimination with pivoting.
bool solve3(double m[3][4]) {
    for (int c = 0; c < 3; ++c) {
        int piv = c;
        for (int r = c + 1; r < 3; ++r)
            if (std::fabs(m[r][c]) > std::fabs(m[piv][c])) piv = r;
        if (std::fabs(m[piv][c]) < 1e-14) return false;
        for (int k = 0; k < 4; ++k) std::swap(m[c][k], m[piv][k]);
        for (int r = 0; r < 3; ++r) {
            if (r == c) continue;
            const double f = m[r][c] / m[c][c];
            for (int k = c; k < 4; ++k) m[r][k] -= f * m[c][k];
        }
    }
    for (int c = 0; c < 3; ++c) m[c][3] /= m[c][c];
    return true;
}

}  // namespace

LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> lx, ly;
    lx.reserve(x.size());
    ly.reserve(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0 && y[i] > 0.0))
            throw PreconditionError("fit_loglog: values must be positive");
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    return fit_line(lx, ly);
}

AxisFit fit_axis_exponent(const std::vector<double>& a, const std::vector<double>& v) {
    const std::size_t n = a.size();
    if (n < 5 || v.size() != n)
        throw PreconditionError("fit_axis_exponent: need at least 5 sample points");
    double amin = a[0], amax = a[0];
    for (double ai : a) {
        amin = std::min(amin, ai);
        amax = std::max(amax, ai);
    }
    if (!(amax / amin >= 8.0))
        throw PreconditionError("fit_axis_exponent: insufficient dynamic range");
    if (!(amax < 0.5))
        throw PreconditionError("fit_axis_exponent: samples must satisfy a < 1/2");

    std::vector<double> lx(n), ly(n), lc(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(v[i] > 0.0)) throw PreconditionError("fit_axis_exponent: values must be positive");
        lx[i] = std::log(a[i]);
        ly[i] = std::log(v[i]);
        lc[i] = std::log(std::log(1.0 / (2.0 * a[i])));
    }

    AxisFit fit;
    const LineFit m1 = fit_line(lx, ly);
    fit.q_pure = m1.slope;

    // Model 2: ly = c + q lx + beta lc, normal equations.
    double m[3][4] = {{0}};
    for (std::size_t i = 0; i < n; ++i) {
        const double row[3] = {1.0, lx[i], lc[i]};
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) m[r][c] += row[r] * row[c];
            m[r][3] += row[r] * ly[i];
        }
    }
    double sse2 = 0.0;
    if (solve3(m)) {
        fit.q_corrected = m[1][3];
        fit.beta = m[2][3];
        for (std::size_t i = 0; i < n; ++i) {
            const double r = ly[i] - (m[0][3] + m[1][3] * lx[i] + m[2][3] * lc[i]);
            sse2 += r * r;
        }
        const double dof = static_cast<double>(n) - 3.0;
        if (dof > 0.0 && sse2 > 0.0)
            fit.f_stat = (m1.sse - sse2) / (sse2 / dof);
        else
            fit.f_stat = m1.sse > 1e-20 ? 1e12 : 0.0;
        fit.log_correction_detected = fit.f_stat > 10.0 && fit.beta > 0.3;
    } else {
        fit.q_corrected = m1.slope;
    }
    fit.q_hat = fit.log_correction_detected ? fit.q_corrected : fit.q_pure;
    return fit;
}

}  // namespace bhplab
