#pragma once

#include <vector>

#include "bhplab/stats.hpp"

namespace bhplab {

// Axis exponent fit on dyadic samples: model 1 is log v = c + q log a; model 2
// adds a log-correction regressor log(ln(1/(2a))). The correction is flagged
// when an F-statistic (threshold 10) and a coefficient floor (0.3) both pass;
// q_hat then comes from the corrected model.
struct AxisFit {
    double q_pure = 0.0;
    double q_corrected = 0.0;
    double beta = 0.0;
    double f_stat = 0.0;
    bool log_correction_detected = false;
    double q_hat = 0.0;
};

AxisFit fit_axis_exponent(const std::vector<double>& a, const std::vector<double>& v);

// Least-squares slope of log y against log x.
LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace bhplab
