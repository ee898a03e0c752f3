#pragma once

#include <complex>
#include <string>
#include <vector>

#include "bhplab/levy_triple.hpp"

namespace bhplab {

// Truncated drift: b - 1_{r<=1} int_{r<|z|<=1} z nu(dz) + 1_{r>1} int_{1<|z|<=r} z nu(dz).
// For rotation-symmetric jump measures the correction vanishes exactly and no
// quadrature is performed.
Vec truncated_drift(const LevyTriple& t, double r);

// Pruitt's function Phi(r) = r^-2 sum a_ii + int (|z|^2/r^2 ^ 1) nu(dz) + |b_r|/r.
// Returns 0 only for the fully degenerate triple.
double pruitt_phi(const LevyTriple& t, double r);

// Throws DegenerateTripleError when Phi vanishes identically; used by callers
// that divide by Phi.
double pruitt_phi_checked(const LevyTriple& t, double r);

struct PruittComponents {
    double k = 0.0;  // r^-2 (sum a_ii + int_{|z|<=r} |z|^2 nu)
    double g = 0.0;  // nu{|z| > r}
    double l = 0.0;  // |b_r| / r
    double sum() const { return k + g + l; }
};

PruittComponents pruitt_components(const LevyTriple& t, double r);

struct DoublingReport {
    bool ok = true;
    double worst_ratio_lo = 0.0;    // min over grid of Phi(2r)/Phi(r)
    double worst_ratio_hi = 0.0;    // max over grid of Phi(2r)/Phi(r)
    double violating_r = 0.0;       // set when ok = false
    std::vector<double> ratios;
};

// Checks Phi(r)/16 <= Phi(2r) <= 3 Phi(r) on the grid; a violation is a hard
// failure naming r (the inequality is a theorem, so it flags a quadrature bug).
DoublingReport check_phi_doubling(const LevyTriple& t, const std::vector<double>& r_grid);

// Levy-Khintchine exponent psi(u); E exp(i(u,Y_t)) = exp(t psi(u)).
std::complex<double> char_exponent(const LevyTriple& t, const Vec& u);

struct HartmanWintnerReport {
    std::vector<double> magnitudes;
    std::vector<double> ratios;     // |Re psi(xi)| / ln(1+|xi|)
    bool increasing = false;
    std::string verdict;            // "diverges (evidence)", "fails", "inconclusive"
};

// Finite-grid evidence for the Hartman-Wintner density condition. A limit
// statement cannot be certified from finitely many points; the verdict is a
// documented heuristic, not a proof.
HartmanWintnerReport check_hartman_wintner(const LevyTriple& t,
                                           const std::vector<double>& xi_magnitudes);

}  // namespace bhplab
