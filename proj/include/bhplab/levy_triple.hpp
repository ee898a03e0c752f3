#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "bhplab/common.hpp"
#include "bhplab/quadrature.hpp"

namespace bhplab {

// Jump measure variants. Isotropic radial: nu(dz) = rho(|z|) dz. In d = 1 a
// density may be declared one-sided (supported on the positive axis), which is
// what the drift-truncation examples exercise.
enum class RadialSupport { symmetric, positive_axis };

struct IsotropicRadial {
    std::function<double(double)> rho;
    RadialSupport support = RadialSupport::symmetric;
    QuadControls quad;
    // Optional hint: radius beyond which rho vanishes (tightens tail quadrature).
    std::optional<double> support_radius;
    // Radii where rho is non-smooth; quadrature splits there.
    std::vector<double> breakpoints;
};

// nu(dz) = c |z|^{-d-alpha} dz with 0 < alpha < 2.
struct IsotropicStable {
    double alpha = 1.0;
    double c = 1.0;
};

using JumpMeasure = std::variant<std::monostate, IsotropicRadial, IsotropicStable>;

class LevyTriple {
  public:
    // Validates symmetry/PSD of the Gaussian matrix and (1 ^ |z|^2)-integrability
    // of the jump measure; throws on violation.
    LevyTriple(int dim, const double gaussian[kMaxDim][kMaxDim], const Vec& drift,
               JumpMeasure jumps);

    static LevyTriple pure_gaussian(int dim, double a_diag);
    static LevyTriple pure_drift(int dim, const Vec& b);
    static LevyTriple stable(int dim, double alpha, double c = 1.0, double a_diag = 0.0);

    int dim() const { return dim_; }
    double gaussian(int i, int j) const { return a_[i][j]; }
    double gaussian_trace() const;
    const Vec& drift() const { return b_; }
    const JumpMeasure& jumps() const { return jumps_; }

    bool has_jumps() const { return !std::holds_alternative<std::monostate>(jumps_); }
    bool is_degenerate() const;  // A = 0, b = 0, nu = 0

    // integral of (1 ^ |z|^2) nu(dz); cached from construction.
    double small_jump_mass() const { return small_jump_mass_; }

  private:
    int dim_;
    double a_[kMaxDim][kMaxDim];
    Vec b_;
    JumpMeasure jumps_;
    double small_jump_mass_ = 0.0;
};

// Radial helpers for an isotropic measure: integral over {lo < |z| <= hi} of
// w(|z|) nu(dz), computed as surface * int w(s) rho(s) s^{d-1} ds (one-sided
// densities drop the surface factor in d = 1).
double radial_jump_integral(const LevyTriple& t, double lo, double hi,
                            const std::function<double(double)>& w);
double radial_jump_tail(const LevyTriple& t, double lo, const std::function<double(double)>& w);

}  // namespace bhplab
