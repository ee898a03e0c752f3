#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bhplab/common.hpp"
#include "bhplab/levy_triple.hpp"
#include "bhplab/quadrature.hpp"

namespace bhplab {

// Levy densities of the subordinator. The stable density is normalized as
// mu(t) = (alpha/Gamma(1-alpha)) t^{-1-alpha} so that the jump part of the
// Laplace exponent is exactly lambda^alpha.
struct StableSub {
    double alpha = 0.5;
    double intensity = 1.0;  // jump part of the Laplace exponent: intensity * lambda^alpha
};
struct TemperedStableSub {
    double alpha = 0.5;
    double m = 1.0;
};
struct SumStableSub {
    double alpha = 0.5;
    double beta = 0.25;
};
struct GammaSub {};  // mu(t) = e^{-t}/t, Laplace exponent log(1+lambda)
struct CustomSub {
    std::function<double(double)> mu;
    std::string name;  // optional tag; named densities stay serializable
};

// mu(t) = e^{-t^2} t^{-3/2}: integrable tail that fails the shift inequality.
CustomSub gauss_tail_density();

using SubDensity =
    std::variant<std::monostate, StableSub, TemperedStableSub, SumStableSub, GammaSub, CustomSub>;

struct SamplingControls {
    // Small-jump cutoff for compound-Poisson sampling, relative to dt:
    // eps = eps_rel * dt. Jumps below eps are replaced by their first moment.
    // Custom densities must set this explicitly; named families default to 1e-4.
    std::optional<double> eps_rel;
    bool compensate_small_jumps = true;
};

class SubordinatorSpec {
  public:
    SubordinatorSpec(double drift, SubDensity density, SamplingControls sampling = {},
                     QuadControls quad = {});

    static SubordinatorSpec pure_drift(double b) { return SubordinatorSpec(b, std::monostate{}); }
    static SubordinatorSpec bm_plus_stable(double b, double alpha) {
        return SubordinatorSpec(b, StableSub{alpha});
    }
    static SubordinatorSpec tempered(double alpha, double m, double b = 0.0) {
        return SubordinatorSpec(b, TemperedStableSub{alpha, m});
    }
    static SubordinatorSpec bm_plus_log(double b) { return SubordinatorSpec(b, GammaSub{}); }

    double drift() const { return drift_; }
    const SubDensity& density() const { return density_; }
    const SamplingControls& sampling() const { return sampling_; }
    const QuadControls& quad() const { return quad_; }

    bool has_jumps() const { return !std::holds_alternative<std::monostate>(density_); }

    // Pointwise Levy density mu(t); throws if there is no jump part.
    double mu(double t) const;

    // int_lo^hi t mu(t) dt, used for small-jump compensation.
    double first_moment(double lo, double hi) const;

    // Tail intensity int_eps^inf mu(t) dt.
    double tail_intensity(double eps) const;

  private:
    double drift_;
    SubDensity density_;
    SamplingControls sampling_;
    QuadControls quad_;
};

// phi(lambda) = b lambda + int (1 - e^{-lambda t}) mu(t) dt. Closed forms for
// the named families, adaptive quadrature for Custom.
double laplace_exponent(const SubordinatorSpec& s, double lambda);

// phi^(lambda)(s) = lambda^-2 phi(lambda^2 s); converges to b*s as the scale
// grows (Brownian limit).
double rescaled_exponent(const SubordinatorSpec& s, double lambda_scale, double x);

struct Mu2Report {
    bool small_ok = false, shift_ok = false;
    double c_small = 0.0, c_shift = 0.0;       // sup of the ratios on the grids
    double witness_small = 0.0, witness_shift = 0.0;  // t where the cap was exceeded
};

// Empirical check of mu(t) <= c mu(2t) on (0,8) and mu(t) <= c mu(t+1) on
// (1, t_max]; a ratio above `cap` is a failure with the witnessing t. Failure
// is a valid result, not an error.
Mu2Report check_mu2(const SubordinatorSpec& s, double cap = 1e6, double t_max = 64.0,
                    int grid_points = 400);

// Jump density of the subordinate Brownian motion (W with generator Delta):
// j(r) = int (4 pi t)^{-d/2} e^{-r^2/(4t)} mu(t) dt. Closed form
// C(d,alpha) r^{-d-2 alpha} for the stable density, quadrature otherwise.
double jump_density(const SubordinatorSpec& s, double r, int d);

// Force the quadrature route (used to cross-check the closed forms).
double jump_density_quadrature(const SubordinatorSpec& s, double r, int d);

// Closed-form constant C(d, alpha) with j(r) = C r^{-d-2alpha} for StableSub.
double stable_jump_density_constant(int d, double alpha);

struct JDoublingReport {
    bool has_jumps = true;
    bool small_ok = false, shift_ok = false;
    double c_small = 0.0;  // sup over (0,2) of j(r)/j(2r)
    double c_shift = 0.0;  // sup over (1, r_max] of j(r)/j(r+1)
};

JDoublingReport check_j_doubling(const SubordinatorSpec& s, int d, double cap = 1e6,
                                 double r_max = 16.0, int grid_points = 400);

// Target sets for the jump-kernel mass N(x, .) = int j(|y-x|) dy.
struct OutsideBall {
    Vec center = vec0();
    double radius = 1.0;
};
struct Annulus {
    Vec center = vec0();
    double r_inner = 0.5, r_outer = 1.0;
};
using KernelSet = std::variant<OutsideBall, Annulus>;

double jump_kernel_mass(const SubordinatorSpec& s, int d, const Vec& x, const KernelSet& set);

// Levy triple of X_t = W_{S_t}: Gaussian part 2b*I (W has generator Delta) and
// radial jump density j. The stable subordinator maps to an exact
// IsotropicStable triple so that Phi keeps its closed forms.
LevyTriple subordinate_bm_triple(const SubordinatorSpec& s, int d);

}  // namespace bhplab
