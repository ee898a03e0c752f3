#pragma once

#include <memory>
#include <vector>

#include "bhplab/rng.hpp"
#include "bhplab/stats.hpp"
#include "bhplab/subordinator.hpp"

namespace bhplab {

// One subordinator increment over a step of physical length dt.
// total = drift*dt + small-jump compensation + jumps; total >= drift*dt always.
struct StepIncrement {
    double total = 0.0;
    double jump = 0.0;  // explicit jump mass of the step
    double continuous() const { return total - jump; }
};

// Jump sizes from the tail mu restricted to (eps, inf). Candidate events fire
// at rate(); a draw may return 0 when a tempered candidate is thinned away.
class TailJumpSampler {
  public:
    TailJumpSampler(const SubordinatorSpec& spec, double eps);
    double rate() const { return rate_; }
    double eps() const { return eps_; }
    double draw(Rng& rng) const;

  private:
    enum class Mode { stable, tempered, sum_stable, gamma, table };
    Mode mode_ = Mode::stable;
    double eps_ = 0.0;
    double rate_ = 0.0;
    double alpha_ = 0.0, beta_ = 0.0;
    double rate_a_ = 0.0;
    double tempering_ = 0.0;
    std::vector<double> table_t_, table_f_;
};

// Draws S_{t+dt} - S_t. Stable and sum-stable parts use the exact one-sided
// stable transform; tempered stable, gamma and custom densities use compound
// Poisson above the cutoff eps = eps_rel*dt with first-moment compensation of
// the discarded small jumps.
class IncrementSampler {
  public:
    IncrementSampler(const SubordinatorSpec& spec, double dt);

    StepIncrement draw(Rng& rng) const;
    double dt() const { return dt_; }
    // drift*dt + compensation; the part of the increment that is not an
    // explicit jump.
    double continuous_part() const { return base_; }

  private:
    enum class Mode { drift_only, stable, sum_stable, cp };

    Mode mode_ = Mode::drift_only;
    double dt_ = 0.0;
    double base_ = 0.0;                 // drift*dt + compensation
    double alpha_ = 0.0, beta_ = 0.0;
    double dt_1a_ = 0.0, dt_1b_ = 0.0;  // dt^{1/alpha}, dt^{1/beta}
    std::shared_ptr<const TailJumpSampler> tail_;
};

// Effective small-jump cutoff ratio; throws ConfigError for custom densities
// without an explicit setting.
double effective_eps_rel(const SubordinatorSpec& spec);

// One-sided alpha-stable variable S with E e^{-l S} = e^{-l^alpha} (Kanter's
// transform).
double standard_one_sided_stable(double alpha, Rng& rng);

struct PotentialDensityPoint {
    double x = 0.0;
    Estimate u;
};

struct PotentialDensityReport {
    std::vector<PotentialDensityPoint> levels;
    bool drift_warning = false;  // b = 0: points are hit with probability 0
};

// u(x) = P(S hits the level x exactly), estimated as the probability that no
// jump straddles x. Straddle detection uses the exact jump record of the
// compound-Poisson representation (cutoff eps_rel * min level), never
// discretized path values.
PotentialDensityReport potential_density_estimate(const SubordinatorSpec& spec,
                                                  const std::vector<double>& x_levels,
                                                  long long n_paths, std::uint64_t seed,
                                                  double eps_rel = 1e-4);

}  // namespace bhplab
