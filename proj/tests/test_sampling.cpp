#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bhplab/sampling.hpp"

using namespace bhplab;

namespace {

// Monte Carlo Laplace-transform oracle: empirical E[e^{-l dS}] against
// e^{-dt phi(l)} within k standard errors.
void check_laplace(const SubordinatorSpec& spec, double dt, double lambda, long n, double k_se) {
    IncrementSampler sampler(spec, dt);
    Rng rng(2024, 17);
    Accum acc;
    for (long i = 0; i < n; ++i) acc.add(std::exp(-lambda * sampler.draw(rng).total));
    const double expect = std::exp(-dt * laplace_exponent(spec, lambda));
    INFO("lambda=", lambda, " mean=", acc.mean, " expect=", expect, " se=", acc.stderror());
    CHECK(std::fabs(acc.mean - expect) <= k_se * acc.stderror() + 1e-12);
}

}  // namespace

TEST_CASE("one-sided stable transform matches its Laplace transform") {
    Rng rng(99, 0);
    for (double alpha : {0.3, 0.5, 0.8}) {
        Accum a1, a4;
        for (int i = 0; i < 1000000; ++i) {
            const double s = standard_one_sided_stable(alpha, rng);
            a1.add(std::exp(-s));
            a4.add(std::exp(-4.0 * s));
        }
        CHECK(std::fabs(a1.mean - std::exp(-1.0)) <= 4.0 * a1.stderror());
        CHECK(std::fabs(a4.mean - std::exp(-std::pow(4.0, alpha))) <= 4.0 * a4.stderror());
    }
}

TEST_CASE("increment sampler: pure drift is deterministic") {
    IncrementSampler s(SubordinatorSpec::pure_drift(1.0), 0.01);
    Rng rng(1, 0);
    const StepIncrement inc = s.draw(rng);
    CHECK(inc.total == doctest::Approx(0.01).epsilon(1e-15));
    CHECK(inc.jump == 0.0);
}

TEST_CASE("increment sampler: laplace oracle per family") {
    // exact one-sided stable route
    check_laplace(SubordinatorSpec(0.0, StableSub{0.5}), 0.02, 1.0, 1000000, 3.0);
    check_laplace(SubordinatorSpec(0.0, StableSub{0.5}), 0.02, 4.0, 1000000, 3.0);
    // scaled intensity
    check_laplace(SubordinatorSpec(1.0, StableSub{0.5, 0.25}), 0.02, 2.0, 400000, 4.0);
    // sum of stables
    check_laplace(SubordinatorSpec(0.0, SumStableSub{0.5, 0.25}), 0.02, 1.0, 400000, 4.0);
    // compound Poisson with compensation
    check_laplace(SubordinatorSpec(0.0, TemperedStableSub{0.5, 1.0}), 0.02, 1.0, 1000000, 4.0);
    check_laplace(SubordinatorSpec(0.0, TemperedStableSub{0.5, 1.0}), 0.02, 4.0, 1000000, 4.0);
    check_laplace(SubordinatorSpec(1.0, GammaSub{}), 0.02, 1.0, 400000, 4.0);
    // custom density through the tabulated sampler
    CustomSub c;
    c.mu = [](double t) { return std::pow(t, -1.5) / (2.0 * std::sqrt(M_PI)); };
    SamplingControls sc;
    sc.eps_rel = 1e-4;
    check_laplace(SubordinatorSpec(0.0, c, sc), 0.02, 1.0, 400000, 4.0);
}

TEST_CASE("increment sampler: dS >= b dt always") {
    const SubordinatorSpec specs[] = {
        SubordinatorSpec(1.0, StableSub{0.5}),
        SubordinatorSpec(0.5, TemperedStableSub{0.3, 2.0}),
        SubordinatorSpec(2.0, GammaSub{}),
    };
    for (const auto& spec : specs) {
        IncrementSampler s(spec, 0.01);
        Rng rng(3, 5);
        for (int i = 0; i < 100000; ++i) {
            const StepIncrement inc = s.draw(rng);
            CHECK(inc.total >= spec.drift() * 0.01);
            CHECK(inc.jump >= 0.0);
        }
    }
}

TEST_CASE("increment sampler: custom density without a cutoff is a config error") {
    CustomSub c;
    c.mu = [](double t) { return std::exp(-t) / t; };
    const SubordinatorSpec spec(0.0, c);
    CHECK_THROWS_AS(IncrementSampler(spec, 0.01), ConfigError);
}

TEST_CASE("potential density: pure drift hits every level") {
    const PotentialDensityReport r =
        potential_density_estimate(SubordinatorSpec::pure_drift(1.0), {0.1, 1.0}, 100, 1);
    CHECK_FALSE(r.drift_warning);
    for (const auto& lv : r.levels) CHECK(lv.u.mean == 1.0);
}

TEST_CASE("potential density: no drift returns warning-tagged zeros") {
    const PotentialDensityReport r =
        potential_density_estimate(SubordinatorSpec(0.0, StableSub{0.5}), {0.5}, 100, 1);
    CHECK(r.drift_warning);
    CHECK(r.levels[0].u.mean == 0.0);
}

TEST_CASE("potential density: exact Laplace-inversion oracle for drift+stable(1/2)") {
    // phi(l) = l + sqrt(l): the potential density inverts in closed form to
    // u(x) = e^x erfc(sqrt(x)); u(0+) = 1.
    const SubordinatorSpec s(1.0, StableSub{0.5});
    const std::vector<double> levels = {1e-5, 0.001, 0.1, 1.0};
    const PotentialDensityReport a = potential_density_estimate(s, levels, 60000, 7, 1e-4);
    const PotentialDensityReport b = potential_density_estimate(s, levels, 60000, 8, 1e-5);
    auto exact = [](double x) { return std::exp(x) * std::erfc(std::sqrt(x)); };

    for (std::size_t i = 0; i < levels.size(); ++i) {
        INFO("x=", levels[i], " u_hat=", a.levels[i].u.mean, " exact=", exact(levels[i]));
        CHECK(std::fabs(a.levels[i].u.mean - exact(levels[i])) <=
              3.0 * a.levels[i].u.se + 2e-3);
    }
    // u -> 1 near 0
    CHECK(a.levels[0].u.mean > 0.99);
    // two cutoff resolutions agree within combined error
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const double se =
            std::sqrt(a.levels[i].u.se * a.levels[i].u.se + b.levels[i].u.se * b.levels[i].u.se);
        CHECK(std::fabs(a.levels[i].u.mean - b.levels[i].u.mean) <= 3.0 * se + 2e-3);
    }
    // monotone decreasing in the level
    for (std::size_t i = 1; i < levels.size(); ++i)
        CHECK(a.levels[i - 1].u.mean >= a.levels[i].u.mean);
}
