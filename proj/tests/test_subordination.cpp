#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bhplab/pruitt.hpp"
#include "bhplab/stats.hpp"
#include "bhplab/subordinator.hpp"
#include "test_oracles.hpp"

using namespace bhplab;

namespace {

SubordinatorSpec custom_stable_half() {
    // mu(t) = t^{-3/2} / (2 sqrt(pi)); same as StableSub{1/2} but exercised
    // through the generic quadrature route
    CustomSub c;
    c.mu = [](double t) { return std::pow(t, -1.5) / (2.0 * std::sqrt(M_PI)); };
    SamplingControls sc;
    sc.eps_rel = 1e-4;
    return SubordinatorSpec(0.0, c, sc);
}

}  // namespace

TEST_CASE("laplace exponent: anchors") {
    const SubordinatorSpec drift = SubordinatorSpec::pure_drift(1.0);
    CHECK(laplace_exponent(drift, 0.0) == 0.0);
    CHECK(laplace_exponent(SubordinatorSpec::pure_drift(1.0), 7.0) == doctest::Approx(7.0));

    // quadrature against the closed form sqrt(lambda)
    const SubordinatorSpec cs = custom_stable_half();
    CHECK(laplace_exponent(cs, 4.0) == doctest::Approx(2.0).epsilon(1e-8));
    const SubordinatorSpec st(0.0, StableSub{0.5});
    for (double l : {0.3, 1.0, 9.0})
        CHECK(laplace_exponent(cs, l) == doctest::Approx(laplace_exponent(st, l)).epsilon(1e-8));
}

TEST_CASE("laplace exponent: named families") {
    const SubordinatorSpec ts(1.0, TemperedStableSub{0.5, 2.0});
    CHECK(laplace_exponent(ts, 3.0) ==
          doctest::Approx(3.0 + std::sqrt(5.0) - std::sqrt(2.0)).epsilon(1e-13));
    const SubordinatorSpec g(0.5, GammaSub{});
    CHECK(laplace_exponent(g, 1.0) == doctest::Approx(0.5 + std::log(2.0)).epsilon(1e-13));
    const SubordinatorSpec ss(0.0, SumStableSub{0.5, 0.25});
    CHECK(laplace_exponent(ss, 16.0) == doctest::Approx(4.0 + 2.0).epsilon(1e-13));
}

TEST_CASE("phi(lambda) - b lambda = lambda^alpha exactly for drift+stable") {
    const SubordinatorSpec s(1.0, StableSub{0.5});
    for (double l : {0.5, 2.0, 100.0})
        CHECK(laplace_exponent(s, l) - l == doctest::Approx(std::sqrt(l)).epsilon(1e-12));
}

TEST_CASE("mu2 checker: stable ratio constant 2^(1+alpha)") {
    for (double alpha : {0.3, 0.5, 0.8}) {
        const SubordinatorSpec s(0.0, StableSub{alpha});
        const Mu2Report r = check_mu2(s);
        CHECK(r.small_ok);
        CHECK(r.shift_ok);
        CHECK(std::fabs(r.c_small - std::pow(2.0, 1.0 + alpha)) <= 1e-6);
    }
}

TEST_CASE("mu2 checker: tempered stable passes with finite constants") {
    const SubordinatorSpec s(0.0, TemperedStableSub{0.5, 1.0});
    const Mu2Report r = check_mu2(s);
    CHECK(r.small_ok);
    CHECK(r.shift_ok);
    // ratios e^{mt} 2^{1+a} on (0,8) and e^m ((t+1)/t)^{3/2} on (1,inf); the
    // shift supremum is approached as t -> 1+ (grid is open at 1)
    CHECK(r.c_small == doctest::Approx(std::pow(2.0, 1.5) * std::exp(8.0)).epsilon(0.02));
    CHECK(r.c_shift > 6.0);
    CHECK(r.c_shift < std::exp(1.0) * std::pow(2.0, 1.5) + 1e-9);
}

TEST_CASE("mu2 checker: gaussian-tailed density fails the shift inequality") {
    const SubordinatorSpec s(0.0, gauss_tail_density());
    const Mu2Report r = check_mu2(s);
    // shift ratio e^{2t+1}((t+1)/t)^{3/2} grows without bound
    CHECK_FALSE(r.shift_ok);
    CHECK(r.witness_shift > 1.0);
    // the small ratio 2^{3/2} e^{3t^2} stays finite on (0,8) but passes the
    // 1e6 cap near t = sqrt(ln(1e6/2^1.5)/3)
    const double t_star = std::sqrt(std::log(1e6 / std::pow(2.0, 1.5)) / 3.0);
    CHECK_FALSE(r.small_ok);
    CHECK(r.witness_small == doctest::Approx(t_star).epsilon(0.05));
}

TEST_CASE("jump density: stable closed form against quadrature") {
    for (double alpha : {0.3, 0.5, 0.75}) {
        const SubordinatorSpec s(0.0, StableSub{alpha});
        for (int d : {1, 2, 3}) {
            for (double r : {0.05, 0.5, 2.0}) {
                const double cf = jump_density(s, r, d);
                const double q = jump_density_quadrature(s, r, d);
                CHECK(q == doctest::Approx(cf).epsilon(1e-7));
            }
        }
    }
}

TEST_CASE("jump density: exact power-law ratios and monotonicity") {
    const SubordinatorSpec s(0.0, StableSub{0.5});
    // d + 2 alpha = 2 in d = 1: j(1)/j(2) = 2^2 = 4
    CHECK(jump_density(s, 1.0, 1) / jump_density(s, 2.0, 1) == doctest::Approx(4.0).epsilon(1e-6));

    const SubordinatorSpec ts(0.0, TemperedStableSub{0.5, 1.0});
    double prev = jump_density(ts, 0.01, 2);
    for (double r : {0.05, 0.2, 1.0, 3.0}) {
        const double v = jump_density(ts, r, 2);
        CHECK(v < prev);
        CHECK(v > 0.0);
        prev = v;
    }
}

TEST_CASE("jump density: log-log slope equals -(d + 2 alpha)") {
    const SubordinatorSpec s(0.0, StableSub{0.5});
    std::vector<double> rs, js;
    for (int i = 0; i <= 16; ++i) {
        const double r = 0.01 * std::pow(50.0, i / 16.0);
        rs.push_back(std::log(r));
        js.push_back(std::log(jump_density_quadrature(s, r, 2)));
    }
    const LineFit f = fit_line(rs, js);
    CHECK(std::fabs(f.slope - (-3.0)) <= 0.05);
}

TEST_CASE("j doubling: stable constant 2^(d+2alpha); pure drift refused") {
    const SubordinatorSpec s(0.0, StableSub{0.5});
    const JDoublingReport r = check_j_doubling(s, 2);
    CHECK(r.small_ok);
    CHECK(std::fabs(r.c_small - 8.0) <= 1e-3);

    CHECK_THROWS_AS(check_j_doubling(SubordinatorSpec::pure_drift(1.0), 2), PreconditionError);

    const SubordinatorSpec ts(0.0, TemperedStableSub{0.5, 1.0});
    const JDoublingReport rt = check_j_doubling(ts, 2);
    CHECK(rt.small_ok);
    CHECK(rt.shift_ok);
    CHECK(rt.c_small > 0.0);
}

TEST_CASE("jump kernel mass: centered complement reduces to the radial tail") {
    const SubordinatorSpec s(0.0, StableSub{0.5});
    // alpha=1/2, d=2: j = C r^{-3}, mass(R) = 2 pi C / R
    const double C = stable_jump_density_constant(2, 0.5);
    for (double R : {0.25, 0.5, 1.0}) {
        const double m = jump_kernel_mass(s, 2, vec0(), OutsideBall{vec0(), R});
        CHECK(m == doctest::Approx(2.0 * M_PI * C / R).epsilon(1e-6));
    }
    // halving the radius scales the tail mass by 2^{2 alpha} = 2
    const double m1 = jump_kernel_mass(s, 2, vec0(), OutsideBall{vec0(), 0.5});
    const double m2 = jump_kernel_mass(s, 2, vec0(), OutsideBall{vec0(), 1.0});
    CHECK(m1 / m2 == doctest::Approx(2.0).epsilon(1e-4));
}

TEST_CASE("jump kernel mass: annuli are additive over shells") {
    const SubordinatorSpec s(0.0, StableSub{0.5});
    const double whole = jump_kernel_mass(s, 2, vec0(), Annulus{vec0(), 0.5, 4.0});
    const double a = jump_kernel_mass(s, 2, vec0(), Annulus{vec0(), 0.5, 1.0});
    const double b = jump_kernel_mass(s, 2, vec0(), Annulus{vec0(), 1.0, 4.0});
    CHECK(whole == doctest::Approx(a + b).epsilon(1e-8));
}

TEST_CASE("jump kernel mass: off-center within the doubling band") {
    const SubordinatorSpec s(0.0, StableSub{0.5});
    const double c = check_j_doubling(s, 2).c_small;
    const double R = 1.0;
    const double centered = jump_kernel_mass(s, 2, vec0(), OutsideBall{vec0(), R});
    for (double off : {0.1, 0.3, 0.5}) {
        const double m = jump_kernel_mass(s, 2, make_vec(off, 0.0), OutsideBall{vec0(), R});
        CHECK(m / centered <= c * (1.0 + 1e-9));
        CHECK(m / centered >= 1.0 / c * (1.0 - 1e-9));
    }
}

TEST_CASE("rescaled exponent: anchors and Brownian limit") {
    const SubordinatorSpec drift = SubordinatorSpec::pure_drift(1.0);
    CHECK(rescaled_exponent(drift, 10.0, 3.0) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(rescaled_exponent(drift, 10.0, 0.0) == 0.0);

    for (double alpha : {0.25, 0.5, 0.75}) {
        const SubordinatorSpec s(1.0, StableSub{alpha});
        for (double lam : {10.0, 1000.0}) {
            const double dev = rescaled_exponent(s, lam, 1.0) - 1.0;
            CHECK(dev == doctest::Approx(std::pow(lam, 2.0 * alpha - 2.0)).epsilon(1e-10));
        }
        // |phi^(lambda)(s) - b s| nonincreasing along lambda = 10, 100, 1000
        for (double x : {0.5, 1.0, 4.0}) {
            double prev = 1e300;
            for (double lam : {10.0, 100.0, 1000.0}) {
                const double dev = std::fabs(rescaled_exponent(s, lam, x) - x);
                CHECK(dev <= prev * (1.0 + 1e-12));
                prev = dev;
            }
        }
    }
}

TEST_CASE("subordinate BM triple: stable case is exactly isotropic stable") {
    const SubordinatorSpec s(1.0, StableSub{0.5});
    const LevyTriple t = subordinate_bm_triple(s, 2);
    CHECK(t.gaussian_trace() == doctest::Approx(4.0));  // 2 b d
    const auto* st = std::get_if<IsotropicStable>(&t.jumps());
    REQUIRE(st != nullptr);
    CHECK(st->alpha == doctest::Approx(1.0));
    CHECK(st->c == doctest::Approx(stable_jump_density_constant(2, 0.5)));

    // Phi closed form vs the quadrature route through j
    const SubordinatorSpec ts(1.0, TemperedStableSub{0.5, 1.0});
    const LevyTriple tt = subordinate_bm_triple(ts, 2);
    const double phi = pruitt_phi(tt, 0.5);
    CHECK(phi > 4.0 * 2.0 * 2.0);  // at least the Gaussian part 2bd/r^2
    CHECK(std::isfinite(phi));
}

TEST_CASE("subordinator spec: custom integrability check") {
    CustomSub bad;
    bad.mu = [](double t) { return std::pow(t, -2.5); };  // (1 ^ t) mu not integrable
    CHECK_THROWS_AS(SubordinatorSpec(0.0, bad), IntegrabilityError);
}
