#include "bhplab/subordinator.hpp"

#include <algorithm>
#include <cmath>

namespace bhplab {

namespace {

double stable_mu(double alpha, double t) {
    return alpha / std::tgamma(1.0 - alpha) * std::pow(t, -1.0 - alpha);
}

}  // namespace

SubordinatorSpec::SubordinatorSpec(double drift, SubDensity density, SamplingControls sampling,
                                   QuadControls quad)
    : drift_(drift), density_(std::move(density)), sampling_(sampling), quad_(quad) {
    if (!(drift_ >= 0.0)) throw PreconditionError("SubordinatorSpec: drift must be >= 0");
    if (const auto* st = std::get_if<StableSub>(&density_)) {
        if (!(st->alpha > 0.0 && st->alpha < 1.0) || !(st->intensity > 0.0))
            throw PreconditionError("StableSub: need alpha in (0,1), intensity > 0");
    } else if (const auto* ts = std::get_if<TemperedStableSub>(&density_)) {
        if (!(ts->alpha > 0.0 && ts->alpha < 1.0) || !(ts->m > 0.0))
            throw PreconditionError("TemperedStableSub: need alpha in (0,1), m > 0");
    } else if (const auto* ss = std::get_if<SumStableSub>(&density_)) {
        if (!(ss->alpha > 0.0 && ss->alpha < 1.0 && ss->beta > 0.0 && ss->beta < 1.0))
            throw PreconditionError("SumStableSub: exponents must be in (0,1)");
    } else if (std::holds_alternative<CustomSub>(density_)) {
        // (1 ^ t)-integrability, checked once at construction.
        const QuadControls saved = quad_;
        quad_.divergence_cap = 1e40;
        const double m1 = first_moment(0.0, 1.0);
        const double tail = tail_intensity(1.0);
        quad_ = saved;
        if (!std::isfinite(m1) || !std::isfinite(tail))
            throw IntegrabilityError("SubordinatorSpec: int (1^t) mu(t) dt diverges");
    }
}

double SubordinatorSpec::mu(double t) const {
    if (t <= 0.0) throw PreconditionError("mu: t must be > 0");
    if (const auto* st = std::get_if<StableSub>(&density_))
        return st->intensity * stable_mu(st->alpha, t);
    if (const auto* ts = std::get_if<TemperedStableSub>(&density_))
        return stable_mu(ts->alpha, t) * std::exp(-ts->m * t);
    if (const auto* ss = std::get_if<SumStableSub>(&density_))
        return stable_mu(ss->alpha, t) + stable_mu(ss->beta, t);
    if (std::holds_alternative<GammaSub>(density_)) return std::exp(-t) / t;
    if (const auto* cu = std::get_if<CustomSub>(&density_)) return cu->mu(t);
    throw PreconditionError("mu: subordinator has no jump part");
}

double SubordinatorSpec::first_moment(double lo, double hi) const {
    if (!has_jumps() || !(hi > lo)) return 0.0;
    if (const auto* st = std::get_if<StableSub>(&density_)) {
        const double a = st->alpha;
        return st->intensity * a / std::tgamma(1.0 - a) / (1.0 - a) *
               (std::pow(hi, 1.0 - a) - std::pow(lo, 1.0 - a));
    }
    return integrate([this](double t) { return t * mu(t); }, lo, hi, quad_);
}

double SubordinatorSpec::tail_intensity(double eps) const {
    if (!has_jumps()) return 0.0;
    if (!(eps > 0.0)) throw PreconditionError("tail_intensity: eps must be > 0");
    if (const auto* st = std::get_if<StableSub>(&density_))
        return st->intensity * std::pow(eps, -st->alpha) / std::tgamma(1.0 - st->alpha);
    if (const auto* ss = std::get_if<SumStableSub>(&density_))
        return std::pow(eps, -ss->alpha) / std::tgamma(1.0 - ss->alpha) +
               std::pow(eps, -ss->beta) / std::tgamma(1.0 - ss->beta);
    return integrate_tail([this](double t) { return mu(t); }, eps, quad_);
}

double laplace_exponent(const SubordinatorSpec& s, double lambda) {
    if (!(lambda >= 0.0)) throw PreconditionError("laplace_exponent: lambda must be >= 0");
    if (lambda == 0.0) return 0.0;
    const double lin = s.drift() * lambda;
    if (const auto* st = std::get_if<StableSub>(&s.density()))
        return lin + st->intensity * std::pow(lambda, st->alpha);
    if (const auto* ts = std::get_if<TemperedStableSub>(&s.density()))
        return lin + std::pow(lambda + ts->m, ts->alpha) - std::pow(ts->m, ts->alpha);
    if (const auto* ss = std::get_if<SumStableSub>(&s.density()))
        return lin + std::pow(lambda, ss->alpha) + std::pow(lambda, ss->beta);
    if (std::holds_alternative<GammaSub>(s.density())) return lin + std::log1p(lambda);
    if (!s.has_jumps()) return lin;
    auto f = [&s, lambda](double t) { return -std::expm1(-lambda * t) * s.mu(t); };
    return lin + integrate(f, 0.0, 1.0, s.quad()) + integrate_tail(f, 1.0, s.quad());
}

double rescaled_exponent(const SubordinatorSpec& s, double lambda_scale, double x) {
    if (!(lambda_scale > 0.0)) throw PreconditionError("rescaled_exponent: scale must be > 0");
    if (!(x >= 0.0)) throw PreconditionError("rescaled_exponent: argument must be >= 0");
    const double l2 = lambda_scale * lambda_scale;
    return laplace_exponent(s, l2 * x) / l2;
}

Mu2Report check_mu2(const SubordinatorSpec& s, double cap, double t_max, int grid_points) {
    if (!s.has_jumps()) throw PreconditionError("check_mu2: no jump part");
    Mu2Report rep;
    // mu(t) <= c mu(2t) on (0, 8): log-spaced grid.
    rep.small_ok = true;
    const double lo = 1e-6, hi = 8.0;
    for (int i = 0; i < grid_points; ++i) {
        const double f = static_cast<double>(i) / (grid_points - 1);
        const double t = lo * std::pow(hi / lo, f);
        const double ratio = s.mu(t) / s.mu(2.0 * t);
        if (!(ratio <= cap)) {
            rep.small_ok = false;
            rep.witness_small = t;
            rep.c_small = ratio;
            break;
        }
        rep.c_small = std::max(rep.c_small, ratio);
    }
    // mu(t) <= c mu(t+1) on (1, t_max]: linear grid.
    rep.shift_ok = true;
    for (int i = 0; i < grid_points; ++i) {
        const double t = 1.0 + (t_max - 1.0) * (i + 1) / static_cast<double>(grid_points);
        const double ratio = s.mu(t) / s.mu(t + 1.0);
        if (!(ratio <= cap)) {
            rep.shift_ok = false;
            rep.witness_shift = t;
            rep.c_shift = ratio;
            break;
        }
        rep.c_shift = std::max(rep.c_shift, ratio);
    }
    return rep;
}

CustomSub gauss_tail_density() {
    CustomSub c;
    c.mu = [](double t) { return std::exp(-t * t) * std::pow(t, -1.5); };
    c.name = "gauss_tail";
    return c;
}

double stable_jump_density_constant(int d, double alpha) {
    return std::pow(4.0, alpha) * alpha * std::tgamma(d / 2.0 + alpha) /
           (std::pow(M_PI, d / 2.0) * std::tgamma(1.0 - alpha));
}

double jump_density_quadrature(const SubordinatorSpec& s, double r, int d) {
    if (!(r > 0.0)) throw PreconditionError("jump_density: r must be > 0");
    if (!s.has_jumps()) throw PreconditionError("jump_density: no jump part");
    // Substitute t = r^2/(4u): j(r) = (pi r^2)^{-d/2} (r^2/4) int u^{d/2-2} e^{-u} mu(r^2/(4u)) du.
    const double r2 = r * r;
    const double pref = std::pow(M_PI * r2, -d / 2.0) * (r2 / 4.0);
    auto f = [&](double u) {
        return std::pow(u, d / 2.0 - 2.0) * std::exp(-u) * s.mu(r2 / (4.0 * u));
    };
    double v = pref * (integrate(f, 0.0, 1.0, s.quad()) + integrate_tail(f, 1.0, s.quad()));
    if (!std::isfinite(v)) throw IntegrabilityError("jump_density: quadrature diverged");
    return v;
}

double jump_density(const SubordinatorSpec& s, double r, int d) {
    if (!(r > 0.0)) throw PreconditionError("jump_density: r must be > 0");
    if (!s.has_jumps()) throw PreconditionError("jump_density: no jump part");
    if (const auto* st = std::get_if<StableSub>(&s.density()))
        return st->intensity * stable_jump_density_constant(d, st->alpha) *
               std::pow(r, -d - 2.0 * st->alpha);
    if (const auto* ss = std::get_if<SumStableSub>(&s.density()))
        return stable_jump_density_constant(d, ss->alpha) * std::pow(r, -d - 2.0 * ss->alpha) +
               stable_jump_density_constant(d, ss->beta) * std::pow(r, -d - 2.0 * ss->beta);
    return jump_density_quadrature(s, r, d);
}

JDoublingReport check_j_doubling(const SubordinatorSpec& s, int d, double cap, double r_max,
                                 int grid_points) {
    if (!s.has_jumps()) throw PreconditionError("check_j_doubling: no jump part");
    JDoublingReport rep;
    rep.small_ok = rep.shift_ok = true;
    const double lo = 1e-4, hi = 2.0;
    for (int i = 0; i < grid_points; ++i) {
        const double f = static_cast<double>(i) / (grid_points - 1);
        const double r = lo * std::pow(hi / lo, f);
        const double ratio = jump_density(s, r, d) / jump_density(s, 2.0 * r, d);
        rep.c_small = std::max(rep.c_small, ratio);
        if (!(ratio <= cap)) {
            rep.small_ok = false;
            break;
        }
    }
    for (int i = 0; i < grid_points; ++i) {
        const double r = 1.0 + (r_max - 1.0) * (i + 1) / static_cast<double>(grid_points);
        const double ratio = jump_density(s, r, d) / jump_density(s, r + 1.0, d);
        rep.c_shift = std::max(rep.c_shift, ratio);
        if (!(ratio <= cap)) {
            rep.shift_ok = false;
            break;
        }
    }
    return rep;
}

namespace {

// Fraction of the sphere {|u| = s} (centered at the origin) lying inside the
// ball B(c, R), with |c| = dist. Handles d = 1, 2, 3.
double sphere_fraction_inside(int d, double s, double dist, double R) {
    if (dist + s <= R) return 1.0;
    if (s >= dist + R || s + R <= dist) return 0.0;
    if (dist == 0.0) return s < R ? 1.0 : 0.0;
    const double cosb = (s * s + dist * dist - R * R) / (2.0 * s * dist);
    if (d == 1) {
        // Two points +-s: +s is inside iff |s-dist| < R (towards c), -s iff s+dist < R.
        double frac = 0.0;
        if (std::fabs(s - dist) < R) frac += 0.5;
        if (s + dist < R) frac += 0.5;
        return frac;
    }
    const double cb = std::clamp(cosb, -1.0, 1.0);
    if (d == 2) return std::acos(cb) / M_PI;
    return 0.5 * (1.0 - cb);  // spherical cap fraction, d = 3
}

double mass_outside_ball(const SubordinatorSpec& s, int d, double dist, double R) {
    // int_{|u - c| >= R} j(|u|) du with |c| = dist < R; integrand vanishes on
    // the sphere radii fully inside the ball, so the small-jump singularity is
    // excluded.
    const double surf = sphere_area(d);
    auto f = [&](double t) {
        const double frac_out = 1.0 - sphere_fraction_inside(d, t, dist, R);
        if (frac_out <= 0.0) return 0.0;
        return surf * frac_out * jump_density(s, t, d) * std::pow(t, d - 1);
    };
    const double lo = std::max(R - dist, 0.0);
    if (!(lo > 0.0)) throw IntegrabilityError("jump_kernel_mass: x on the target boundary");
    const double split = dist + R;
    return integrate(f, lo, split, s.quad()) + integrate_tail(f, split, s.quad());
}

}  // namespace

double jump_kernel_mass(const SubordinatorSpec& s, int d, const Vec& x, const KernelSet& set) {
    if (!s.has_jumps()) throw PreconditionError("jump_kernel_mass: no jump part");
    if (const auto* ob = std::get_if<OutsideBall>(&set)) {
        const double dist = norm(sub(ob->center, x, d), d);
        if (!(dist < ob->radius))
            throw PreconditionError("jump_kernel_mass: x must be inside the excluded ball");
        return mass_outside_ball(s, d, dist, ob->radius);
    }
    const auto& an = std::get<Annulus>(set);
    if (!(an.r_outer > an.r_inner && an.r_inner > 0.0))
        throw PreconditionError("jump_kernel_mass: bad annulus");
    const double dist = norm(sub(an.center, x, d), d);
    if (!(dist < an.r_inner))
        throw PreconditionError("jump_kernel_mass: x must be inside the annulus hole");
    return mass_outside_ball(s, d, dist, an.r_inner) - mass_outside_ball(s, d, dist, an.r_outer);
}

LevyTriple subordinate_bm_triple(const SubordinatorSpec& s, int d) {
    double a[kMaxDim][kMaxDim] = {{0}};
    for (int i = 0; i < d; ++i) a[i][i] = 2.0 * s.drift();  // W has generator Delta
    if (!s.has_jumps()) return LevyTriple(d, a, vec0(), std::monostate{});
    if (const auto* st = std::get_if<StableSub>(&s.density()))
        return LevyTriple(d, a, vec0(),
                          IsotropicStable{2.0 * st->alpha,
                                          st->intensity * stable_jump_density_constant(d, st->alpha)});
    SubordinatorSpec copy = s;
    IsotropicRadial ir;
    ir.rho = [copy, d](double r) { return jump_density(copy, r, d); };
    ir.quad = s.quad();
    return LevyTriple(d, a, vec0(), std::move(ir));
}

}  // namespace bhplab
