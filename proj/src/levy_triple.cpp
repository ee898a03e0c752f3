#include "bhplab/levy_triple.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace bhplab {

namespace {

// Cyclic Jacobi for the (at most 3x3) symmetric Gaussian block.
void symmetric_eigenvalues(const double a_in[kMaxDim][kMaxDim], int d, double ev[kMaxDim]) {
    double a[kMaxDim][kMaxDim];
    std::memcpy(a, a_in, sizeof(a));
    for (int sweep = 0; sweep < 32; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < d; ++p)
            for (int q = p + 1; q < d; ++q) off += a[p][q] * a[p][q];
        if (off < 1e-30) break;
        for (int p = 0; p < d; ++p) {
            for (int q = p + 1; q < d; ++q) {
                if (std::fabs(a[p][q]) < 1e-300) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < d; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (int k = 0; k < d; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    for (int i = 0; i < d; ++i) ev[i] = a[i][i];
}

double radial_density(const JumpMeasure& jm, double s) {
    if (const auto* st = std::get_if<IsotropicStable>(&jm)) {
        (void)st;
        throw std::logic_error("radial_density: stable handled by closed form");
    }
    return std::get<IsotropicRadial>(jm).rho(s);
}

// Integrate piecewise between the declared non-smoothness radii.
double integrate_with_breaks(const std::function<double(double)>& f, double lo, double hi,
                             const std::vector<double>& breaks, const QuadControls& q) {
    std::vector<double> cuts = {lo};
    for (double b : breaks)
        if (b > lo && b < hi) cuts.push_back(b);
    cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) total += integrate(f, cuts[i], cuts[i + 1], q);
    return total;
}

}  // namespace

LevyTriple::LevyTriple(int dim, const double gaussian[kMaxDim][kMaxDim], const Vec& drift,
                       JumpMeasure jumps)
    : dim_(dim), b_(drift), jumps_(std::move(jumps)) {
    if (dim < 1 || dim > kMaxDim) throw PreconditionError("LevyTriple: dim must be 1..3");
    std::memcpy(a_, gaussian, sizeof(a_));

    double tr = 0.0, scale = 0.0;
    for (int i = 0; i < dim; ++i) {
        tr += a_[i][i];
        for (int j = 0; j < dim; ++j) scale = std::max(scale, std::fabs(a_[i][j]));
    }
    for (int i = 0; i < dim; ++i)
        for (int j = i + 1; j < dim; ++j)
            if (std::fabs(a_[i][j] - a_[j][i]) > 1e-12 * std::max(1.0, scale))
                throw PreconditionError("LevyTriple: Gaussian matrix not symmetric");
    double ev[kMaxDim] = {0, 0, 0};
    symmetric_eigenvalues(a_, dim, ev);
    for (int i = 0; i < dim; ++i)
        if (ev[i] < -1e-12 * std::max(tr, 1e-300))
            throw PreconditionError("LevyTriple: Gaussian matrix not positive semi-definite");

    if (const auto* st = std::get_if<IsotropicStable>(&jumps_)) {
        if (!(st->alpha > 0.0 && st->alpha < 2.0))
            throw PreconditionError("IsotropicStable: alpha must be in (0,2)");
        if (!(st->c > 0.0)) throw PreconditionError("IsotropicStable: intensity c must be > 0");
        small_jump_mass_ =
            sphere_area(dim) * st->c * (1.0 / (2.0 - st->alpha) + 1.0 / st->alpha);
    } else if (std::holds_alternative<IsotropicRadial>(jumps_)) {
        auto& ir = std::get<IsotropicRadial>(jumps_);
        const QuadControls saved = ir.quad;
        ir.quad.divergence_cap = 1e40;  // integrability check: huge means divergent
        small_jump_mass_ =
            radial_jump_integral(*this, 0.0, 1.0, [](double s) { return s * s; }) +
            radial_jump_tail(*this, 1.0, [](double) { return 1.0; });
        ir.quad = saved;
        if (!std::isfinite(small_jump_mass_))
            throw IntegrabilityError("LevyTriple: int (1^|z|^2) nu(dz) diverges");
    }
}

LevyTriple LevyTriple::pure_gaussian(int dim, double a_diag) {
    double a[kMaxDim][kMaxDim] = {{0}};
    for (int i = 0; i < dim; ++i) a[i][i] = a_diag;
    return LevyTriple(dim, a, vec0(), std::monostate{});
}

LevyTriple LevyTriple::pure_drift(int dim, const Vec& b) {
    double a[kMaxDim][kMaxDim] = {{0}};
    return LevyTriple(dim, a, b, std::monostate{});
}

LevyTriple LevyTriple::stable(int dim, double alpha, double c, double a_diag) {
    double a[kMaxDim][kMaxDim] = {{0}};
    for (int i = 0; i < dim; ++i) a[i][i] = a_diag;
    return LevyTriple(dim, a, vec0(), IsotropicStable{alpha, c});
}

double LevyTriple::gaussian_trace() const {
    double tr = 0.0;
    for (int i = 0; i < dim_; ++i) tr += a_[i][i];
    return tr;
}

bool LevyTriple::is_degenerate() const {
    if (has_jumps()) return false;
    if (gaussian_trace() > 0.0) return false;
    return norm2(b_, dim_) == 0.0;
}

double radial_jump_integral(const LevyTriple& t, double lo, double hi,
                            const std::function<double(double)>& w) {
    if (!(hi > lo)) return 0.0;
    if (const auto* st = std::get_if<IsotropicStable>(&t.jumps())) {
        const double factor = sphere_area(t.dim()) * st->c;
        const double mdalpha = -1.0 - st->alpha;
        return factor * integrate(
                            [&](double s) {
                                const double v = w(s) * std::pow(s, mdalpha + 1.0);
                                return std::isnan(v) ? 0.0 : v;
                            },
                            lo, hi);
    }
    if (std::holds_alternative<std::monostate>(t.jumps())) return 0.0;
    const auto& ir = std::get<IsotropicRadial>(t.jumps());
    const double factor =
        (t.dim() == 1 && ir.support == RadialSupport::positive_axis) ? 1.0 : sphere_area(t.dim());
    const int d = t.dim();
    return factor * integrate_with_breaks(
                        [&](double s) {
                            const double v = w(s) * radial_density(t.jumps(), s) * std::pow(s, d - 1);
                            return std::isnan(v) ? 0.0 : v;
                        },
                        lo, hi, ir.breakpoints, ir.quad);
}

double radial_jump_tail(const LevyTriple& t, double lo,
                        const std::function<double(double)>& w) {
    if (const auto* st = std::get_if<IsotropicStable>(&t.jumps())) {
        const double factor = sphere_area(t.dim()) * st->c;
        const double mdalpha = -1.0 - st->alpha;
        return factor *
               integrate_tail([&](double s) { return w(s) * std::pow(s, mdalpha + 1.0); }, lo);
    }
    if (std::holds_alternative<std::monostate>(t.jumps())) return 0.0;
    const auto& ir = std::get<IsotropicRadial>(t.jumps());
    if (ir.support_radius && *ir.support_radius <= lo) return 0.0;
    const double factor =
        (t.dim() == 1 && ir.support == RadialSupport::positive_axis) ? 1.0 : sphere_area(t.dim());
    const int d = t.dim();
    auto f = [&](double s) {
        const double v = w(s) * radial_density(t.jumps(), s) * std::pow(s, d - 1);
        return std::isnan(v) ? 0.0 : v;
    };
    if (ir.support_radius)
        return factor * integrate_with_breaks(f, lo, *ir.support_radius, ir.breakpoints, ir.quad);
    double total = 0.0;
    double cursor = lo;
    for (double b : ir.breakpoints)
        if (b > cursor) {
            total += integrate(f, cursor, b, ir.quad);
            cursor = b;
        }
    return factor * (total + integrate_tail(f, cursor, ir.quad));
}

}  // namespace bhplab
