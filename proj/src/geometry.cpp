#include "bhplab/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "bhplab/rng.hpp"

namespace bhplab {

namespace {

Vec to_local(const LipschitzGraphPatch& p, const Vec& x, int d) {
    Vec w = sub(x, p.origin, d);
    Vec y = vec0();
    for (int i = 0; i < d; ++i) y[i] = dot(p.basis[i], w, d);
    return y;
}

Vec from_local(const LipschitzGraphPatch& p, const Vec& y, int d) {
    Vec x = p.origin;
    for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k) x[k] += y[i] * p.basis[i][k];
    return x;
}

// Distance from a local point to the graph {y_d = f(y_tilde)}, minimized
// numerically over the horizontal offset. d - 1 is 1 or 2.
double graph_distance(const LipschitzGraphPatch& p, const Vec& y, int d) {
    const double gap = y[d - 1] - p.graph(y);
    if (gap <= 0.0) return 0.0;
    const double lower = gap / std::sqrt(1.0 + p.lipschitz_constant * p.lipschitz_constant);
    auto sq_dist = [&](double a, double b) {
        Vec q = vec0();
        q[0] = y[0] + a;
        if (d == 3) q[1] = y[1] + b;
        const double dz = y[d - 1] - p.graph(q);
        return a * a + b * b + dz * dz;
    };
    // Coarse grid within the reach |offset| <= gap, then local refinement.
    double best = gap * gap;
    double ba = 0.0, bb = 0.0;
    const int n = 24;
    for (int i = -n; i <= n; ++i) {
        const double a = gap * i / n;
        if (d == 2) {
            const double v = sq_dist(a, 0.0);
            if (v < best) {
                best = v;
                ba = a;
            }
        } else {
            for (int j = -n; j <= n; ++j) {
                const double b = gap * j / n;
                const double v = sq_dist(a, b);
                if (v < best) {
                    best = v;
                    ba = a;
                    bb = b;
                }
            }
        }
    }
    double h = gap / n;
    for (int it = 0; it < 40; ++it) {
        bool improved = false;
        for (int i = -1; i <= 1; ++i)
            for (int j = (d == 3 ? -1 : 0); j <= (d == 3 ? 1 : 0); ++j) {
                const double v = sq_dist(ba + i * h, bb + j * h);
                if (v < best) {
                    best = v;
                    ba += i * h;
                    bb += j * h;
                    improved = true;
                }
            }
        if (!improved) h *= 0.5;
        if (h < 1e-12 * gap) break;
    }
    return std::clamp(std::sqrt(best), lower, gap);
}

}  // namespace

bool contains(const DomainSpec& dom, const Vec& x, int d) {
    for (int i = 0; i < d; ++i)
        if (!std::isfinite(x[i])) return false;
    if (const auto* b = std::get_if<Ball>(&dom))
        return norm2(sub(x, b->center, d), d) < b->radius * b->radius;
    if (const auto* h = std::get_if<HalfSpace>(&dom))
        return dot(sub(x, h->point, d), h->normal, d) > 0.0;
    if (const auto* c = std::get_if<TruncatedCone>(&dom)) {
        const Vec w = sub(x, c->vertex, d);
        const double rho = norm(w, d);
        if (!(rho < c->radius) || rho == 0.0) return false;
        return dot(w, c->axis, d) > rho * std::cos(c->theta);
    }
    if (const auto* sh = std::get_if<Shell>(&dom)) {
        const double rho = norm(sub(x, sh->center, d), d);
        return rho > sh->r_inner && rho < sh->r_outer;
    }
    const auto& p = std::get<LipschitzGraphPatch>(dom);
    const Vec y = to_local(p, x, d);
    if (!(norm2(y, d) < p.window_radius * p.window_radius)) return false;
    return y[d - 1] > p.graph(y);
}

double dist_to_boundary(const DomainSpec& dom, const Vec& x, int d) {
    if (!contains(dom, x, d)) return 0.0;
    if (const auto* b = std::get_if<Ball>(&dom))
        return b->radius - norm(sub(x, b->center, d), d);
    if (const auto* h = std::get_if<HalfSpace>(&dom))
        return dot(sub(x, h->point, d), h->normal, d);
    if (const auto* c = std::get_if<TruncatedCone>(&dom)) {
        const Vec w = sub(x, c->vertex, d);
        const double rho = norm(w, d);
        const double cap = c->radius - rho;
        const double cospsi = std::clamp(dot(w, c->axis, d) / rho, -1.0, 1.0);
        const double psi = std::acos(cospsi);
        // Lateral face of the infinite cone: rho*sin(theta - psi) while the
        // foot stays on the surface, otherwise the vertex itself.
        const double lat = (c->theta - psi <= M_PI / 2.0) ? rho * std::sin(c->theta - psi) : rho;
        return std::min(cap, lat);
    }
    if (const auto* sh = std::get_if<Shell>(&dom)) {
        const double rho = norm(sub(x, sh->center, d), d);
        return std::min(rho - sh->r_inner, sh->r_outer - rho);
    }
    const auto& p = std::get<LipschitzGraphPatch>(dom);
    const Vec y = to_local(p, x, d);
    return std::min(p.window_radius - norm(y, d), graph_distance(p, y, d));
}

Vec nearest_boundary_point(const DomainSpec& dom, const Vec& x, int d) {
    if (const auto* b = std::get_if<Ball>(&dom)) {
        Vec w = sub(x, b->center, d);
        const double r = norm(w, d);
        if (r == 0.0) {
            w = vec0();
            w[0] = b->radius;
            return add(b->center, w, d);
        }
        return add(b->center, scale(w, b->radius / r, d), d);
    }
    if (const auto* h = std::get_if<HalfSpace>(&dom)) {
        const double g = dot(sub(x, h->point, d), h->normal, d);
        return sub(x, scale(h->normal, g, d), d);
    }
    if (const auto* c = std::get_if<TruncatedCone>(&dom)) {
        const Vec w = sub(x, c->vertex, d);
        const double rho = norm(w, d);
        if (rho == 0.0) return c->vertex;
        const double cospsi = std::clamp(dot(w, c->axis, d) / rho, -1.0, 1.0);
        const double psi = std::acos(cospsi);
        const double cap = c->radius - rho;
        const double lat = (c->theta - psi <= M_PI / 2.0) ? rho * std::sin(c->theta - psi) : rho;
        if (cap <= lat) return add(c->vertex, scale(w, c->radius / rho, d), d);
        if (c->theta - psi > M_PI / 2.0) return c->vertex;
        // Rotate w away from the axis by (theta - psi) within the plane
        // spanned by the axis and w; lands on the lateral face.
        Vec perp = sub(w, scale(c->axis, rho * cospsi, d), d);
        const double pn = norm(perp, d);
        if (pn < 1e-15 * rho) {
            // On the axis: pick any perpendicular direction.
            perp = vec0();
            int k = 0;
            for (int i = 1; i < d; ++i)
                if (std::fabs(c->axis[i]) < std::fabs(c->axis[k])) k = i;
            perp[k] = 1.0;
            Vec proj = scale(c->axis, dot(perp, c->axis, d), d);
            perp = sub(perp, proj, d);
        }
        const Vec e_perp = scale(perp, 1.0 / norm(perp, d), d);
        const double foot = rho * std::cos(c->theta - psi);
        Vec dir = add(scale(c->axis, std::cos(c->theta), d), scale(e_perp, std::sin(c->theta), d), d);
        return add(c->vertex, scale(dir, foot, d), d);
    }
    if (const auto* sh = std::get_if<Shell>(&dom)) {
        Vec w = sub(x, sh->center, d);
        const double rho = norm(w, d);
        if (rho == 0.0) {
            w = vec0();
            w[0] = sh->r_inner;
            return add(sh->center, w, d);
        }
        const double target = (rho - sh->r_inner <= sh->r_outer - rho) ? sh->r_inner : sh->r_outer;
        return add(sh->center, scale(w, target / rho, d), d);
    }
    const auto& p = std::get<LipschitzGraphPatch>(dom);
    Vec y = to_local(p, x, d);
    const double to_window = p.window_radius - norm(y, d);
    const double to_graph = graph_distance(p, y, d);
    if (to_window < to_graph) {
        const Vec yb = scale(y, p.window_radius / norm(y, d), d);
        return from_local(p, yb, d);
    }
    y[d - 1] = p.graph(y);  // vertical projection, approximate
    return from_local(p, y, d);
}

double localization_radius(const DomainSpec& dom) {
    if (const auto* b = std::get_if<Ball>(&dom)) return b->radius;
    if (std::holds_alternative<HalfSpace>(dom)) return 1e300;
    if (const auto* c = std::get_if<TruncatedCone>(&dom)) return c->radius;
    if (const auto* sh = std::get_if<Shell>(&dom)) return sh->r_outer - sh->r_inner;
    return std::get<LipschitzGraphPatch>(dom).window_radius;
}

double critical_angle(int d) {
    if (d < 2) throw PreconditionError("critical_angle: requires d >= 2");
    return std::acos(1.0 / std::sqrt(static_cast<double>(d)));
}

CorkscrewResult corkscrew_point(const DomainSpec& dom, const BoundaryPoint& z0, double r, int d) {
    if (!(r > 0.0) || r >= localization_radius(dom))
        throw RangeError("corkscrew_point: r exceeds the localization radius");
    Vec dir = vec0();
    if (const auto* h = std::get_if<HalfSpace>(&dom)) {
        dir = h->normal;
    } else if (const auto* b = std::get_if<Ball>(&dom)) {
        Vec w = sub(b->center, z0.point, d);
        dir = scale(w, 1.0 / norm(w, d), d);
    } else if (const auto* c = std::get_if<TruncatedCone>(&dom)) {
        const Vec w = sub(z0.point, c->vertex, d);
        const double rho = norm(w, d);
        if (rho < 1e-14) {
            dir = c->axis;  // vertex: the interior bisector is the axis
        } else {
            // Lateral points: step along the inward normal of the face.
            Vec radial = scale(w, 1.0 / rho, d);
            const double c_a = std::cos(c->theta);
            Vec n = sub(scale(c->axis, 1.0, d), scale(radial, c_a, d), d);
            const double nn = norm(n, d);
            if (nn < 1e-14)
                dir = c->axis;
            else
                dir = scale(n, 1.0 / nn, d);
        }
    } else {
        const auto& p = std::get<LipschitzGraphPatch>(dom);
        dir = p.basis[d - 1];  // local vertical
    }
    CorkscrewResult res;
    res.point = add(z0.point, scale(dir, r, d), d);
    res.kappa = dist_to_boundary(dom, res.point, d) / r;
    return res;
}

ConeExponent cone_harmonic_exponent(int d, double theta) {
    if (!(theta > 0.0 && theta < M_PI))
        throw PreconditionError("cone_harmonic_exponent: theta must be in (0, pi)");
    const double tc = critical_angle(d);
    ConeExponent e;
    if (std::fabs(theta - tc) < 1e-12) {
        e.cls = ExponentClass::critical;
        e.q = 2.0;
        return e;
    }
    e.cls = theta < tc ? ExponentClass::below_critical : ExponentClass::above_critical;
    if (d == 2) e.q = M_PI / (2.0 * theta);
    return e;
}

LipschitzGraphPatch cone_graph_patch(const TruncatedCone& cone, double window_radius, int d) {
    if (!(cone.theta < M_PI / 2.0))
        throw PreconditionError("cone_graph_patch: requires theta < pi/2");
    LipschitzGraphPatch p;
    p.window_radius = std::min(window_radius, cone.radius);
    const double lam = 1.0 / std::tan(cone.theta);
    p.lipschitz_constant = lam;
    p.graph = [lam, d](const Vec& yt) {
        double s2 = 0.0;
        for (int i = 0; i + 1 < d; ++i) s2 += yt[i] * yt[i];
        return lam * std::sqrt(s2);
    };
    p.origin = cone.vertex;
    // Basis: last vector along the cone axis, others completing the frame.
    Vec e3 = cone.axis;
    Vec e1 = vec0();
    int k = 0;
    for (int i = 1; i < d; ++i)
        if (std::fabs(e3[i]) < std::fabs(e3[k])) k = i;
    e1[k] = 1.0;
    Vec proj = scale(e3, dot(e1, e3, d), d);
    e1 = sub(e1, proj, d);
    e1 = scale(e1, 1.0 / norm(e1, d), d);
    if (d == 2) {
        p.basis[0] = e1;
        p.basis[1] = e3;
    } else {
        Vec e2 = make_vec(e3[1] * e1[2] - e3[2] * e1[1], e3[2] * e1[0] - e3[0] * e1[2],
                          e3[0] * e1[1] - e3[1] * e1[0]);
        p.basis[0] = e1;
        p.basis[1] = e2;
        p.basis[2] = e3;
    }
    return p;
}

std::vector<Vec> sample_boundary(const DomainSpec& dom, int d, int n, std::uint64_t seed) {
    std::vector<Vec> pts;
    pts.reserve(n);
    Rng rng(seed, 0);
    const double R = std::min(localization_radius(dom), 8.0);
    Vec anchor = vec0();
    if (const auto* b = std::get_if<Ball>(&dom)) anchor = b->center;
    if (const auto* sh = std::get_if<Shell>(&dom)) anchor = sh->center;
    if (const auto* c = std::get_if<TruncatedCone>(&dom)) anchor = c->vertex;
    if (const auto* h = std::get_if<HalfSpace>(&dom)) anchor = h->point;
    if (const auto* p = std::get_if<LipschitzGraphPatch>(&dom)) anchor = p->origin;
    int guard = 0;
    while (static_cast<int>(pts.size()) < n && guard < 1000 * n) {
        ++guard;
        Vec a = anchor, b1 = anchor;
        for (int i = 0; i < d; ++i) {
            a[i] += R * (2.0 * rng.uniform01() - 1.0);
            b1[i] += R * (2.0 * rng.uniform01() - 1.0);
        }
        if (contains(dom, a, d) == contains(dom, b1, d)) continue;
        if (!contains(dom, a, d)) std::swap(a, b1);
        for (int it = 0; it < 60; ++it) {  // bisect the segment to the boundary
            Vec m = scale(add(a, b1, d), 0.5, d);
            (contains(dom, m, d) ? a : b1) = m;
        }
        pts.push_back(b1);  // the outside endpoint: boundary points are not in the open set
    }
    return pts;
}

}  // namespace bhplab
