#pragma once

#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "bhplab/common.hpp"

namespace bhplab {

struct Ball {
    Vec center = vec0();
    double radius = 1.0;
};

// {x : |x-v| < R and (x-v).axis > |x-v| cos(theta)}; apex angle 2*theta.
struct TruncatedCone {
    Vec vertex = vec0();
    Vec axis = make_vec(0.0, 1.0);  // unit vector
    double theta = M_PI / 4.0;
    double radius = 1.0;
};

struct HalfSpace {
    Vec point = vec0();
    Vec normal = make_vec(0.0, 1.0);  // inward unit normal
};

// Annulus r_inner < |x - center| < r_outer; benchmark domain with a closed-form
// radial exit-time profile.
struct Shell {
    Vec center = vec0();
    double r_inner = 0.5;
    double r_outer = 1.0;
};

// {y in B(0,R0) in the local frame : y_d > f(y_tilde)}; the frame is an
// origin plus an orthonormal basis whose last vector is the local vertical.
struct LipschitzGraphPatch {
    double window_radius = 1.0;     // R0
    double lipschitz_constant = 1;  // Lambda0
    std::function<double(const Vec&)> graph;  // f(y_tilde); uses first d-1 coords
    Vec origin = vec0();
    Vec basis[kMaxDim] = {make_vec(1, 0, 0), make_vec(0, 1, 0), make_vec(0, 0, 1)};
};

using DomainSpec = std::variant<Ball, TruncatedCone, HalfSpace, Shell, LipschitzGraphPatch>;

bool contains(const DomainSpec& dom, const Vec& x, int d);

// Euclidean distance to the boundary for interior points; 0 outside. Exact
// closed forms for ball / half-space / cone; numeric for graph patches, clamped
// into [gap/sqrt(1+L^2), gap].
double dist_to_boundary(const DomainSpec& dom, const Vec& x, int d);

// Nearest boundary point (exact for half-space and ball, piecewise-exact for
// the cone, vertical projection for graph patches).
Vec nearest_boundary_point(const DomainSpec& dom, const Vec& x, int d);

// Localization radius: R for cones, R0 for patches, radius for balls,
// unbounded for half-spaces.
double localization_radius(const DomainSpec& dom);

// An intersection of primitive domains; the exit domains D cap B(z0, r) used
// throughout the experiments.
struct Region {
    std::vector<DomainSpec> parts;

    Region() = default;
    explicit Region(DomainSpec d) { parts.push_back(std::move(d)); }
    Region(DomainSpec a, DomainSpec b) {
        parts.push_back(std::move(a));
        parts.push_back(std::move(b));
    }

    Region intersect_ball(const Vec& center, double radius) const {
        Region r = *this;
        r.parts.push_back(Ball{center, radius});
        return r;
    }

    bool contains(const Vec& x, int d) const {
        for (const auto& p : parts)
            if (!bhplab::contains(p, x, d)) return false;
        return true;
    }

    // (distance, index of the achieving part)
    std::pair<double, int> dist_with_part(const Vec& x, int d) const {
        double best = 1e300;
        int idx = -1;
        for (std::size_t i = 0; i < parts.size(); ++i) {
            const double v = dist_to_boundary(parts[i], x, d);
            if (v < best) {
                best = v;
                idx = static_cast<int>(i);
            }
        }
        return {best, idx};
    }

    double dist(const Vec& x, int d) const { return dist_with_part(x, d).first; }
};

struct BoundaryPoint {
    Vec point = vec0();
};

// arccos(1/sqrt(d)); the threshold angle separating BHP success from failure
// for positive-drift subordinate BM on cones. Requires d >= 2.
double critical_angle(int d);

struct CorkscrewResult {
    Vec point = vec0();
    double kappa = 0.0;  // dist_to_boundary(point) / r
};

// Interior point z_r on the sphere |z - z0| = r with kappa*r <= delta(z_r) < r.
CorkscrewResult corkscrew_point(const DomainSpec& dom, const BoundaryPoint& z0, double r, int d);

enum class ExponentClass {
    above_critical,  // theta > theta*: q < 2 (Green and exit time comparable)
    critical,        // theta = theta*: q = 2
    below_critical,  // theta < theta*: q > 2
};

struct ConeExponent {
    std::optional<double> q;  // numeric value when known (d = 2, or q = 2 at theta*)
    ExponentClass cls = ExponentClass::critical;
};

// Decay rate of the Brownian killed-Green profile along the cone axis:
// q = pi/(2 theta) for d = 2; q = 2 exactly at theta* for any d; for d >= 3
// away from theta* only the classification is exposed.
ConeExponent cone_harmonic_exponent(int d, double theta);

// Graph-patch view of a circular cone (f(y_tilde) = |y_tilde| cot(theta),
// Lipschitz constant cot(theta)); exists for tests and documentation only.
LipschitzGraphPatch cone_graph_patch(const TruncatedCone& cone, double window_radius, int d);

// CSV rows (x,y[,z]) sampled on the boundary, for debugging.
std::vector<Vec> sample_boundary(const DomainSpec& dom, int d, int n, std::uint64_t seed);

}  // namespace bhplab
