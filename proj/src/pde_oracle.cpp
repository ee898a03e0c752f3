#include "bhplab/pde_oracle.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <Eigen/IterativeLinearSolvers>

#include <algorithm>
#include <cmath>
#include <queue>

namespace bhplab {

double GridField::at(double x, double y) const {
    const double fx = (x - x0) / h, fy = (y - y0) / h;
    const int i = static_cast<int>(std::floor(fx)), j = static_cast<int>(std::floor(fy));
    if (i < 0 || j < 0 || i + 1 >= nx || j + 1 >= ny) return 0.0;
    const double tx = fx - i, ty = fy - j;
    return (1 - tx) * (1 - ty) * node(i, j) + tx * (1 - ty) * node(i + 1, j) +
           (1 - tx) * ty * node(i, j + 1) + tx * ty * node(i + 1, j + 1);
}

namespace {

struct BBox {
    double xmin = -1e300, xmax = 1e300, ymin = -1e300, ymax = 1e300;
};

BBox part_bbox(const DomainSpec& dom) {
    BBox b;
    if (const auto* ball = std::get_if<Ball>(&dom)) {
        b = {ball->center[0] - ball->radius, ball->center[0] + ball->radius,
             ball->center[1] - ball->radius, ball->center[1] + ball->radius};
    } else if (const auto* c = std::get_if<TruncatedCone>(&dom)) {
        // Tight box for the vertical axis; conservative otherwise.
        if (std::fabs(c->axis[0]) < 1e-14 && c->axis[1] > 0.0) {
            const double sx = c->theta >= M_PI / 2.0 ? 1.0 : std::sin(c->theta);
            const double ylo = c->theta >= M_PI / 2.0 ? c->radius * std::cos(c->theta) : 0.0;
            b = {c->vertex[0] - c->radius * sx, c->vertex[0] + c->radius * sx,
                 c->vertex[1] + ylo, c->vertex[1] + c->radius};
        } else {
            b = {c->vertex[0] - c->radius, c->vertex[0] + c->radius,
                 c->vertex[1] - c->radius, c->vertex[1] + c->radius};
        }
    } else if (const auto* sh = std::get_if<Shell>(&dom)) {
        b = {sh->center[0] - sh->r_outer, sh->center[0] + sh->r_outer,
             sh->center[1] - sh->r_outer, sh->center[1] + sh->r_outer};
    } else if (const auto* p = std::get_if<LipschitzGraphPatch>(&dom)) {
        b = {p->origin[0] - p->window_radius, p->origin[0] + p->window_radius,
             p->origin[1] - p->window_radius, p->origin[1] + p->window_radius};
    }
    return b;  // half-space: unbounded, relies on the other parts
}

BBox region_bbox(const Region& dom) {
    BBox b;
    for (const auto& p : dom.parts) {
        const BBox q = part_bbox(p);
        b.xmin = std::max(b.xmin, q.xmin);
        b.xmax = std::min(b.xmax, q.xmax);
        b.ymin = std::max(b.ymin, q.ymin);
        b.ymax = std::min(b.ymax, q.ymax);
    }
    if (!(b.xmax > b.xmin && b.ymax > b.ymin))
        throw SolverError("pde_oracle: domain is unbounded or empty");
    return b;
}

// Distance along the axis direction (sx, sy) from the interior node to the
// boundary, in (0, h]; located by bisection on the segment.
double cut_distance(const Region& dom, double x, double y, double sx, double sy, double h) {
    double lo = 0.0, hi = h;
    for (int it = 0; it < 50; ++it) {
        const double m = 0.5 * (lo + hi);
        const Vec p = make_vec(x + sx * m, y + sy * m);
        (dom.contains(p, 2) ? lo : hi) = m;
    }
    return std::max(0.5 * (lo + hi), 1e-12 * h);
}

struct Assembled {
    GridField field;
    std::vector<int> index;  // node -> unknown id, -1 outside
    long long n_unknowns = 0;
    int axis_col = -1;  // column of x = 0 when mirroring
};

Assembled make_grid(const Region& dom, const SolverOptions& opt) {
    const BBox bb = region_bbox(dom);
    const double h = opt.h;
    if ((bb.xmax - bb.xmin) / h < opt.min_cells_across ||
        (bb.ymax - bb.ymin) / h < opt.min_cells_across)
        throw SolverError("pde_oracle: grid does not resolve the geometry");

    Assembled a;
    GridField& f = a.field;
    f.h = h;
    // Nodes on integer multiples of h so that x = 0 is a node column (axis
    // sampling and mirror symmetry rely on it).
    const long ix0 = static_cast<long>(std::floor(bb.xmin / h)) - 2;
    const long iy0 = static_cast<long>(std::floor(bb.ymin / h)) - 2;
    const long ix1 = static_cast<long>(std::ceil(bb.xmax / h)) + 2;
    const long iy1 = static_cast<long>(std::ceil(bb.ymax / h)) + 2;
    f.x0 = ix0 * h;
    f.y0 = iy0 * h;
    f.nx = static_cast<int>(ix1 - ix0 + 1);
    f.ny = static_cast<int>(iy1 - iy0 + 1);
    const long start_i = opt.mirror_x ? -ix0 : 0;  // skip x < 0 when mirroring
    if (opt.mirror_x) {
        if (ix0 > 0) throw SolverError("pde_oracle: mirror_x needs the axis inside the box");
        a.axis_col = static_cast<int>(-ix0);
    }

    f.values.assign(static_cast<std::size_t>(f.nx) * f.ny, 0.0);
    f.interior.assign(static_cast<std::size_t>(f.nx) * f.ny, 0);
    a.index.assign(static_cast<std::size_t>(f.nx) * f.ny, -1);

    for (int j = 0; j < f.ny; ++j)
        for (int i = static_cast<int>(start_i); i < f.nx; ++i) {
            const Vec p = make_vec(f.x_of(i), f.y_of(j));
            if (dom.contains(p, 2)) {
                f.interior[static_cast<std::size_t>(j) * f.nx + i] = 1;
                a.index[static_cast<std::size_t>(j) * f.nx + i] = static_cast<int>(a.n_unknowns++);
            }
        }
    if (a.n_unknowns == 0) throw SolverError("pde_oracle: empty interior");

    // Connectivity check: the largest component must cover the interior.
    {
        std::vector<std::uint8_t> seen(f.values.size(), 0);
        long long covered = 0;
        std::size_t seed = 0;
        while (seed < f.interior.size() && !f.interior[seed]) ++seed;
        std::queue<std::size_t> q;
        q.push(seed);
        seen[seed] = 1;
        while (!q.empty()) {
            const std::size_t c = q.front();
            q.pop();
            ++covered;
            const int i = static_cast<int>(c % f.nx), j = static_cast<int>(c / f.nx);
            const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
            for (int k = 0; k < 4; ++k) {
                const int ii = i + di[k], jj = j + dj[k];
                if (ii < 0 || jj < 0 || ii >= f.nx || jj >= f.ny) continue;
                const std::size_t cc = static_cast<std::size_t>(jj) * f.nx + ii;
                if (f.interior[cc] && !seen[cc]) {
                    seen[cc] = 1;
                    q.push(cc);
                }
            }
        }
        if (covered < a.n_unknowns)
            throw SolverError("pde_oracle: interior mask is disconnected at this resolution");
    }
    return a;
}

// Shortley-Weller 5-point scheme with exact cut distances at the Dirichlet
// boundary. `boundary_value` supplies g at the cut point (0 for the killed
// problems); `rhs_at` supplies f in -Delta u = f.
GridField solve_poisson(const Region& dom, const SolverOptions& opt,
                        const std::function<double(double, double)>& rhs_at,
                        const std::function<double(const Vec&)>& boundary_value) {
    Eigen::setNbThreads(1);
    Assembled a = make_grid(dom, opt);
    GridField& f = a.field;
    const double h = f.h;
    const long long n = a.n_unknowns;

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(5 * n));
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);

    const int di[4] = {1, -1, 0, 0};
    const int dj[4] = {0, 0, 1, -1};
    for (int j = 0; j < f.ny; ++j) {
        for (int i = 0; i < f.nx; ++i) {
            const int row = a.index[static_cast<std::size_t>(j) * f.nx + i];
            if (row < 0) continue;
            const double x = f.x_of(i), y = f.y_of(j);
            double arm[4];
            int nbr[4];
            for (int k = 0; k < 4; ++k) {
                int ii = i + di[k], jj = j + dj[k];
                if (opt.mirror_x && ii < a.axis_col) ii = 2 * a.axis_col - ii;  // reflect
                const bool inside = ii >= 0 && jj >= 0 && ii < f.nx && jj < f.ny &&
                                    f.is_interior(ii, jj);
                if (inside) {
                    arm[k] = h;
                    nbr[k] = a.index[static_cast<std::size_t>(jj) * f.nx + ii];
                } else {
                    arm[k] = cut_distance(dom, x, y, di[k], dj[k], h);
                    nbr[k] = -1;
                }
            }
            const double e = arm[0], w = arm[1], no = arm[2], so = arm[3];
            const double diag = 2.0 / (e * w) + 2.0 / (no * so);
            trip.emplace_back(row, row, diag);
            const double coef[4] = {2.0 / (e * (e + w)), 2.0 / (w * (e + w)),
                                    2.0 / (no * (no + so)), 2.0 / (so * (no + so))};
            double b = rhs_at(x, y);
            for (int k = 0; k < 4; ++k) {
                if (nbr[k] >= 0) {
                    if (nbr[k] == row)
                        trip.emplace_back(row, row, -coef[k]);  // mirrored arm folds back
                    else
                        trip.emplace_back(row, nbr[k], -coef[k]);
                } else {
                    const Vec cut = make_vec(x + di[k] * arm[k], y + dj[k] * arm[k]);
                    b += coef[k] * boundary_value(cut);
                }
            }
            rhs[row] = b;
        }
    }

    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(trip.begin(), trip.end());
    A.makeCompressed();

    Eigen::VectorXd u;
    if (n <= opt.direct_limit) {
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(A);
        if (lu.info() != Eigen::Success) throw SolverError("pde_oracle: LU factorization failed");
        u = lu.solve(rhs);
    } else {
        Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> it;
        it.preconditioner().setDroptol(1e-5);
        it.preconditioner().setFillfactor(12);
        it.setTolerance(1e-13);
        it.setMaxIterations(20000);
        it.compute(A);
        if (it.info() != Eigen::Success) throw SolverError("pde_oracle: preconditioner failed");
        u = it.solve(rhs);
    }
    const double resid = (A * u - rhs).norm();
    const double scale = std::max(1.0, rhs.norm());
    if (!(resid <= 1e-8 * scale))
        throw SolverError("pde_oracle: solver did not reach the residual target");

    for (int j = 0; j < f.ny; ++j)
        for (int i = 0; i < f.nx; ++i) {
            const int id = a.index[static_cast<std::size_t>(j) * f.nx + i];
            if (id >= 0) f.values[static_cast<std::size_t>(j) * f.nx + i] = u[id];
        }
    if (opt.mirror_x) {
        for (int j = 0; j < f.ny; ++j)
            for (int i = 0; i < a.axis_col; ++i) {
                const int mi = 2 * a.axis_col - i;
                if (mi < f.nx) {
                    f.values[static_cast<std::size_t>(j) * f.nx + i] =
                        f.node(mi, j);
                    f.interior[static_cast<std::size_t>(j) * f.nx + i] =
                        f.interior[static_cast<std::size_t>(j) * f.nx + mi];
                }
            }
    }
    return f;
}

}  // namespace

GridField solve_mean_exit_bm(const Region& dom, const SolverOptions& opt) {
    return solve_poisson(
        dom, opt, [](double, double) { return 1.0; }, [](const Vec&) { return 0.0; });
}

GridField solve_green_bm(const Region& dom, const Vec& pole, const SolverOptions& opt) {
    if (!dom.contains(pole, 2)) throw PreconditionError("solve_green_bm: pole outside domain");
    if (dom.dist(pole, 2) < 4.0 * opt.h)
        throw PreconditionError("solve_green_bm: pole closer than 4h to the boundary");
    // Snap the pole to the nearest node; discrete delta of unit mass (1/h^2
    // density over one cell).
    const double h = opt.h;
    const double px = std::round(pole[0] / h) * h;
    const double py = std::round(pole[1] / h) * h;
    const double inv_h2 = 1.0 / (h * h);
    return solve_poisson(
        dom, opt,
        [px, py, h, inv_h2](double x, double y) {
            return (std::fabs(x - px) < 0.49 * h && std::fabs(y - py) < 0.49 * h) ? inv_h2 : 0.0;
        },
        [](const Vec&) { return 0.0; });
}

GridField solve_harmonic_measure_bm(const Region& dom,
                                    const std::function<bool(const Vec&)>& boundary_set,
                                    const SolverOptions& opt) {
    GridField f = solve_poisson(
        dom, opt, [](double, double) { return 0.0; },
        [&boundary_set](const Vec& p) { return boundary_set(p) ? 1.0 : 0.0; });
    return f;
}

std::vector<double> axis_profile(const GridField& f, const std::vector<double>& heights) {
    std::vector<double> out;
    out.reserve(heights.size());
    for (double a : heights) out.push_back(f.at(0.0, a));
    return out;
}

}  // namespace bhplab
