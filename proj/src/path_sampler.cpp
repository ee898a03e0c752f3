#include "bhplab/path_sampler.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>

#include "bhplab/pruitt.hpp"

namespace bhplab {

void Harvest::merge(const Harvest& o) {
    n += o.n;
    censored += o.censored;
    inner_censored += o.inner_censored;
    tau_outer.merge(o.tau_outer);
    tau_inner.merge(o.tau_inner);
    if (outer_targets.size() < o.outer_targets.size()) outer_targets.resize(o.outer_targets.size());
    for (std::size_t i = 0; i < o.outer_targets.size(); ++i)
        outer_targets[i].merge(o.outer_targets[i]);
    if (inner_targets.size() < o.inner_targets.size()) inner_targets.resize(o.inner_targets.size());
    for (std::size_t i = 0; i < o.inner_targets.size(); ++i)
        inner_targets[i].merge(o.inner_targets[i]);
    if (occupation.size() < o.occupation.size()) occupation.resize(o.occupation.size());
    for (std::size_t i = 0; i < o.occupation.size(); ++i) {
        occupation[i][0].merge(o.occupation[i][0]);
        occupation[i][1].merge(o.occupation[i][1]);
    }
    exited_by_jump.merge(o.exited_by_jump);
    boundary_exit.merge(o.boundary_exit);
    tau_hist.merge(o.tau_hist);
}

namespace {

struct StepState {
    Vec x = vec0();
    double t = 0.0;
};

// Nudge a projected boundary point just outside the region so that the
// exit-position invariant (outside unless censored) holds under rounding.
Vec nudged_outside(const Region& region, const Vec& from_inside, const Vec& boundary, int d) {
    Vec p = boundary;
    if (!region.contains(p, d)) return p;
    Vec dir = sub(boundary, from_inside, d);
    const double dn = norm(dir, d);
    if (dn < 1e-300) return p;
    for (double step = 1e-14 * (1.0 + norm(boundary, d)); step < 1.0; step *= 4.0) {
        p = add(boundary, scale(dir, step / dn, d), d);
        if (!region.contains(p, d)) return p;
    }
    return p;
}

struct PathOutcome {
    ExitRecord outer;
    bool inner_exited = false;
    double inner_tau = 0.0;
    Vec inner_pos = vec0();
};

PathOutcome run_one_path(const ProcessSpec& proc, const HarvestPlan& plan, const PathConfig& cfg,
                         const IncrementSampler& sampler, const Vec& x0, Rng& rng,
                         std::vector<double>* probe_occ) {
    const int d = proc.dim;
    const double dt = cfg.dt;
    const double thr =
        cfg.jump_threshold >= 0.0 ? cfg.jump_threshold : proc.subordinator.drift() * dt;
    PathOutcome out;
    bool inner_active = plan.inner.has_value();
    Vec x = x0;
    double t = 0.0;
    if (probe_occ) std::fill(probe_occ->begin(), probe_occ->end(), 0.0);

    for (long long step = 0; step < cfg.max_steps; ++step) {
        const StepIncrement inc = sampler.draw(rng);
        Vec xn = x;
        if (inc.total > 0.0) {
            const double sd = std::sqrt(2.0 * inc.total);
            for (int i = 0; i < d; ++i) xn[i] = x[i] + sd * rng.normal();
        }
        t += dt;

        if (!plan.outer.contains(xn, d)) {
            out.outer.exit_time = t;
            out.outer.exit_position = xn;
            const double disp2 = norm2(sub(xn, x, d), d);
            out.outer.exited_by_jump =
                inc.jump > thr && disp2 > 72.0 * inc.continuous();
            if (inner_active) {
                out.inner_exited = true;
                out.inner_tau = t;
                out.inner_pos = xn;
            }
            return out;
        }

        if (cfg.bridge_correction && inc.continuous() > 0.0) {
            // Half-space crossing estimate over the *continuous* operational
            // span of the step (drift plus small-jump compensation), variance
            // parameter 2: exp(-2 d1 d2 / (2 T)). The process only creeps
            // across the boundary while S moves continuously; W-excursions
            // during a jump of S are never visited by X.
            const double span = inc.continuous();
            const double u = rng.uniform01();
            const double d1 = plan.outer.dist(x, d);
            const double d2 = plan.outer.dist(xn, d);
            if (u < std::exp(-d1 * d2 / span)) {
                const Vec& from = d1 <= d2 ? x : xn;
                const int part = plan.outer.dist_with_part(from, d).second;
                const Vec proj = nearest_boundary_point(plan.outer.parts[part], from, d);
                out.outer.exit_time = t - 0.5 * dt;
                out.outer.exit_position = nudged_outside(plan.outer, from, proj, d);
                out.outer.continuous_exit = true;
                if (inner_active) {
                    out.inner_exited = true;
                    out.inner_tau = out.outer.exit_time;
                    out.inner_pos = out.outer.exit_position;
                }
                return out;
            }
            if (inner_active) {
                if (!plan.inner->contains(xn, d)) {
                    inner_active = false;
                    out.inner_exited = true;
                    out.inner_tau = t;
                    out.inner_pos = xn;
                } else {
                    const double i1 = plan.inner->dist(x, d);
                    const double i2 = plan.inner->dist(xn, d);
                    if (u < std::exp(-i1 * i2 / span)) {
                        const Vec& from = i1 <= i2 ? x : xn;
                        const int part = plan.inner->dist_with_part(from, d).second;
                        const Vec proj = nearest_boundary_point(plan.inner->parts[part], from, d);
                        inner_active = false;
                        out.inner_exited = true;
                        out.inner_tau = t - 0.5 * dt;
                        out.inner_pos = nudged_outside(*plan.inner, from, proj, d);
                    }
                }
            }
        } else if (inner_active && !plan.inner->contains(xn, d)) {
            inner_active = false;
            out.inner_exited = true;
            out.inner_tau = t;
            out.inner_pos = xn;
        }

        if (probe_occ) {
            for (std::size_t p = 0; p < plan.probes.size(); ++p) {
                const double dist2 = norm2(sub(xn, plan.probes[p].center, d), d);
                const double r = plan.probes[p].radius;
                if (dist2 < 4.0 * r * r) {
                    (*probe_occ)[2 * p + 1] += dt;
                    if (dist2 < r * r) (*probe_occ)[2 * p] += dt;
                }
            }
        }
        x = xn;
    }

    out.outer.censored = true;
    out.outer.exit_time = t;
    out.outer.exit_position = x;
    return out;
}

Harvest harvest_chunk(const ProcessSpec& proc, const HarvestPlan& plan, const PathConfig& cfg,
                      const IncrementSampler& sampler, const Vec& x0, long long begin,
                      long long end) {
    Harvest h;
    h.outer_targets.resize(plan.outer_targets.size());
    h.inner_targets.resize(plan.inner_targets.size());
    h.occupation.resize(plan.probes.size());
    if (plan.tau_histogram) h.tau_hist = *plan.tau_histogram;
    std::vector<double> occ(2 * plan.probes.size(), 0.0);
    const int d = proc.dim;
    for (long long p = begin; p < end; ++p) {
        Rng rng(cfg.seed, static_cast<std::uint64_t>(p));
        PathOutcome o =
            run_one_path(proc, plan, cfg, sampler, x0, rng, plan.probes.empty() ? nullptr : &occ);
        ++h.n;
        if (o.outer.censored) {
            ++h.censored;
        } else {
            h.tau_outer.add(o.outer.exit_time);
            h.exited_by_jump.add(o.outer.exited_by_jump ? 1.0 : 0.0);
            h.boundary_exit.add(o.outer.continuous_exit ? 1.0 : 0.0);
            if (plan.tau_histogram) h.tau_hist.add(o.outer.exit_time);
            for (std::size_t i = 0; i < plan.outer_targets.size(); ++i)
                h.outer_targets[i].add(plan.outer_targets[i](o.outer.exit_position, d) ? 1.0 : 0.0);
        }
        if (plan.inner) {
            if (o.inner_exited) {
                h.tau_inner.add(o.inner_tau);
                for (std::size_t i = 0; i < plan.inner_targets.size(); ++i)
                    h.inner_targets[i].add(plan.inner_targets[i](o.inner_pos, d) ? 1.0 : 0.0);
            } else {
                ++h.inner_censored;
            }
        }
        for (std::size_t i = 0; i < plan.probes.size(); ++i) {
            h.occupation[i][0].add(occ[2 * i]);
            h.occupation[i][1].add(occ[2 * i + 1]);
        }
    }
    return h;
}

constexpr long long kChunk = 2048;

}  // namespace

ExitRecord simulate_exit(const ProcessSpec& proc, const Region& region, const Vec& x0,
                         const PathConfig& cfg, Rng& rng) {
    if (!region.contains(x0, proc.dim))
        throw PreconditionError("simulate_exit: start point outside the domain");
    IncrementSampler sampler(proc.subordinator, cfg.dt);

    std::optional<OccupationGrid> grid = cfg.occupation_bins;
    if (grid && proc.dim != 2) throw ConfigError("occupation_bins: d = 2 only");
    const int d = proc.dim;
    const double thr =
        cfg.jump_threshold >= 0.0 ? cfg.jump_threshold : proc.subordinator.drift() * cfg.dt;
    ExitRecord rec;
    if (grid) rec.occupation.assign(static_cast<std::size_t>(grid->nx) * grid->ny, 0.0);
    Vec x = x0;
    double t = 0.0;
    for (long long step = 0; step < cfg.max_steps; ++step) {
        const StepIncrement inc = sampler.draw(rng);
        Vec xn = x;
        if (inc.total > 0.0) {
            const double sd = std::sqrt(2.0 * inc.total);
            for (int i = 0; i < d; ++i) xn[i] = x[i] + sd * rng.normal();
        }
        t += cfg.dt;
        if (!region.contains(xn, d)) {
            rec.exit_time = t;
            rec.exit_position = xn;
            rec.exited_by_jump =
                inc.jump > thr && norm2(sub(xn, x, d), d) > 72.0 * inc.continuous();
            return rec;
        }
        if (cfg.bridge_correction && inc.continuous() > 0.0) {
            const double span = inc.continuous();
            const double u = rng.uniform01();
            const double d1 = region.dist(x, d);
            const double d2 = region.dist(xn, d);
            if (u < std::exp(-d1 * d2 / span)) {
                const auto [dn, part] =
                    d1 <= d2 ? region.dist_with_part(x, d) : region.dist_with_part(xn, d);
                const Vec& from = d1 <= d2 ? x : xn;
                const Vec proj = nearest_boundary_point(region.parts[part], from, d);
                rec.exit_time = t - 0.5 * cfg.dt;
                rec.exit_position = nudged_outside(region, from, proj, d);
                rec.continuous_exit = true;
                return rec;
            }
        }
        if (grid) {
            const int ix = static_cast<int>(std::floor((xn[0] - grid->lo[0]) / grid->h));
            const int iy = static_cast<int>(std::floor((xn[1] - grid->lo[1]) / grid->h));
            if (ix >= 0 && ix < grid->nx && iy >= 0 && iy < grid->ny)
                rec.occupation[static_cast<std::size_t>(iy) * grid->nx + ix] += cfg.dt;
        }
        x = xn;
    }
    rec.censored = true;
    rec.exit_time = t;
    rec.exit_position = x;
    return rec;
}

static Harvest harvest_impl(const ProcessSpec& proc, const HarvestPlan& plan,
                            const PathConfig& cfg, const Vec& x0, long long n_paths,
                            bool parallel) {
    if (!plan.outer.contains(x0, proc.dim))
        throw PreconditionError("harvest_paths: start point outside the domain");
    if (plan.inner && !plan.inner->contains(x0, proc.dim))
        throw PreconditionError("harvest_paths: start point outside the inner region");
    IncrementSampler sampler(proc.subordinator, cfg.dt);
    const long long n_chunks = (n_paths + kChunk - 1) / kChunk;
    std::vector<Harvest> parts(static_cast<std::size_t>(n_chunks));
    if (parallel) {
        const int nw = cfg.workers > 0 ? cfg.workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nw)
        for (long long c = 0; c < n_chunks; ++c) {
            const long long b = c * kChunk, e = std::min(n_paths, b + kChunk);
            parts[static_cast<std::size_t>(c)] =
                harvest_chunk(proc, plan, cfg, sampler, x0, b, e);
        }
    } else {
        for (long long c = 0; c < n_chunks; ++c) {
            const long long b = c * kChunk, e = std::min(n_paths, b + kChunk);
            parts[static_cast<std::size_t>(c)] =
                harvest_chunk(proc, plan, cfg, sampler, x0, b, e);
        }
    }
    Harvest total;
    total.outer_targets.resize(plan.outer_targets.size());
    total.inner_targets.resize(plan.inner_targets.size());
    total.occupation.resize(plan.probes.size());
    if (plan.tau_histogram) total.tau_hist = *plan.tau_histogram;
    for (const auto& p : parts) total.merge(p);
    return total;
}

// The start point rides along in the plan-free API: estimators pass it through.
Harvest harvest_paths(const ProcessSpec& proc, const HarvestPlan& plan, const PathConfig& cfg,
                      long long n_paths) {
    return harvest_impl(proc, plan, cfg, plan.start, n_paths, true);
}

Harvest harvest_paths_serial(const ProcessSpec& proc, const HarvestPlan& plan,
                             const PathConfig& cfg, long long n_paths) {
    return harvest_impl(proc, plan, cfg, plan.start, n_paths, false);
}

Estimate estimate_mean_exit_time(const ProcessSpec& proc, const Region& region, const Vec& x0,
                                 const PathConfig& cfg, long long n_paths) {
    HarvestPlan plan;
    plan.outer = region;
    plan.start = x0;
    Harvest h = harvest_paths(proc, plan, cfg, n_paths);
    if (h.censored_fraction() >= cfg.censor_budget)
        throw CensoringError("estimate_mean_exit_time: censored fraction " +
                             std::to_string(h.censored_fraction()) + " exceeds budget");
    return Estimate::from(h.tau_outer);
}

Estimate estimate_exit_distribution(const ProcessSpec& proc, const Region& region, const Vec& x0,
                                    const ExitTarget& target, const PathConfig& cfg,
                                    long long n_paths) {
    HarvestPlan plan;
    plan.outer = region;
    plan.start = x0;
    plan.outer_targets.push_back(target);
    Harvest h = harvest_paths(proc, plan, cfg, n_paths);
    if (h.censored_fraction() >= cfg.censor_budget)
        throw CensoringError("estimate_exit_distribution: excessive censoring");
    return Estimate::from(h.outer_targets[0]);
}

GreenEstimate estimate_green(const ProcessSpec& proc, const Region& region, const Vec& x0,
                             const Vec& probe, double bandwidth, const PathConfig& cfg,
                             long long n_paths) {
    const int d = proc.dim;
    if (!region.contains(probe, d)) throw PreconditionError("estimate_green: probe outside domain");
    if (region.dist(probe, d) <= 2.0 * bandwidth)
        throw PreconditionError("estimate_green: probe too close to the boundary");
    if (norm(sub(probe, x0, d), d) <= 2.0 * bandwidth)
        throw PreconditionError("estimate_green: probe too close to the start point");
    HarvestPlan plan;
    plan.outer = region;
    plan.start = x0;
    plan.probes.push_back({probe, bandwidth});
    Harvest h = harvest_paths(proc, plan, cfg, n_paths);
    if (h.censored_fraction() >= cfg.censor_budget)
        throw CensoringError("estimate_green: excessive censoring");
    const double v1 = ball_volume(d) * std::pow(bandwidth, d);
    const double v2 = ball_volume(d) * std::pow(2.0 * bandwidth, d);
    GreenEstimate g;
    g.value = Estimate::from(h.occupation[0][0]);
    g.value.mean /= v1;
    g.value.se /= v1;
    g.value_2h = Estimate::from(h.occupation[0][1]);
    g.value_2h.mean /= v2;
    g.value_2h.se /= v2;
    return g;
}

Estimate estimate_sup_tail(const ProcessSpec& proc, double t, double r, const PathConfig& cfg,
                           long long n_paths) {
    if (!(t > 0.0 && r > 0.0)) throw PreconditionError("estimate_sup_tail: need t, r > 0");
    const int d = proc.dim;
    IncrementSampler sampler(proc.subordinator, cfg.dt);
    const long long n_steps = static_cast<long long>(std::ceil(t / cfg.dt));
    const long long n_chunks = (n_paths + kChunk - 1) / kChunk;
    std::vector<Accum> parts(static_cast<std::size_t>(n_chunks));
    const int nw = cfg.workers > 0 ? cfg.workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nw)
    for (long long c = 0; c < n_chunks; ++c) {
        Accum acc;
        const long long b = c * kChunk, e = std::min(n_paths, b + kChunk);
        for (long long p = b; p < e; ++p) {
            Rng rng(cfg.seed, static_cast<std::uint64_t>(p));
            Vec x = vec0();
            bool crossed = false;
            for (long long s = 0; s < n_steps && !crossed; ++s) {
                const StepIncrement inc = sampler.draw(rng);
                Vec xn = x;
                if (inc.total > 0.0) {
                    const double sd = std::sqrt(2.0 * inc.total);
                    for (int i = 0; i < d; ++i) xn[i] = x[i] + sd * rng.normal();
                }
                if (norm2(xn, d) >= r * r) {
                    crossed = true;
                } else if (cfg.bridge_correction && inc.continuous() > 0.0) {
                    const double d1 = r - norm(x, d), d2 = r - norm(xn, d);
                    if (rng.uniform01() < std::exp(-d1 * d2 / inc.continuous())) crossed = true;
                }
                x = xn;
            }
            acc.add(crossed ? 1.0 : 0.0);
        }
        parts[static_cast<std::size_t>(c)] = acc;
    }
    Accum total;
    for (const auto& a : parts) total.merge(a);
    return Estimate::from(total);
}

double scale_adapted_dt(const ProcessSpec& proc, double r, double c_dt) {
    const LevyTriple triple = subordinate_bm_triple(proc.subordinator, proc.dim);
    return c_dt / pruitt_phi_checked(triple, r);
}

}  // namespace bhplab
