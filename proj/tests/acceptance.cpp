// Acceptance suite: one pass/fail line per criterion, every tolerance pinned
// in code. Run all criteria (default) or a subset: ./acceptance 3 7 12
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <set>
#include <string>
#include <vector>

#include "bhplab/experiments.hpp"
#include "bhplab/fitting.hpp"
#include "bhplab/presets.hpp"
#include "bhplab/pruitt.hpp"

using namespace bhplab;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::vector<double> dyadic(int from_exp, int to_exp) {
    std::vector<double> g;
    for (int e = to_exp; e >= from_exp; --e) g.push_back(std::pow(2.0, e));
    return g;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof(buf), f, ap);
    va_end(ap);
    return buf;
}

// 1. Ball exit exactness: E_0 tau_{B(0,1)} = 1/4 within 3 stderr at 1e5 paths
// with bridge correction on, in under a minute.
void criterion_1() {
    const auto t0 = std::chrono::steady_clock::now();
    ProcessSpec proc{2, SubordinatorSpec::pure_drift(1.0)};
    PathConfig cfg;
    cfg.dt = scale_adapted_dt(proc, 1.0, 1e-3);  // 2.5e-4
    cfg.seed = 94111;
    cfg.bridge_correction = true;
    const Estimate e =
        estimate_mean_exit_time(proc, Region(Ball{vec0(), 1.0}), vec0(), cfg, 100000);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = std::fabs(e.mean - 0.25) <= 3.0 * e.se && secs < 60.0;
    report(1, pass,
           fmt("ball exit 0.25: mean=%.6f se=%.2g dev=%.2f se, %.1fs", e.mean, e.se,
               std::fabs(e.mean - 0.25) / e.se, secs));
}

// 2. Pruitt bound: phi = l + sqrt(l) band <= 10 over r in {2^-8..1}; pure BM
// product identically 1 within MC error.
void criterion_2() {
    McBudget mc;
    mc.n_paths = 20000;
    mc.seed = 52801;
    ProcessSpec bm{2, SubordinatorSpec::pure_drift(1.0)};
    const ExperimentReport rb = verify_pruitt(bm, dyadic(-8, 0), mc, {});
    bool bm_ok = rb.verdict == Verdict::consistent;
    double worst_dev = 0.0;
    for (const auto& row : rb.per_scale) {
        const double p = row.at("product").get<double>();
        const double phi = row.at("phi").get<double>();
        const double se = row.at("mean_exit_time").at("stderr").get<double>();
        worst_dev = std::max(worst_dev, std::fabs(p - 1.0) / (phi * se));
        bm_ok = bm_ok && std::fabs(p - 1.0) <= 3.0 * phi * se;
    }
    mc.seed = 52802;
    ProcessSpec st{2, SubordinatorSpec::bm_plus_stable(1.0, 0.5)};
    const ExperimentReport rs = verify_pruitt(st, dyadic(-8, 0), mc, {});
    const double band = rs.fitted_constants.at("band").get<double>();
    const bool pass = bm_ok && band <= 10.0 && rs.verdict == Verdict::consistent;
    report(2, pass,
           fmt("Pruitt bands: BM worst dev=%.2f se, drift+stable(1/2) band=%.3f (cap 10)",
               worst_dev, band));
}

// 3. Stable scaling: slope of log E tau vs log r = 1.5 +- 0.1 over 2 decades,
// 1e5 paths per radius.
void criterion_3() {
    McBudget mc;
    mc.n_paths = 100000;
    mc.seed = 52803;
    mc.c_dt = 2e-3;
    ProcessSpec proc{2, SubordinatorSpec(0.0, StableSub{0.75})};
    const ExperimentReport rep = exit_time_scaling(proc, dyadic(-7, 0), 1.5, 0.1, mc, {});
    const double slope = rep.fitted_constants.at("slope").get<double>();
    report(3, rep.verdict == Verdict::consistent,
           fmt("stable scaling slope=%.4f (expect 1.5 +- 0.1)", slope));
}

// 4. Phi doubling over 1000 random triples x dyadic grid: zero violations.
void criterion_4() {
    const ExperimentReport rep = phi_doubling_sweep(1000, 52804, {});
    report(4, rep.verdict == Verdict::consistent,
           fmt("phi doubling violations=%d, observed ratios in [%.4f, %.4f] (theorem: [1/16, 3])",
               rep.fitted_constants.at("violations").get<int>(),
               rep.fitted_constants.at("min_ratio").get<double>(),
               rep.fitted_constants.at("max_ratio").get<double>()));
}

// 5. Jump-density law for the stable(1/2) subordinator in d=2: log-log slope
// -3 +- 0.05 on [0.01, 0.5]; doubling constant within 1e-3 of 8.
void criterion_5() {
    const SubordinatorSpec s(0.0, StableSub{0.5});
    const ExperimentReport rep = jump_density_scan(s, 2, {});
    const double slope = rep.fitted_constants.at("slope").get<double>();
    const double dbl = rep.fitted_constants.at("c_small").get<double>();
    const bool pass = std::fabs(slope + 3.0) <= 0.05 && std::fabs(dbl - 8.0) <= 1e-3;
    report(5, pass, fmt("j(r): slope=%.5f (expect -3 +- 0.05), doubling=%.6f (expect 8 +- 1e-3)",
                        slope, dbl));
}

// 6. mu2 checker: stable passes with c_small -> 2^{1+alpha}; tempered passes;
// the Gaussian-tailed density fails the shift inequality.
void criterion_6() {
    const Mu2Report st = check_mu2(SubordinatorSpec(0.0, StableSub{0.5}));
    const bool st_ok =
        st.small_ok && st.shift_ok && std::fabs(st.c_small - std::pow(2.0, 1.5)) <= 1e-6;
    const Mu2Report ts = check_mu2(SubordinatorSpec(0.0, TemperedStableSub{0.5, 1.0}));
    const bool ts_ok = ts.small_ok && ts.shift_ok;
    const Mu2Report gt = check_mu2(SubordinatorSpec(0.0, gauss_tail_density()));
    const bool gt_ok = !gt.shift_ok && gt.witness_shift > 1.0;
    report(6, st_ok && ts_ok && gt_ok,
           fmt("mu2: stable c_small=%.9f (2^1.5=%.9f), tempered pass=%d, gauss-tail shift fails "
               "at t=%.2f",
               st.c_small, std::pow(2.0, 1.5), ts_ok ? 1 : 0, gt.witness_shift));
}

// 7. Cone exponents at h=1/512: Green-axis q = pi/(2 theta) within 5% for
// theta in {pi/3, pi/4, pi/5}; exit-time profile at pi/4 shows slope 2 with
// the log correction detected.
void criterion_7() {
    ConeExponentParams p;  // defaults pin h=1/512, a in {2^-2..2^-6}, pole 0.875
    const ExperimentReport rep = cone_exponent_fits(p, {});
    std::string detail = "q fits:";
    for (const auto& row : rep.per_scale) {
        detail += fmt(" theta=%.3f q=%.3f/%.3f", row.at("theta").get<double>(),
                      row.at("green_fit").at("q_hat").get<double>(),
                      row.at("q_expected").get<double>());
        if (row.contains("exit_time_fit"))
            detail += fmt(" [tau q=%.3f log=%d]",
                          row.at("exit_time_fit").at("q_hat").get<double>(),
                          row.at("exit_time_fit").at("log_correction_detected").get<bool>() ? 1 : 0);
    }
    report(7, rep.verdict == Verdict::consistent, detail);
}

// 8. Critical-angle divergence: R(a) = E tau / G along the axis. At pi/4 the
// growth between a=2^-3 and a=2^-7 is within 40% of ln(2^8)/ln(2^4) = 2; at
// 2pi/3 the ratio varies by <= 30%; at pi/5 the divergence exponent is
// 0.5 +- 0.15.
void criterion_8() {
    ConeScanParams p;
    p.thetas = {2.0 * M_PI / 3.0, M_PI / 4.0, M_PI / 5.0};
    p.h = 1.0 / 1024.0;
    const ExperimentReport rep = cone_counterexample_scan(p, {}, {});
    bool pass = true;
    std::string detail;
    for (const auto& row : rep.per_scale) {
        const double theta = row.at("theta").get<double>();
        const double growth = row.at("growth").get<double>();
        const double slope = row.at("slope").get<double>();
        if (std::fabs(theta - 2.0 * M_PI / 3.0) < 1e-9) {
            double rmin = 1e300, rmax = 0.0;
            for (const auto& s : row.at("profile")) {
                rmin = std::min(rmin, s.at("ratio").get<double>());
                rmax = std::max(rmax, s.at("ratio").get<double>());
            }
            pass = pass && rmax / rmin <= 1.3;
            detail += fmt("2pi/3 band=%.3f (cap 1.3); ", rmax / rmin);
        } else if (std::fabs(theta - M_PI / 4.0) < 1e-9) {
            pass = pass && std::fabs(growth - 2.0) <= 0.4 * 2.0;
            detail += fmt("pi/4 growth=%.3f (expect 2.0 +- 40%%); ", growth);
        } else {
            pass = pass && std::fabs(slope - 0.5) <= 0.15;
            detail += fmt("pi/5 exponent=%.3f (expect 0.5 +- 0.15)", slope);
        }
    }
    report(8, pass, detail);
}

// 9. Levy-system identity on the half-space: ratio band (max/min) <= 4 over
// r in {2^-6..2^-2} and 5 interior points.
void criterion_9() {
    ProcessSpec proc{2, SubordinatorSpec::bm_plus_stable(1.0, 0.5)};
    McBudget mc;
    mc.n_paths = 50000;
    mc.seed = 52811;
    const ExperimentReport rep =
        verify_levy_system_exit(proc, HalfSpace{vec0(), make_vec(0.0, 1.0)},
                                BoundaryPoint{vec0()}, dyadic(-6, -2), mc, {});
    const double band = rep.fitted_constants.at("band").get<double>();
    report(9, rep.verdict == Verdict::consistent && band <= 4.0,
           fmt("Levy-system band=%.3f (cap 4) over 5 scales x 5 points", band));
}

// 10. A4 doubling uniformly bounded with no trend on the half-space, the
// 2pi/3 cone, and the pi/5 cone (below the critical angle).
void criterion_10() {
    ProcessSpec proc{2, SubordinatorSpec::bm_plus_stable(1.0, 0.5)};
    McBudget mc;
    mc.n_paths = 30000;
    struct Case {
        const char* name;
        DomainSpec dom;
        std::uint64_t seed;
    } cases[] = {
        {"half-space", HalfSpace{vec0(), make_vec(0.0, 1.0)}, 52812},
        {"cone 2pi/3", TruncatedCone{vec0(), make_vec(0.0, 1.0), 2.0 * M_PI / 3.0, 1.0}, 52813},
        {"cone pi/5", TruncatedCone{vec0(), make_vec(0.0, 1.0), M_PI / 5.0, 1.0}, 52814},
    };
    bool pass = true;
    std::string detail = "A4 C:";
    for (const auto& c : cases) {
        mc.seed = c.seed;
        const ExperimentReport rep =
            verify_A4(proc, c.dom, BoundaryPoint{vec0()}, dyadic(-5, -2), mc, {});
        pass = pass && rep.verdict == Verdict::consistent;
        detail += fmt(" %s C=%.2f slope=%.3f;", c.name, rep.fitted_constants.at("C").get<double>(),
                      rep.fitted_constants.at("slope").get<double>());
    }
    report(10, pass, detail);
}

// 11. BHP cross-check: on the 2pi/3 and pi/4 cones, test_condition_1_4a and
// bhp_ratio_scan return the same (conclusive) verdict at 3 dyadic scales.
void criterion_11() {
    ProcessSpec proc{2, SubordinatorSpec::bm_plus_stable(1.0, 0.5)};
    McBudget mc;
    mc.n_paths = 100000;
    bool pass = true;
    std::string detail;
    struct Case {
        const char* name;
        double theta;
        Verdict expected;
    } cases[] = {
        {"2pi/3", 2.0 * M_PI / 3.0, Verdict::consistent},
        {"pi/4", M_PI / 4.0, Verdict::inconsistent},
    };
    for (const auto& c : cases) {
        const DomainSpec cone = TruncatedCone{vec0(), make_vec(0.0, 1.0), c.theta, 1.0};
        mc.seed = 52818;
        const ExperimentReport ra =
            test_condition_1_4a(proc, cone, BoundaryPoint{vec0()}, dyadic(-4, -2), 1, mc, {});
        mc.seed = 52819;
        const ExperimentReport rb =
            bhp_ratio_scan(proc, cone, BoundaryPoint{vec0()}, dyadic(-4, -2), mc, {});
        const bool conclusive =
            ra.verdict != Verdict::inconclusive && rb.verdict != Verdict::inconclusive;
        const bool agree = ra.verdict == rb.verdict;
        pass = pass && conclusive && agree && ra.verdict == c.expected;
        detail += fmt("%s: 1.4a=%s bhp=%s (expect %s); ", c.name,
                      verdict_name(ra.verdict).c_str(), verdict_name(rb.verdict).c_str(),
                      verdict_name(c.expected).c_str());
    }
    report(11, pass, detail);
}

// 12. Determinism: every preset re-run with the same seed yields byte-identical
// reports (budgets reduced so the sweep stays tractable; the pipeline is the
// same code path at any size).
void criterion_12() {
    bool pass = true;
    std::string first_diff;
    for (const auto& p : list_presets()) {
        json cfg = preset_config(p.name);
        if (cfg.contains("n_paths")) cfg["n_paths"] = 2000;
        if (cfg["experiment"] == "cone-scan") {
            cfg["h"] = 1.0 / 192.0;
            cfg["a_grid"] = {0.125, 0.0625, 0.03125};
        }
        if (cfg["experiment"] == "cone-exponents") {
            cfg["h"] = 1.0 / 192.0;
            cfg["a_fit"] = {0.25, 0.125, 0.0625, 0.03125, 0.015625};
        }
        if (cfg["experiment"] == "phi-doubling") cfg["n_triples"] = 50;
        const RunConfig rc = parse_run_config(cfg);
        std::string a, b;
        try {
            a = run_experiment(rc, "").to_json().dump();
            b = run_experiment(rc, "").to_json().dump();
        } catch (const std::exception& e) {
            pass = false;
            if (first_diff.empty()) first_diff = p.name + " threw: " + e.what();
            continue;
        }
        if (a != b) {
            pass = false;
            if (first_diff.empty()) first_diff = p.name;
        }
    }
    report(12, pass,
           pass ? "all presets re-run byte-identical"
                : "first non-reproducible preset: " + first_diff);
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
    auto want = [&](int k) { return wanted.empty() || wanted.count(k); };

    using Fn = void (*)();
    const Fn criteria[] = {criterion_1, criterion_2,  criterion_3,  criterion_4,
                           criterion_5, criterion_6,  criterion_7,  criterion_8,
                           criterion_9, criterion_10, criterion_11, criterion_12};
    for (int k = 1; k <= 12; ++k) {
        if (!want(k)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            criteria[k - 1]();
        } catch (const std::exception& e) {
            report(k, false, std::string("exception: ") + e.what());
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("           (criterion %d took %.1fs)\n", k, secs);
    }
    if (g_failures) std::printf("%d criterion(s) FAILED\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
