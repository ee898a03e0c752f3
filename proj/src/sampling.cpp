#include "bhplab/sampling.hpp"

#include <algorithm>
#include <cmath>

namespace bhplab {

double standard_one_sided_stable(double alpha, Rng& rng) {
    const double u = M_PI * rng.uniform();  // (0, pi]
    const double w = rng.exponential();
    const double la = alpha * std::log(std::sin(alpha * u)) +
                      (1.0 - alpha) * std::log(std::sin((1.0 - alpha) * u)) -
                      std::log(std::sin(u));
    return std::exp(la / alpha - (1.0 - alpha) / alpha * std::log(w));
}

double effective_eps_rel(const SubordinatorSpec& spec) {
    const auto& sc = spec.sampling();
    if (sc.eps_rel) return *sc.eps_rel;
    if (std::holds_alternative<CustomSub>(spec.density()))
        throw ConfigError("sampling: custom density requires an explicit small-jump cutoff");
    return 1e-4;
}

TailJumpSampler::TailJumpSampler(const SubordinatorSpec& spec, double eps) : eps_(eps) {
    if (!(eps > 0.0)) throw PreconditionError("TailJumpSampler: eps must be > 0");
    if (!spec.has_jumps()) throw PreconditionError("TailJumpSampler: no jump part");
    if (const auto* st = std::get_if<StableSub>(&spec.density())) {
        mode_ = Mode::stable;
        alpha_ = st->alpha;
        rate_ = st->intensity * std::pow(eps_, -alpha_) / std::tgamma(1.0 - alpha_);
        return;
    }
    if (const auto* ts = std::get_if<TemperedStableSub>(&spec.density())) {
        // candidates from the untempered tail, thinned by e^{-mt}
        mode_ = Mode::tempered;
        alpha_ = ts->alpha;
        tempering_ = ts->m;
        rate_ = std::pow(eps_, -alpha_) / std::tgamma(1.0 - alpha_);
        return;
    }
    if (const auto* ss = std::get_if<SumStableSub>(&spec.density())) {
        mode_ = Mode::sum_stable;
        alpha_ = ss->alpha;
        beta_ = ss->beta;
        rate_a_ = std::pow(eps_, -alpha_) / std::tgamma(1.0 - alpha_);
        rate_ = rate_a_ + std::pow(eps_, -beta_) / std::tgamma(1.0 - beta_);
        return;
    }
    if (std::holds_alternative<GammaSub>(spec.density())) {
        mode_ = Mode::gamma;
        rate_ = spec.tail_intensity(eps_);
        return;
    }
    mode_ = Mode::table;
    // Tabulated inverse tail CDF on a log grid; the mass beyond the last node
    // (< 1e-10 of the total) is lumped into the final cell.
    double hi = std::max(1.0, 2.0 * eps_);
    while (spec.tail_intensity(hi) > 1e-10 * spec.tail_intensity(eps_) && hi < 1e12) hi *= 2.0;
    const int n = 2048;
    table_t_.reserve(n + 1);
    table_f_.reserve(n + 1);
    double acc = 0.0, prev = eps_;
    table_t_.push_back(prev);
    table_f_.push_back(0.0);
    for (int i = 1; i <= n; ++i) {
        const double t = eps_ * std::pow(hi / eps_, static_cast<double>(i) / n);
        acc += integrate_gk([&spec](double s) { return spec.mu(s); }, prev, t, spec.quad());
        table_t_.push_back(t);
        table_f_.push_back(acc);
        prev = t;
    }
    rate_ = acc;
    for (auto& f : table_f_) f /= acc;
}

double TailJumpSampler::draw(Rng& rng) const {
    switch (mode_) {
        case Mode::stable:
            return eps_ * std::pow(rng.uniform(), -1.0 / alpha_);
        case Mode::tempered: {
            const double t = eps_ * std::pow(rng.uniform(), -1.0 / alpha_);
            return rng.uniform() <= std::exp(-tempering_ * t) ? t : 0.0;
        }
        case Mode::sum_stable: {
            const double a = rng.uniform() * rate_ <= rate_a_ ? alpha_ : beta_;
            return eps_ * std::pow(rng.uniform(), -1.0 / a);
        }
        case Mode::gamma: {
            // exact rejection for e^{-t}/t on (eps, inf)
            if (eps_ < 1.0) {
                const double m1 = std::log(1.0 / eps_);
                const double m2 = std::exp(-1.0);
                for (;;) {
                    if (rng.uniform() * (m1 + m2) < m1) {
                        const double t = eps_ * std::pow(1.0 / eps_, rng.uniform01());
                        if (rng.uniform() <= std::exp(-t)) return t;
                    } else {
                        const double t = 1.0 + rng.exponential();
                        if (rng.uniform() * t <= 1.0) return t;
                    }
                }
            }
            for (;;) {
                const double t = eps_ + rng.exponential();
                if (rng.uniform() * t <= eps_) return t;
            }
        }
        case Mode::table: {
            const double u = rng.uniform01();
            auto it = std::lower_bound(table_f_.begin(), table_f_.end(), u);
            if (it == table_f_.begin()) return table_t_.front();
            if (it == table_f_.end()) return table_t_.back();
            const std::size_t i = static_cast<std::size_t>(it - table_f_.begin());
            const double f0 = table_f_[i - 1], f1 = table_f_[i];
            const double w = f1 > f0 ? (u - f0) / (f1 - f0) : 0.5;
            return std::exp((1.0 - w) * std::log(table_t_[i - 1]) + w * std::log(table_t_[i]));
        }
    }
    return 0.0;
}

IncrementSampler::IncrementSampler(const SubordinatorSpec& spec, double dt) : dt_(dt) {
    if (!(dt > 0.0)) throw PreconditionError("IncrementSampler: dt must be > 0");
    base_ = spec.drift() * dt;
    if (!spec.has_jumps()) {
        mode_ = Mode::drift_only;
        return;
    }
    if (const auto* st = std::get_if<StableSub>(&spec.density())) {
        mode_ = Mode::stable;
        alpha_ = st->alpha;
        dt_1a_ = std::pow(st->intensity * dt, 1.0 / alpha_);
        return;
    }
    if (const auto* ss = std::get_if<SumStableSub>(&spec.density())) {
        mode_ = Mode::sum_stable;
        alpha_ = ss->alpha;
        beta_ = ss->beta;
        dt_1a_ = std::pow(dt, 1.0 / alpha_);
        dt_1b_ = std::pow(dt, 1.0 / beta_);
        return;
    }
    mode_ = Mode::cp;
    const double eps = effective_eps_rel(spec) * dt;
    tail_ = std::make_shared<TailJumpSampler>(spec, eps);
    if (spec.sampling().compensate_small_jumps) base_ += dt * spec.first_moment(0.0, eps);
}

StepIncrement IncrementSampler::draw(Rng& rng) const {
    StepIncrement inc;
    switch (mode_) {
        case Mode::drift_only:
            break;
        case Mode::stable:
            inc.jump = dt_1a_ * standard_one_sided_stable(alpha_, rng);
            break;
        case Mode::sum_stable:
            inc.jump = dt_1a_ * standard_one_sided_stable(alpha_, rng) +
                       dt_1b_ * standard_one_sided_stable(beta_, rng);
            break;
        case Mode::cp: {
            const long n = rng.poisson(tail_->rate() * dt_);
            for (long i = 0; i < n; ++i) inc.jump += tail_->draw(rng);
            break;
        }
    }
    inc.total = base_ + inc.jump;
    return inc;
}

PotentialDensityReport potential_density_estimate(const SubordinatorSpec& spec,
                                                  const std::vector<double>& x_levels,
                                                  long long n_paths, std::uint64_t seed,
                                                  double eps_rel) {
    PotentialDensityReport rep;
    std::vector<double> levels = x_levels;
    std::sort(levels.begin(), levels.end());
    if (levels.empty() || levels.front() <= 0.0)
        throw PreconditionError("potential_density_estimate: levels must be positive");

    if (spec.drift() <= 0.0) {
        rep.drift_warning = true;  // without drift every fixed level is missed a.s.
        for (double x : levels) rep.levels.push_back({x, Estimate{0.0, 0.0, n_paths}});
        return rep;
    }
    if (!spec.has_jumps()) {
        for (double x : levels) rep.levels.push_back({x, Estimate{1.0, 0.0, n_paths}});
        return rep;
    }

    const double x_max = levels.back();
    const double eps = eps_rel * levels.front();
    TailJumpSampler jumps(spec, eps);
    const double comp =
        spec.sampling().compensate_small_jumps ? spec.first_moment(0.0, eps) : 0.0;
    const double b_eff = spec.drift() + comp;  // small jumps folded into the creep rate
    const double rate = jumps.rate();

    std::vector<Accum> acc(levels.size());
    std::vector<char> hit(levels.size());
    for (long long p = 0; p < n_paths; ++p) {
        Rng rng(seed, static_cast<std::uint64_t>(p));
        double s = 0.0;
        std::size_t next_level = 0;
        std::fill(hit.begin(), hit.end(), 1);
        while (s <= x_max && next_level < levels.size()) {
            const double wait = rng.exponential() / rate;
            const double jump_start = s + b_eff * wait;
            while (next_level < levels.size() && levels[next_level] < jump_start)
                ++next_level;  // crept across
            const double j = jumps.draw(rng);
            const double s_after = jump_start + j;
            std::size_t k = next_level;
            while (k < levels.size() && levels[k] <= s_after) {
                if (levels[k] > jump_start) hit[k] = 0;  // straddled
                ++k;
            }
            next_level = k;
            s = s_after;
        }
        for (std::size_t i = 0; i < levels.size(); ++i) acc[i].add(hit[i] ? 1.0 : 0.0);
    }
    for (std::size_t i = 0; i < levels.size(); ++i)
        rep.levels.push_back({levels[i], Estimate::from(acc[i])});
    return rep;
}

}  // namespace bhplab
