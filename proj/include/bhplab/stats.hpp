#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace bhplab {

// Streaming (count, mean, M2) accumulator with an associative merge, so that
// per-chunk results can be combined in a fixed order independent of which
// worker produced them.
struct Accum {
    long long n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++n;
        const double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }

    void merge(const Accum& o) {
        if (o.n == 0) return;
        if (n == 0) {
            *this = o;
            return;
        }
        const double nt = static_cast<double>(n + o.n);
        const double d = o.mean - mean;
        m2 += o.m2 + d * d * (static_cast<double>(n) * static_cast<double>(o.n)) / nt;
        mean += d * static_cast<double>(o.n) / nt;
        n += o.n;
    }

    double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
    double stderror() const { return n > 0 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0; }
};

struct Histogram {
    double lo = 0.0, hi = 1.0;
    std::vector<long long> counts;

    Histogram() = default;
    Histogram(double l, double h, int bins) : lo(l), hi(h), counts(bins, 0) {}

    void add(double x) {
        if (counts.empty()) return;
        double t = (x - lo) / (hi - lo);
        int b = static_cast<int>(t * static_cast<double>(counts.size()));
        if (b < 0) b = 0;
        if (b >= static_cast<int>(counts.size())) b = static_cast<int>(counts.size()) - 1;
        ++counts[b];
    }

    void merge(const Histogram& o) {
        if (counts.size() != o.counts.size()) {
            if (counts.empty()) *this = o;
            return;
        }
        for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += o.counts[i];
    }
};

// A Monte Carlo point estimate: mean, stderr = sample sd / sqrt(n).
struct Estimate {
    double mean = 0.0;
    double se = 0.0;
    long long n = 0;

    static Estimate from(const Accum& a) { return {a.mean, a.stderror(), a.n}; }
};

// Simple least squares of y against x; returns (slope, intercept, sse).
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double sse = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace bhplab
