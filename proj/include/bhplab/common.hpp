#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bhplab {

// Fixed-capacity point type; experiments only need d <= 3.
constexpr int kMaxDim = 3;
using Vec = std::array<double, 3>;

inline constexpr Vec vec0() { return {0.0, 0.0, 0.0}; }

inline Vec make_vec(double x, double y = 0.0, double z = 0.0) { return {x, y, z}; }

inline double dot(const Vec& a, const Vec& b, int d) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const Vec& a, int d) { return dot(a, a, d); }
inline double norm(const Vec& a, int d) { return std::sqrt(norm2(a, d)); }

inline Vec add(const Vec& a, const Vec& b, int d) {
    Vec r = vec0();
    for (int i = 0; i < d; ++i) r[i] = a[i] + b[i];
    return r;
}

inline Vec sub(const Vec& a, const Vec& b, int d) {
    Vec r = vec0();
    for (int i = 0; i < d; ++i) r[i] = a[i] - b[i];
    return r;
}

inline Vec scale(const Vec& a, double c, int d) {
    Vec r = vec0();
    for (int i = 0; i < d; ++i) r[i] = c * a[i];
    return r;
}

// Surface measure of the unit sphere S^{d-1}: 2, 2*pi, 4*pi for d = 1, 2, 3.
inline double sphere_area(int d) {
    switch (d) {
        case 1: return 2.0;
        case 2: return 2.0 * M_PI;
        case 3: return 4.0 * M_PI;
        default: throw std::invalid_argument("sphere_area: dim must be 1, 2 or 3");
    }
}

// Volume of the unit ball in R^d.
inline double ball_volume(int d) { return sphere_area(d) / d; }

struct IntegrabilityError : std::runtime_error {
    explicit IntegrabilityError(const std::string& m) : std::runtime_error(m) {}
};

struct DegenerateTripleError : std::runtime_error {
    explicit DegenerateTripleError(const std::string& m) : std::runtime_error(m) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& m) : std::runtime_error(m) {}
};

struct PreconditionError : std::invalid_argument {
    explicit PreconditionError(const std::string& m) : std::invalid_argument(m) {}
};

struct RangeError : std::out_of_range {
    explicit RangeError(const std::string& m) : std::out_of_range(m) {}
};

struct CensoringError : std::runtime_error {
    explicit CensoringError(const std::string& m) : std::runtime_error(m) {}
};

struct SolverError : std::runtime_error {
    explicit SolverError(const std::string& m) : std::runtime_error(m) {}
};

}  // namespace bhplab
