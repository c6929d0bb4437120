#pragma once

// Closed-form references used only by the tests.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <utility>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
inline constexpr double pi = std::numbers::pi;

// free evolution of pi^{-1/4} e^{-x^2/2}
inline cplx free_gaussian(double t, double x) {
    cplx s(1.0, t);
    return std::pow(pi, -0.25) / std::sqrt(s) * std::exp(-x * x / (2.0 * s));
}

// free evolution of e^{i(x-x0)xi0} a e^{-(x-x0)^2/(2 l^2)}
inline cplx free_packet(double t, double x, double x0, double xi0, double l, double a) {
    cplx s(l * l, t);
    double y = x - x0;
    cplx arg = cplx(0, 1) * xi0 * y - cplx(0, 0.5) * xi0 * xi0 * t;
    cplx expo = -(y - xi0 * t) * (y - xi0 * t) / (2.0 * s);
    return a * l / std::sqrt(s) * std::exp(arg + expo);
}

// |harmonic coherent state| from the ground state displaced to x0 at rest
inline double coherent_modulus(double t, double x, double x0) {
    double y = x - x0 * std::cos(t);
    return std::pow(pi, -0.25) * std::exp(-0.5 * y * y);
}

inline double mehler_sup(double t) { return 1.0 / std::sqrt(2.0 * pi * std::sin(t)); }
inline double free_kernel_sup(double t) { return 1.0 / std::sqrt(2.0 * pi * t); }

// int_a^b int |free_gaussian|^6 dx dt
inline double free_l6_power(double a, double b) {
    return (std::atan(b) - std::atan(a)) / (pi * std::sqrt(3.0));
}

struct Rot {
    double x, xi;
};
// unit-frequency harmonic flow
inline Rot rotation(double x, double xi, double t) {
    return {x * std::cos(t) + xi * std::sin(t), -x * std::sin(t) + xi * std::cos(t)};
}

struct BruteInterval {
    double score = 0.0;
    std::size_t first = 0, count = 0;
};

// every contiguous run of cells, summed directly
inline BruteInterval brute_hls(const std::vector<double>& g, double h, double q) {
    BruteInterval best{0.0, 0, g.size()};
    for (std::size_t len = 1; len <= g.size(); ++len)
        for (std::size_t i = 0; i + len <= g.size(); ++i) {
            double s = 0.0;
            for (std::size_t k = i; k < i + len; ++k)
                s += g[k];
            double score = s * h / std::pow(len * h, 1.0 / q);
            if (score > best.score) {
                best = {score, i, len};
            }
        }
    return best;
}

} // namespace oracle
