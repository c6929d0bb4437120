#include "wpk/concentration.hpp"

#include "wpk/phase_space.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace wpk {
namespace {

constexpr cplx kI{0.0, 1.0};

ComplexField normalized(const ComplexField& f) {
    double m = lp_norm(f, 2.0);
    if (m == 0.0)
        throw std::invalid_argument("corpus: zero element");
    return cplx(1.0 / m) * f;
}

} // namespace

std::vector<CorpusElement> make_corpus(const Potential& p, const Grid1D& grid, std::uint64_t seed, double delta0,
                                       const EvolveParams& params) {
    std::mt19937_64 rng(seed);
    auto uni = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
    auto log_uni = [&](double a, double b) { return std::exp(uni(std::log(a), std::log(b))); };

    std::vector<CorpusElement> out;
    for (int i = 0; i < 8; ++i) {
        double lam = log_uni(0.125, 1.0);
        PhasePoint z{uni(-6, 6), uni(-6, 6)};
        double tb = uni(-delta0, delta0);
        auto f = evolve(p, packet(grid, z, lam), tb, 0.0, params);
        out.push_back({"planted", normalized(f)});
    }
    for (int i = 0; i < 8; ++i) {
        double a = uni(-2, 2), sigma = log_uni(1.0, 6.0), c = uni(-2, 2);
        auto f = ComplexField::sample(grid, [&](double x) {
            double y = (x - c) / sigma;
            return std::exp(-0.5 * y * y) * std::exp(kI * (0.5 * a * (x - c) * (x - c)));
        });
        out.push_back({"chirp", normalized(f)});
    }
    for (int i = 0; i < 7; ++i) {
        double l1 = log_uni(0.25, 4.0), l2 = log_uni(0.25, 4.0);
        double sep = uni(4, 12);
        PhasePoint z1{-sep / 2, uni(-4, 4)}, z2{sep / 2, uni(-4, 4)};
        double weight = uni(0.3, 1.0);
        auto f = packet(grid, z1, l1) + cplx(weight) * packet(grid, z2, l2);
        out.push_back({"two_bump", normalized(f)});
    }
    for (int i = 0; i < 7; ++i) {
        double lam = log_uni(1.0 / 16.0, 1.0);
        auto f = ComplexField::sample(grid, [&](double x) {
            double y = x / lam;
            return cplx(std::exp(-0.5 * y * y));
        });
        out.push_back({"dilated", normalized(f)});
    }
    return out;
}

PowerLawFit fit_lower_envelope(std::span<const double> eps, std::span<const double> a) {
    if (eps.size() != a.size())
        throw std::invalid_argument("fit_lower_envelope: size mismatch");
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < eps.size(); ++i)
        if (eps[i] > 0.0 && a[i] > 0.0)
            order.push_back(i);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return eps[i] < eps[j] || (eps[i] == eps[j] && i < j);
    });
    PowerLawFit fit;
    double running = kInfinity;
    for (auto it = order.rbegin(); it != order.rend(); ++it)
        if (a[*it] <= running) {
            running = a[*it];
            fit.envelope.push_back(*it);
        }
    std::reverse(fit.envelope.begin(), fit.envelope.end());
    if (fit.envelope.size() < 2)
        return fit;

    double n = static_cast<double>(fit.envelope.size()), mx = 0, my = 0;
    for (auto i : fit.envelope) {
        mx += std::log(eps[i]);
        my += std::log(a[i]);
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (auto i : fit.envelope) {
        double dx = std::log(eps[i]) - mx, dy = std::log(a[i]) - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0)
        return fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    fit.beta = fit.slope - 1.0;
    return fit;
}

} // namespace wpk
