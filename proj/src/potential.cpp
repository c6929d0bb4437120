#include "wpk/potential.hpp"

#include "wpk/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wpk {

Potential::Potential(std::string label, ParamMap params, Fn v, Fn dv, Fn d2v, bool time_dependent,
                     std::vector<DeclaredSeminorm> declared)
    : label_(std::move(label)), params_(std::move(params)), v_(std::move(v)), dv_(std::move(dv)),
      d2v_(std::move(d2v)), time_dependent_(time_dependent), declared_(std::move(declared)) {
    if (!v_ || !dv_ || !d2v_)
        throw std::invalid_argument("potential: missing callable");
}

namespace {

ParamMap resolve(std::string_view label, const ParamMap& given, const ParamMap& defaults) {
    ParamMap out = defaults;
    for (const auto& [key, value] : given) {
        if (!defaults.count(key))
            throw std::invalid_argument("potential " + std::string(label) + ": unknown parameter '" + key + "'");
        if (!std::isfinite(value))
            throw std::invalid_argument("potential " + std::string(label) + ": non-finite parameter '" + key + "'");
        out[key] = value;
    }
    return out;
}

} // namespace

std::vector<std::string> builtin_labels() { return {"zero", "linear", "harmonic", "soft_branch", "breathing"}; }

Potential builtin(std::string_view label, const ParamMap& params) {
    if (label == "zero") {
        resolve(label, params, {});
        auto z = [](double, double) { return 0.0; };
        return Potential("zero", {}, z, z, z, false, {{2, 0.0}, {3, 0.0}});
    }
    if (label == "linear") {
        auto pm = resolve(label, params, {{"E", 1.0}});
        double e = pm["E"];
        return Potential(
            "linear", pm, [e](double, double x) { return e * x; }, [e](double, double) { return e; },
            [](double, double) { return 0.0; }, false, {{2, 0.0}, {3, 0.0}});
    }
    if (label == "harmonic") {
        auto pm = resolve(label, params, {{"omega", 1.0}});
        double w2 = pm["omega"] * pm["omega"];
        return Potential(
            "harmonic", pm, [w2](double, double x) { return 0.5 * w2 * x * x; },
            [w2](double, double x) { return w2 * x; }, [w2](double, double) { return w2; }, false,
            {{2, w2}, {3, 0.0}});
    }
    if (label == "soft_branch") {
        auto pm = resolve(label, params, {});
        return Potential(
            "soft_branch", pm, [](double, double x) { return std::sqrt(1.0 + x * x); },
            [](double, double x) { return x / std::sqrt(1.0 + x * x); },
            [](double, double x) {
                double s = 1.0 + x * x;
                return 1.0 / (s * std::sqrt(s));
            },
            false, {{2, 1.0}});
    }
    if (label == "breathing") {
        auto pm = resolve(label, params, {{"omega0", 1.0}, {"a", 0.25}});
        double w0 = pm["omega0"], a = pm["a"];
        if (std::abs(a) > 0.5)
            throw std::invalid_argument("potential breathing: |a| must not exceed 1/2");
        auto w2 = [w0, a](double t) {
            double w = w0 * (1.0 + a * std::sin(t));
            return w * w;
        };
        double bound = w0 * w0 * (1.0 + std::abs(a)) * (1.0 + std::abs(a));
        return Potential(
            "breathing", pm, [w2](double t, double x) { return 0.5 * w2(t) * x * x; },
            [w2](double t, double x) { return w2(t) * x; }, [w2](double t, double) { return w2(t); }, true,
            {{2, bound}, {3, 0.0}});
    }
    throw std::invalid_argument("unknown potential label '" + std::string(label) + "'");
}

namespace {

double fd_step(double x) { return 1e-2 * std::sqrt(std::max(1.0, std::abs(x))); }

// d^k_x V for k >= 2: analytic at k = 2, nested central differences of d2v above.
double dxk(const Potential& p, int k, double t, double x) {
    if (k == 2)
        return p.curvature(t, x);
    int m = k - 2;
    double h = fd_step(x);
    double hm = std::pow(h, m);
    if (m > 12 || !(hm > 1e-280))
        throw std::domain_error("verify_subquadratic: finite-difference step underflow at k = " + std::to_string(k));
    double sum = 0.0, binom = 1.0;
    for (int j = 0; j <= m; ++j) {
        double sign = (j % 2 == 0) ? 1.0 : -1.0;
        sum += sign * binom * p.curvature(t, x + (0.5 * m - j) * h);
        binom = binom * (m - j) / (j + 1);
    }
    return sum / hm;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> out(static_cast<std::size_t>(std::max(n, 1)));
    if (n <= 1) {
        out[0] = 0.5 * (a + b);
        return out;
    }
    for (int i = 0; i < n; ++i)
        out[i] = a + (b - a) * i / (n - 1);
    return out;
}

} // namespace

double SubquadraticReport::m(int k) const {
    for (const auto& s : seminorms)
        if (s.k == k)
            return s.sup_dx;
    throw std::out_of_range("seminorm order not estimated");
}

SubquadraticReport verify_subquadratic(const Potential& p, const SubquadraticProbe& probe) {
    if (probe.k_max < 2)
        throw std::invalid_argument("verify_subquadratic: k_max must be at least 2");
    if (!std::isfinite(probe.x_lo) || !std::isfinite(probe.x_hi) || probe.x_hi <= probe.x_lo)
        throw std::invalid_argument("verify_subquadratic: box must be finite and nonempty");
    if (probe.t_hi < probe.t_lo || probe.nx < 2 || probe.nt < 1)
        throw std::invalid_argument("verify_subquadratic: bad sampling");

    auto xs = linspace(probe.x_lo, probe.x_hi, probe.nx);
    auto ts = linspace(probe.t_lo, probe.t_hi, probe.nt);
    const double ht = 1e-3;

    SubquadraticReport rep;
    for (int k = 2; k <= probe.k_max; ++k) {
        SeminormEstimate est{k, 0.0, 0.0};
        for (double t : ts)
            for (double x : xs) {
                est.sup_dx = std::max(est.sup_dx, std::abs(dxk(p, k, t, x)));
                if (p.time_dependent()) {
                    double d = (dxk(p, k, t + ht, x) - dxk(p, k, t - ht, x)) / (2 * ht);
                    est.sup_dxdt = std::max(est.sup_dxdt, std::abs(d));
                }
            }
        rep.seminorms.push_back(est);
    }

    for (double t : ts)
        for (double x : linspace(-1.0, 1.0, 201))
            rep.sup_v_unit_ball = std::max(rep.sup_v_unit_ball, std::abs(p.value(t, x)));

    // Decay of d^3 V on the outer eighth-to-full range of |x|.
    double x_b = std::max(std::abs(probe.x_lo), std::abs(probe.x_hi));
    double x_a = std::max(2.0, x_b / 8.0);
    double m2 = 0.0;
    for (double t : ts)
        for (double x : xs)
            m2 = std::max(m2, std::abs(p.curvature(t, x)));

    std::vector<double> lx, ly;
    double sup3 = 0.0;
    if (x_a < x_b) {
        for (int i = 0; i < 64; ++i) {
            double r = x_a * std::pow(x_b / x_a, i / 63.0);
            double best = 0.0;
            for (double x : {r, -r}) {
                if (x < probe.x_lo || x > probe.x_hi)
                    continue;
                for (double t : ts)
                    best = std::max(best, std::abs(dxk(p, 3, t, x)));
            }
            sup3 = std::max(sup3, best);
            if (best > 0.0) {
                lx.push_back(0.5 * std::log1p(r * r));
                ly.push_back(std::log(best));
            }
        }
    }
    for (double t : ts)
        for (double x : xs)
            sup3 = std::max(sup3, std::abs(dxk(p, 3, t, x)));

    if (sup3 <= 1e-9 * (1.0 + m2) || lx.size() < 2) {
        rep.decay.third_derivative_vanishes = true;
        rep.decay.epsilon = kInfinity;
        rep.decay.fitted_slope = -kInfinity;
        return rep;
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= lx.size();
    my /= ly.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    rep.decay.fitted_slope = sxy / sxx;
    rep.decay.epsilon = std::max(0.0, -rep.decay.fitted_slope - 1.0);
    return rep;
}

DerivativeConsistency check_derivatives(const Potential& p, double x_lo, double x_hi, int nx, double t_lo,
                                        double t_hi, int nt) {
    DerivativeConsistency out;
    for (double t : linspace(t_lo, t_hi, nt))
        for (double x : linspace(x_lo, x_hi, nx)) {
            double h = fd_step(x);
            auto v = [&](double y) { return p.value(t, y); };
            auto dv = [&](double y) { return p.gradient(t, y); };
            double fd1 = (-v(x + 2 * h) + 8 * v(x + h) - 8 * v(x - h) + v(x - 2 * h)) / (12 * h);
            double fd2 = (-dv(x + 2 * h) + 8 * dv(x + h) - 8 * dv(x - h) + dv(x - 2 * h)) / (12 * h);
            double e1 = p.gradient(t, x), e2 = p.curvature(t, x);
            out.max_rel_error_dv = std::max(out.max_rel_error_dv, std::abs(fd1 - e1) / std::max(std::abs(e1), 1.0));
            out.max_rel_error_d2v = std::max(out.max_rel_error_d2v, std::abs(fd2 - e2) / std::max(std::abs(e2), 1.0));
        }
    return out;
}

double curvature_bound(const Potential& p, double x_lo, double x_hi, double t_lo, double t_hi) {
    double out = 0.0;
    auto ts = linspace(t_lo, t_hi, p.time_dependent() ? 21 : 1);
    for (double t : ts) {
        for (double x : linspace(x_lo, x_hi, 801))
            out = std::max(out, std::abs(p.curvature(t, x)));
        if (x_lo < 0.0 && x_hi > 0.0)
            out = std::max(out, std::abs(p.curvature(t, 0.0)));
    }
    return out;
}

} // namespace wpk
