#include "wpk/classical_flow.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wpk {
namespace {

int step_count(double t0, double t1, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw std::invalid_argument("flow: dt must be positive");
    if (!std::isfinite(t0) || !std::isfinite(t1) || std::abs(t1 - t0) > 10.0)
        throw std::invalid_argument("flow: |t1 - t0| must not exceed 10");
    double span = std::abs(t1 - t0);
    if (span == 0.0)
        return 0;
    return std::max(1, static_cast<int>(std::ceil(span / dt * (1.0 - 1e-12))));
}

template <class Visit>
PhasePoint integrate(const Potential& p, PhasePoint z, double t0, double t1, double dt, Visit&& visit) {
    int n = step_count(t0, t1, dt);
    double h = n ? (t1 - t0) / n : 0.0;
    visit(0, t0, z);
    for (int i = 0; i < n; ++i) {
        double tm = t0 + (i + 0.5) * h;
        z.xi -= 0.5 * h * p.gradient(tm, z.x);
        z.x += h * z.xi;
        z.xi -= 0.5 * h * p.gradient(tm, z.x);
        if (!std::isfinite(z.x) || !std::isfinite(z.xi))
            throw NumericalError("flow: trajectory blew up");
        visit(i + 1, i + 1 == n ? t1 : t0 + (i + 1) * h, z);
    }
    return z;
}

double lagrangian(const Potential& p, double t, PhasePoint z) { return 0.5 * z.xi * z.xi - p.value(t, z.x); }

} // namespace

void Trajectory::write_csv(std::ostream& os) const {
    os << "t,x,xi,action\n";
    os.precision(17);
    for (std::size_t i = 0; i < times.size(); ++i)
        os << times[i] << ',' << points[i].x << ',' << points[i].xi << ',' << action_values[i] << '\n';
}

PhasePoint flow(const Potential& p, PhasePoint z, double t0, double t1, double dt) {
    return integrate(p, z, t0, t1, dt, [](int, double, PhasePoint) {});
}

double action(const Potential& p, PhasePoint z, double t0, double t1, double dt) {
    double acc = 0.0, prev_t = t0, prev_l = 0.0;
    integrate(p, z, t0, t1, dt, [&](int i, double t, PhasePoint w) {
        double l = lagrangian(p, t, w);
        if (i > 0)
            acc += 0.5 * (t - prev_t) * (l + prev_l);
        prev_t = t;
        prev_l = l;
    });
    return acc;
}

Trajectory trajectory(const Potential& p, PhasePoint z, double t0, double t1, double dt) {
    Trajectory tr;
    double prev_l = 0.0;
    integrate(p, z, t0, t1, dt, [&](int i, double t, PhasePoint w) {
        double l = lagrangian(p, t, w);
        double a = i == 0 ? 0.0 : tr.action_values.back() + 0.5 * (t - tr.times.back()) * (l + prev_l);
        tr.times.push_back(t);
        tr.points.push_back(w);
        tr.action_values.push_back(a);
        prev_l = l;
    });
    return tr;
}

namespace {

double m2_around(const Potential& p, const std::vector<const Trajectory*>& trs) {
    double lo = kInfinity, hi = -kInfinity, tlo = kInfinity, thi = -kInfinity;
    for (const auto* tr : trs) {
        for (const auto& z : tr->points) {
            lo = std::min(lo, z.x);
            hi = std::max(hi, z.x);
        }
        tlo = std::min({tlo, tr->times.front(), tr->times.back()});
        thi = std::max({thi, tr->times.front(), tr->times.back()});
    }
    return curvature_bound(p, lo - 1.0, hi + 1.0, tlo, thi);
}

} // namespace

PairEstimates check_pair_estimates(const Potential& p, PhasePoint z0, PhasePoint z1, double s, double t, double dt,
                                   std::optional<double> m2) {
    if (std::abs(t - s) > 1.0)
        throw std::invalid_argument("check_pair_estimates: |t - s| must not exceed 1");
    auto tr0 = trajectory(p, z0, s, t, dt);
    auto tr1 = trajectory(p, z1, s, t, dt);
    PairEstimates out;
    out.m2 = m2 ? *m2 : m2_around(p, {&tr0, &tr1});
    double e = std::exp(out.m2);
    double tau = std::abs(t - s);
    double dx = std::abs(z0.x - z1.x), dxi = std::abs(z0.xi - z1.xi);
    PhasePoint a = tr0.points.back(), b = tr1.points.back();

    auto judge = [](double lhs, double rhs) {
        return InequalityCheck{lhs, rhs, lhs <= rhs + 1e-9 * (1.0 + rhs)};
    };
    out.position = judge(std::abs(a.x - b.x), (dx + tau * dxi) * e);
    out.momentum_drift =
        judge(std::abs((a.xi - b.xi) - (z0.xi - z1.xi)), (tau * dx + tau * tau * dxi) * out.m2 * e);
    out.position_remainder = judge(std::abs((a.x - b.x) - (z0.x - z1.x) - (t - s) * (z0.xi - z1.xi)),
                                   (tau * tau * dx + tau * tau * tau * dxi) * e);
    return out;
}

double collision_delta(double m2) {
    auto g = [m2](double d) { return std::exp(m2) * (d * d + d * d * d); };
    if (g(1.0) <= 0.01)
        return 1.0;
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        (g(mid) <= 0.01 ? lo : hi) = mid;
    }
    return lo;
}

CollisionReport collision_window(const Potential& p, PhasePoint z0, PhasePoint z1, double s, double r, double c,
                                 double dt) {
    if (!(r > 0.0) || !(c >= 2.0))
        throw std::invalid_argument("collision_window: need r > 0 and C >= 2");
    if (std::abs(z0.x - z1.x) > r)
        throw std::invalid_argument("collision_window: initial separation exceeds r");

    CollisionReport rep;
    {
        auto fw0 = trajectory(p, z0, s, s + 1.0, 1e-3), fw1 = trajectory(p, z1, s, s + 1.0, 1e-3);
        auto bw0 = trajectory(p, z0, s, s - 1.0, 1e-3), bw1 = trajectory(p, z1, s, s - 1.0, 1e-3);
        rep.m2 = m2_around(p, {&fw0, &fw1, &bw0, &bw1});
    }
    bool flat = rep.m2 <= 1e-14;
    rep.delta_used = flat ? 1.0 : collision_delta(rep.m2);
    double step = std::min(dt, rep.delta_used / 1000.0);
    auto fw0 = trajectory(p, z0, s, s + rep.delta_used, step), fw1 = trajectory(p, z1, s, s + rep.delta_used, step);
    auto bw0 = trajectory(p, z0, s, s - rep.delta_used, step), bw1 = trajectory(p, z1, s, s - rep.delta_used, step);

    double rel = std::abs(z0.xi - z1.xi);
    rep.zero_relative_velocity = rel == 0.0;
    rep.window = rep.zero_relative_velocity ? rep.delta_used : 2.0 * c * r / rel;
    rep.drift_bound = std::min(rep.delta_used, rep.window) * c * r * rep.m2 * std::exp(rep.m2);

    const double slack = 1e-9;
    auto scan = [&](const Trajectory& a, const Trajectory& b) {
        bool inside = true;
        for (std::size_t i = 0; i < a.times.size(); ++i) {
            double tau = std::abs(a.times[i] - s);
            if (tau > rep.delta_used + 1e-12)
                break;
            ++rep.samples;
            double sep = std::abs(a.points[i].x - b.points[i].x);
            if (!rep.zero_relative_velocity && tau >= rep.window) {
                rep.min_outside_separation = std::min(rep.min_outside_separation, sep);
                if (sep < c * r - slack)
                    rep.separation_ok = false;
            }
            if (inside && sep > c * r)
                inside = false;
            if (inside) {
                double drift = std::abs((a.points[i].xi - b.points[i].xi) - (z0.xi - z1.xi));
                rep.max_drift = std::max(rep.max_drift, drift);
                if (drift > rep.drift_bound + slack * (1.0 + rep.drift_bound))
                    rep.drift_ok = false;
            }
        }
    };
    scan(fw0, fw1);
    scan(bw0, bw1);
    rep.satisfied = rep.separation_ok && rep.drift_ok;
    return rep;
}

CubeContainment cube_containment(const Potential& p, PhasePoint z0ref, PhasePoint z, double t_center, double eta,
                                 double r, int samples, double dt) {
    if (!(r >= 1.0))
        throw std::invalid_argument("cube_containment: r must be at least 1");
    if (samples < 200)
        throw std::invalid_argument("cube_containment: at least 200 samples");
    CubeContainment out;
    out.window = eta == 0.0 ? 1.0 : std::min(1.0 / std::abs(eta), 1.0);

    PhasePoint a = flow(p, z0ref, 0.0, t_center - out.window, dt);
    PhasePoint b = flow(p, z, 0.0, t_center - out.window, dt);
    double tprev = t_center - out.window;
    double xlo = std::min(a.x, b.x), xhi = std::max(a.x, b.x);
    for (int i = 0; i < samples; ++i) {
        double t = t_center - out.window + 2.0 * out.window * i / (samples - 1);
        a = flow(p, a, tprev, t, dt);
        b = flow(p, b, tprev, t, dt);
        tprev = t;
        xlo = std::min({xlo, a.x, b.x});
        xhi = std::max({xhi, a.x, b.x});
        double ddx = b.x - a.x, ddxi = b.xi - a.xi - r * eta;
        if (!out.entered && std::abs(ddx) <= r && std::abs(ddxi) <= r) {
            out.entered = true;
            out.entry_time = t;
        }
    }
    out.m2 = curvature_bound(p, xlo - 1.0, xhi + 1.0, t_center - out.window, t_center + out.window);
    if (!out.entered)
        return out;
    PhasePoint ac = flow(p, z0ref, 0.0, t_center, dt);
    PhasePoint bc = flow(p, z, 0.0, t_center, dt);
    out.c_required = std::max({1.0, std::abs(bc.x - ac.x) / r, std::abs(bc.xi - ac.xi - r * eta) / r});
    return out;
}

} // namespace wpk
