#include "wpk/propagator.hpp"

#include "wpk/fft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wpk {

void EvolveParams::validate() const {
    if (!(dt > 0.0) || !(dt <= 1e-2))
        throw std::invalid_argument("evolve: dt must lie in (0, 1e-2]");
    if (record_stride < 1)
        throw std::invalid_argument("evolve: record_stride must be at least 1");
}

double kinetic_phase_per_step(const Grid1D& grid, double dt) {
    double k = grid.max_wavenumber();
    return 0.5 * k * k * dt;
}

bool is_underresolved(const Grid1D& grid, double dt) { return kinetic_phase_per_step(grid, dt) > std::numbers::pi; }

namespace {

constexpr cplx kI{0.0, 1.0};

int step_count(double t0, double t1, double dt) {
    if (!std::isfinite(t0) || !std::isfinite(t1) || std::abs(t1 - t0) > 10.0)
        throw std::invalid_argument("evolve: |t1 - t0| must not exceed 10");
    double span = std::abs(t1 - t0);
    if (span == 0.0)
        return 0;
    return std::max(1, static_cast<int>(std::ceil(span / dt * (1.0 - 1e-12))));
}

std::vector<cplx> run(const Potential& p, const ComplexField& f, double t0, double t1, const EvolveParams& prm,
                      const EvolveObserver* obs) {
    prm.validate();
    const int steps = step_count(t0, t1, prm.dt);
    const Grid1D& g = f.grid();
    const std::size_t n = g.n();
    std::vector<cplx> u(f.values().begin(), f.values().end());
    if (obs)
        (*obs)(0, t0, u);
    if (steps == 0)
        return u;

    const double h = (t1 - t0) / steps;
    const double inv_n = 1.0 / static_cast<double>(n);
    std::vector<double> k2(n);
    for (std::size_t j = 0; j < n; ++j) {
        double k = g.wavenumber(j);
        k2[j] = k * k;
    }
    auto observe_at = [&](int i) { return obs && (i % prm.record_stride == 0 || i == steps); };

    std::vector<cplx> uh = u;
    fft_forward(uh);

    if (p.is_zero()) {
        // exact multiplier from t0 at every requested time
        std::vector<cplx> tmp(n);
        auto at = [&](int i) {
            double tau = i == steps ? t1 - t0 : i * h;
            for (std::size_t j = 0; j < n; ++j)
                tmp[j] = uh[j] * std::exp(-kI * (0.5 * tau * k2[j])) * inv_n;
            fft_backward(tmp);
        };
        for (int i = 1; i < steps; ++i)
            if (observe_at(i)) {
                at(i);
                (*obs)(i, t0 + i * h, tmp);
            }
        at(steps);
        if (obs)
            (*obs)(steps, t1, tmp);
        return tmp;
    }

    std::vector<cplx> khalf(n), kfull(n);
    for (std::size_t j = 0; j < n; ++j) {
        khalf[j] = std::exp(-kI * (0.25 * h * k2[j]));
        kfull[j] = std::exp(-kI * (0.5 * h * k2[j]));
    }
    std::vector<cplx> vphase(n);
    auto fill_phase = [&](double tm) {
        for (std::size_t j = 0; j < n; ++j)
            vphase[j] = std::exp(-kI * (h * p.value(tm, g.x(j))));
    };
    if (!p.time_dependent())
        fill_phase(t0);

    std::vector<cplx> tmp(n);
    auto finish = [&]() {
        for (std::size_t j = 0; j < n; ++j)
            tmp[j] = uh[j] * khalf[j] * inv_n;
        fft_backward(tmp);
    };
    for (int i = 0; i < steps; ++i) {
        const auto& mult = i == 0 ? khalf : kfull;
        for (std::size_t j = 0; j < n; ++j)
            uh[j] *= mult[j] * inv_n;
        fft_backward(uh);
        if (p.time_dependent())
            fill_phase(t0 + (i + 0.5) * h);
        for (std::size_t j = 0; j < n; ++j)
            uh[j] *= vphase[j];
        fft_forward(uh);
        int done = i + 1;
        if (done < steps && observe_at(done)) {
            finish();
            (*obs)(done, t0 + done * h, tmp);
        }
    }
    finish();
    if (obs)
        (*obs)(steps, t1, tmp);
    return tmp;
}

double span_lp(std::span<const cplx> u, double dx, double r) {
    if (std::isinf(r)) {
        double m = 0.0;
        for (auto v : u)
            m = std::max(m, std::abs(v));
        return m;
    }
    double s = 0.0;
    for (auto v : u)
        s += std::pow(std::abs(v), r);
    return std::pow(s * dx, 1.0 / r);
}

} // namespace

ComplexField evolve(const Potential& p, const ComplexField& f, double t0, double t1, const EvolveParams& params) {
    return ComplexField(f.grid(), run(p, f, t0, t1, params, nullptr));
}

ComplexField evolve_observe(const Potential& p, const ComplexField& f, double t0, double t1,
                            const EvolveParams& params, const EvolveObserver& observer) {
    return ComplexField(f.grid(), run(p, f, t0, t1, params, &observer));
}

SpacetimeField evolve_record(const Potential& p, const ComplexField& f, double t0, double t1,
                             const EvolveParams& params) {
    if (t1 == t0)
        throw std::invalid_argument("evolve_record: empty time interval");
    std::vector<double> times;
    std::vector<ComplexField> slices;
    EvolveObserver obs = [&](int, double t, std::span<const cplx> u) {
        times.push_back(t);
        slices.emplace_back(f.grid(), std::vector<cplx>(u.begin(), u.end()));
    };
    run(p, f, t0, t1, params, &obs);
    if (t1 < t0) {
        std::reverse(times.begin(), times.end());
        std::reverse(slices.begin(), slices.end());
    }
    return SpacetimeField(std::move(times), std::move(slices));
}

DispersiveReport dispersive_probe(const Potential& p, const std::vector<double>& t_list, double w,
                                  const EvolveParams& params, std::optional<Grid1D> grid) {
    if (t_list.empty())
        throw std::invalid_argument("dispersive_probe: no times");
    if (!(w > 0.0))
        throw std::invalid_argument("dispersive_probe: width must be positive");
    std::vector<double> ts = t_list;
    std::sort(ts.begin(), ts.end());
    if (!(ts.front() > 0.0))
        throw std::invalid_argument("dispersive_probe: times must be positive");

    auto choose_grid = [&](double width) {
        double sigma = std::sqrt(width * width + ts.back() * ts.back() / (width * width));
        double half = 8.0 * sigma + 1.0;
        double target = width / 5.0;
        std::size_t n = 8;
        while (static_cast<double>(n) * target < 2.0 * half)
            n *= 2;
        if (n > (std::size_t{1} << 22))
            throw std::invalid_argument("dispersive_probe: source too narrow for the time range");
        return Grid1D::centered(n, half);
    };
    auto measure = [&](double width, const Grid1D& gr) {
        if (width < 4.0 * gr.dx())
            throw std::invalid_argument("dispersive_probe: source underresolved (w < 4 dx)");
        double c = 1.0 / (width * std::sqrt(2.0 * std::numbers::pi));
        auto u = ComplexField::sample(gr, [&](double x) { return cplx(c * std::exp(-0.5 * x * x / (width * width))); });
        double l1 = lp_norm(u, 1.0);
        std::vector<double> est;
        double tprev = 0.0;
        for (double t : ts) {
            u = evolve(p, u, tprev, t, params);
            tprev = t;
            est.push_back(lp_norm(u, kInfinity) / l1);
        }
        return est;
    };

    DispersiveReport rep;
    rep.width = w;
    rep.times = ts;
    Grid1D g1 = grid ? *grid : choose_grid(w);
    rep.grid_n = g1.n();
    rep.operator_norm_estimates = measure(w, g1);
    Grid1D g2 = grid ? *grid : choose_grid(0.5 * w);
    if (grid && 0.5 * w < 4.0 * g2.dx())
        g2 = choose_grid(0.5 * w);
    rep.refined_grid_n = g2.n();
    rep.refined_estimates = measure(0.5 * w, g2);

    if (ts.size() >= 2) {
        double mx = 0, my = 0, m = static_cast<double>(ts.size());
        for (std::size_t i = 0; i < ts.size(); ++i) {
            mx += std::log(ts[i]);
            my += std::log(rep.operator_norm_estimates[i]);
        }
        mx /= m;
        my /= m;
        double sxy = 0, sxx = 0;
        for (std::size_t i = 0; i < ts.size(); ++i) {
            double dx = std::log(ts[i]) - mx;
            sxy += dx * (std::log(rep.operator_norm_estimates[i]) - my);
            sxx += dx * dx;
        }
        rep.fitted_exponent = sxy / sxx;
    }
    return rep;
}

bool is_admissible(double q, double r) { return q >= 2.0 && r >= 1.0 && std::abs(2.0 / q + 1.0 / r - 0.5) < 1e-12; }

StrichartzResult strichartz_check(const Potential& p, const ComplexField& f, double t_lo, double t_hi, double q,
                                  double r, const EvolveParams& params) {
    if (!(q >= 1.0) || !(r >= 1.0))
        throw std::invalid_argument("strichartz_check: q, r must be at least 1");
    if (!(t_hi > t_lo))
        throw std::invalid_argument("strichartz_check: empty interval");
    StrichartzResult res;
    res.admissible = is_admissible(q, r);
    double f2 = lp_norm(f, 2.0);
    if (f2 == 0.0)
        return res;

    auto chunks = [](double a, double b) {
        std::vector<double> pts{a};
        int m = static_cast<int>(std::ceil(std::abs(b - a) / 10.0));
        for (int i = 1; i <= m; ++i)
            pts.push_back(i == m ? b : a + (b - a) * i / m);
        return pts;
    };
    ComplexField u = f;
    auto lead = chunks(0.0, t_lo);
    for (std::size_t i = 1; i < lead.size(); ++i)
        u = evolve(p, u, lead[i - 1], lead[i], params);

    std::vector<double> times, norms;
    const double dx = f.grid().dx();
    auto body = chunks(t_lo, t_hi);
    for (std::size_t i = 1; i < body.size(); ++i) {
        bool first = i == 1;
        u = evolve_observe(p, u, body[i - 1], body[i], params, [&](int step, double t, std::span<const cplx> s) {
            if (step == 0 && !first)
                return;
            times.push_back(t);
            norms.push_back(span_lp(s, dx, r));
        });
    }
    res.norm = mixed_norm_from_samples(times, norms, q);
    res.ratio = res.norm / f2;
    return res;
}

} // namespace wpk
