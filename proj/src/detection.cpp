#include "wpk/concentration.hpp"

#include "wpk/parallel.hpp"
#include "wpk/phase_space.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

namespace wpk {
namespace {

constexpr cplx kI{0.0, 1.0};

struct Candidate {
    double abs = -1.0;
    cplx tu{};
    double lambda = 1.0, t = 0.0, x0 = 0.0, xi0 = 0.0;
    double cell_dx = 0.0, cell_dxi = 0.0;
};

// larger |Tu| first, then smaller |t|, lambda, |x0|, |xi0|
bool better(const Candidate& a, const Candidate& b) {
    if (a.abs != b.abs)
        return a.abs > b.abs;
    if (std::abs(a.t) != std::abs(b.t))
        return std::abs(a.t) < std::abs(b.t);
    if (a.lambda != b.lambda)
        return a.lambda < b.lambda;
    if (std::abs(a.x0) != std::abs(b.x0))
        return std::abs(a.x0) < std::abs(b.x0);
    if (std::abs(a.xi0) != std::abs(b.xi0))
        return std::abs(a.xi0) < std::abs(b.xi0);
    if (a.t != b.t)
        return a.t < b.t;
    if (a.x0 != b.x0)
        return a.x0 < b.x0;
    return a.xi0 < b.xi0;
}

struct Extent {
    bool empty = true;
    double x_lo = 0, x_hi = 0, k_lo = 0, k_hi = 0;
};

Extent mass_extent(const ComplexField& u) {
    const Grid1D& g = u.grid();
    const std::size_t n = g.n();
    auto v = u.values();
    Extent e;
    double total = 0.0;
    for (auto c : v)
        total += std::norm(c);
    if (total == 0.0)
        return e;
    e.empty = false;
    double tail = 0.5e-10 * total;
    auto range = [&](const std::vector<double>& w, std::size_t& lo, std::size_t& hi) {
        double acc = 0.0;
        lo = 0;
        while (lo + 1 < w.size() && acc + w[lo] <= tail)
            acc += w[lo++];
        acc = 0.0;
        hi = w.size() - 1;
        while (hi > lo && acc + w[hi] <= tail)
            acc += w[hi--];
    };
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i)
        w[i] = std::norm(v[i]);
    std::size_t lo, hi;
    range(w, lo, hi);
    e.x_lo = g.x(lo);
    e.x_hi = g.x(hi);

    auto power = spectrum(u);
    // ascending wavenumber: bins n/2..n-1 then 0..n/2-1
    for (std::size_t i = 0; i < n; ++i)
        w[i] = std::norm(power[(i + n / 2) % n]);
    range(w, lo, hi);
    e.k_lo = g.wavenumber((lo + n / 2) % n);
    e.k_hi = g.wavenumber((hi + n / 2) % n);
    return e;
}

PhaseGrid search_grid(const Grid1D& g, const Extent& e, double lambda) {
    const double dx = g.dx();
    const auto n = static_cast<long long>(g.n());
    std::size_t stride = std::max<long long>(1, std::llround(lambda / (4.0 * dx)));
    long long i_lo = static_cast<long long>(std::floor((e.x_lo - 4.0 * lambda - g.x_min()) / dx));
    long long i_hi = static_cast<long long>(std::ceil((e.x_hi + 4.0 * lambda - g.x_min()) / dx));
    i_lo = std::clamp<long long>(i_lo, 0, n - 1);
    i_hi = std::clamp<long long>(i_hi, 0, n - 1);
    long long s = static_cast<long long>(stride);
    long long start = (i_lo / s) * s;

    Window w(lambda);
    std::size_t h = static_cast<std::size_t>(w.half_width(dx));
    std::size_t p = 1;
    while (p < 2 * h + 1 || static_cast<double>(p) < 8.0 * std::numbers::pi * lambda / dx)
        p *= 2;
    double dxi = 2.0 * std::numbers::pi / (static_cast<double>(p) * dx);
    long long j_lo = static_cast<long long>(std::floor((e.k_lo - 4.0 / lambda) / dxi));
    long long j_hi = static_cast<long long>(std::ceil((e.k_hi + 4.0 / lambda) / dxi));
    if (j_hi - j_lo + 1 > static_cast<long long>(p)) {
        j_lo = -static_cast<long long>(p / 2);
        j_hi = j_lo + static_cast<long long>(p) - 1;
    }

    PhaseGrid pg{g};
    pg.row_start = static_cast<std::size_t>(start);
    pg.row_stride = stride;
    pg.nx = static_cast<std::size_t>((i_hi - start) / s + 1);
    pg.dxi = dxi;
    pg.xi_start = static_cast<double>(j_lo) * dxi;
    pg.nxi = static_cast<std::size_t>(j_hi - j_lo + 1);
    return pg;
}

// <pi(z) S_lambda psi, u> over the window support
cplx local_correlation(std::span<const cplx> u, const Grid1D& g, double lambda, PhasePoint z) {
    Window w(lambda);
    double reach = 10.0 * lambda;
    long long n = static_cast<long long>(g.n());
    long long a = std::max<long long>(0, static_cast<long long>(std::floor((z.x - reach - g.x_min()) / g.dx())));
    long long b = std::min<long long>(n - 1, static_cast<long long>(std::ceil((z.x + reach - g.x_min()) / g.dx())));
    cplx s = 0.0;
    for (long long k = a; k <= b; ++k) {
        double y = g.x(static_cast<std::size_t>(k)) - z.x;
        s += w(y) * std::exp(kI * (y * z.xi)) * std::conj(u[static_cast<std::size_t>(k)]);
    }
    return s * g.dx();
}

template <class Fn>
double golden_max(double lo, double hi, double at, double value, Fn&& fn, double& best_arg) {
    // keeps the incoming point unless something strictly better is found
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    best_arg = at;
    double best = value;
    double a = lo, b = hi;
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = fn(c), fd = fn(d);
    for (int it = 0; it < 30; ++it) {
        if (fc > best) {
            best = fc;
            best_arg = c;
        }
        if (fd > best) {
            best = fd;
            best_arg = d;
        }
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = fn(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = fn(d);
        }
    }
    if (fc > best) {
        best = fc;
        best_arg = c;
    }
    if (fd > best) {
        best = fd;
        best_arg = d;
    }
    return best;
}

} // namespace

std::vector<double> default_lambda_ladder(const Grid1D& grid) {
    std::vector<double> out;
    for (int j = 0; j <= 8; ++j) {
        double l = std::ldexp(1.0, -j);
        if (l >= 2.5 * grid.dx())
            out.push_back(l);
    }
    return out;
}

cplx bubble_correlation(const Potential& p, const ComplexField& f, double lambda, double t, PhasePoint z,
                        const EvolveParams& params) {
    auto u = evolve(p, f, 0.0, t, params);
    return local_correlation(u.values(), u.grid(), lambda, z);
}

Bubble detect_bubble(const Potential& p, const ComplexField& f, const SearchParams& params) {
    if (!(params.delta0 > 0.0) || params.delta0 > 10.0)
        throw std::invalid_argument("detect_bubble: delta0 must lie in (0, 10]");
    const Grid1D& g = f.grid();
    auto ladder = params.lambda_ladder.empty() ? default_lambda_ladder(g) : params.lambda_ladder;
    if (ladder.empty())
        throw std::invalid_argument("detect_bubble: grid too coarse for any scale");
    for (double l : ladder)
        if (!(l > 0.0) || l > 1.0)
            throw std::invalid_argument("detect_bubble: scales must lie in (0, 1]");

    Bubble out;
    if (lp_norm(f, 2.0) == 0.0)
        return out;

    double stride = params.t_stride > 0.0 ? params.t_stride : params.delta0 / 64.0;
    int k_slices = std::max(1, static_cast<int>(std::lround(params.delta0 / stride)));
    double ts = params.delta0 / k_slices;
    int m = std::max(1, static_cast<int>(std::ceil(ts / params.evolve.dt * (1.0 - 1e-12))));
    EvolveParams ep{ts / m, m};

    std::vector<double> times(2 * k_slices + 1);
    std::vector<std::optional<ComplexField>> slices(times.size());
    for (int dir : {1, -1}) {
        evolve_observe(p, f, 0.0, dir * params.delta0, ep, [&](int step, double t, std::span<const cplx> u) {
            int k = k_slices + dir * (step / m);
            times[k] = t;
            slices[k].emplace(g, std::vector<cplx>(u.begin(), u.end()));
        });
    }
    std::vector<Extent> extents(times.size());
    for (std::size_t k = 0; k < times.size(); ++k)
        extents[k] = mass_extent(*slices[k]);

    struct Task {
        double lambda;
        std::size_t slice;
        PhaseGrid grid;
    };
    std::vector<Task> tasks;
    std::size_t used = 0;
    for (double l : ladder) {
        if (out.budget_exceeded)
            break;
        for (std::size_t k = 0; k < times.size(); ++k) {
            if (extents[k].empty)
                continue;
            auto pg = search_grid(g, extents[k], l);
            std::size_t cost = pg.nx * pg.nxi;
            if (params.max_evals && used + cost > params.max_evals) {
                // spend what is left on the leading rows of this grid
                std::size_t rows = (params.max_evals - used) / pg.nxi;
                if (rows > 0) {
                    pg.nx = rows;
                    used += rows * pg.nxi;
                    tasks.push_back({l, k, pg});
                }
                out.budget_exceeded = true;
                break;
            }
            used += cost;
            tasks.push_back({l, k, pg});
        }
    }
    out.evaluations = used;
    if (tasks.empty())
        return out;

    auto results = parallel_map<Candidate>(tasks.size(), [&](std::size_t i) {
        const Task& task = tasks[i];
        auto coefs = analyze_unchecked(*slices[task.slice], Window(task.lambda), task.grid);
        Candidate best;
        for (std::size_t a = 0; a < task.grid.nx; ++a)
            for (std::size_t b = 0; b < task.grid.nxi; ++b) {
                Candidate c;
                c.tu = coefs.at(a, b);
                c.abs = std::abs(c.tu);
                c.lambda = task.lambda;
                c.t = times[task.slice];
                c.x0 = task.grid.x_center(a);
                c.xi0 = task.grid.xi_center(b);
                c.cell_dx = static_cast<double>(task.grid.row_stride) * g.dx();
                c.cell_dxi = task.grid.dxi;
                if (best.abs < 0.0 || better(c, best))
                    best = c;
            }
        return best;
    });
    Candidate best = results.front();
    for (const auto& c : results)
        if (better(c, best))
            best = c;

    out.lambda = best.lambda;
    out.t0 = best.t;
    out.x0 = best.x0;
    out.xi0 = best.xi0;
    out.cell_dx = best.cell_dx;
    out.cell_dxi = best.cell_dxi;
    out.correlation = std::conj(best.tu);
    out.abs_correlation = best.abs;
    if (out.budget_exceeded || best.abs == 0.0)
        return out;

    // refinement around the coarse optimum
    double lam_min = *std::min_element(ladder.begin(), ladder.end()) / 2.0;
    double cached_t = kInfinity;
    std::vector<cplx> cached_u;
    auto field_at = [&](double t) -> std::span<const cplx> {
        if (t != cached_t) {
            auto k = static_cast<std::size_t>(std::clamp<long long>(std::lround(t / ts) + k_slices, 0,
                                                                    static_cast<long long>(times.size()) - 1));
            auto u = evolve(p, *slices[k], times[k], t, params.evolve);
            cached_u.assign(u.values().begin(), u.values().end());
            cached_t = t;
        }
        return cached_u;
    };
    double lam = out.lambda, t = out.t0;
    PhasePoint z{out.x0, out.xi0};
    double value = std::abs(local_correlation(field_at(t), g, lam, z));
    for (int pass = 0; pass < params.refine_passes; ++pass) {
        double sx = out.cell_dx / std::pow(5.0, pass + 1), sxi = out.cell_dxi / std::pow(5.0, pass + 1);
        auto u = field_at(t);
        PhasePoint centre = z;
        for (int a = -5; a <= 5; ++a)
            for (int b = -5; b <= 5; ++b) {
                PhasePoint c{centre.x + a * sx, centre.xi + b * sxi};
                double v = std::abs(local_correlation(u, g, lam, c));
                if (v > value) {
                    value = v;
                    z = c;
                }
            }

        double width = std::pow(2.0, 1.0 / std::pow(2.0, pass));
        double lo = std::log(std::max(lam / width, lam_min)), hi = std::log(std::min(lam * width, 1.0));
        if (hi > lo) {
            double arg;
            value = golden_max(
                lo, hi, std::log(lam), value,
                [&](double ll) { return std::abs(local_correlation(u, g, std::exp(ll), z)); }, arg);
            lam = std::exp(arg);
        }

        double span = ts / std::pow(2.0, pass);
        for (int shift = 0; shift < 8; ++shift) {
            double tlo = std::max(-params.delta0, t - span), thi = std::min(params.delta0, t + span);
            if (thi <= tlo)
                break;
            double arg;
            // move z along its classical trajectory while t varies
            auto carried = [&](double tt) { return tt == t ? z : flow(p, z, t, tt, 1e-4); };
            value = golden_max(
                tlo, thi, t, value,
                [&](double tt) { return std::abs(local_correlation(field_at(tt), g, lam, carried(tt))); }, arg);
            z = carried(arg);
            t = arg;
            // re-bracket when the maximum sits on an interior edge
            double edge = 1e-3 * span;
            bool low_edge = t - tlo < edge && tlo > -params.delta0;
            bool high_edge = thi - t < edge && thi < params.delta0;
            if (!low_edge && !high_edge)
                break;
        }
    }
    // ties along a classical orbit resolve to the smallest |t0|
    if (t != 0.0 && params.delta0 > 0.0) {
        PhasePoint z0 = flow(p, z, t, 0.0, 1e-4);
        double v0 = std::abs(local_correlation(field_at(0.0), g, lam, z0));
        if (v0 >= value * (1.0 - kDetectionTieTolerance)) {
            value = v0;
            z = z0;
            t = 0.0;
        }
    }
    out.lambda = lam;
    out.t0 = t;
    out.x0 = z.x;
    out.xi0 = z.xi;
    out.correlation = local_correlation(field_at(t), g, lam, z);
    out.abs_correlation = std::abs(out.correlation);
    return out;
}

Extraction extract_profile(const Potential& p, const ComplexField& f, const Bubble& b, const EvolveParams& params) {
    const Grid1D& g = f.grid();
    auto psi = Window(1.0).generator(g);
    if (b.abs_correlation == 0.0) {
        Extraction e{ComplexField::zeros(g), ComplexField::zeros(g), f, 0.0};
        return e;
    }
    auto u0 = evolve(p, f, 0.0, b.t0, params);
    auto w = packet(g, {b.x0, b.xi0}, b.lambda);
    cplx c = inner_product(u0, w) / mass(w);
    auto gfield = evolve(p, c * w, b.t0, 0.0, params);
    auto rem = f - gfield;
    double res = mass(f) - mass(rem) - mass(gfield);
    return Extraction{c * psi, std::move(gfield), std::move(rem), res};
}

ProfileDecomposition iterate_decomposition(const Potential& p, const ComplexField& f, const DecomposeParams& params) {
    if (params.max_bubbles < 1)
        throw std::invalid_argument("iterate_decomposition: max_bubbles must be at least 1");
    ProfileDecomposition d;
    d.initial_mass = mass(f);
    double threshold = params.stop_threshold >= 0.0
                           ? params.stop_threshold
                           : 0.01 * std::sqrt(d.initial_mass) / std::sqrt(2.0 * std::numbers::pi);
    ComplexField r = f;
    double g_total = 0.0;
    for (int j = 0; j < params.max_bubbles; ++j) {
        Bubble b = detect_bubble(p, r, params.search);
        if (b.budget_exceeded)
            d.budget_exceeded = true;
        if (b.abs_correlation < threshold || b.abs_correlation == 0.0)
            break;
        auto ex = extract_profile(p, r, b, params.search.evolve);
        d.bubbles.push_back(b);
        d.profiles.push_back(ex.profile);
        double gm = mass(ex.g);
        g_total += gm;
        d.g_mass.push_back(gm);
        d.remainders_mass.push_back(mass(ex.remainder));
        d.decoupling_residuals.push_back(ex.decoupling_residual);
        r = std::move(ex.remainder);
        if (b.budget_exceeded)
            break;
    }
    d.ledger_residual = d.initial_mass > 0.0 ? (d.initial_mass - g_total - mass(r)) / d.initial_mass : 0.0;
    return d;
}

} // namespace wpk
