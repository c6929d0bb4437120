#include "wpk/phase_space.hpp"

#include "wpk/fft.hpp"
#include "wpk/field_io.hpp"
#include "wpk/parallel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <cstring>
#include <fstream>
#include <memory>
#include <stdexcept>

namespace wpk {
namespace {

constexpr cplx kI{0.0, 1.0};

std::size_t wrap(long long k, std::size_t n) {
    long long m = k % static_cast<long long>(n);
    return static_cast<std::size_t>(m < 0 ? m + static_cast<long long>(n) : m);
}

} // namespace

Window::Window(double lambda) : lambda_(lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("window: scale must be positive");
}

double Window::amplitude() { return 1.0 / (std::sqrt(2.0 * std::numbers::pi) * std::pow(std::numbers::pi, 0.25)); }

double Window::operator()(double x) const {
    double y = x / lambda_;
    return amplitude() * std::exp(-0.5 * y * y) / std::sqrt(lambda_);
}

ComplexField Window::generator(const Grid1D& grid) const {
    return ComplexField::sample(grid, [&](double x) { return cplx((*this)(x)); });
}

int Window::half_width(double dx) const { return static_cast<int>(std::ceil(9.5 * lambda_ / dx)); }

ComplexField packet(const Grid1D& grid, PhasePoint z, double lambda) {
    Window w(lambda);
    return ComplexField::sample(grid, [&](double x) { return w(x - z.x) * std::exp(kI * ((x - z.x) * z.xi)); });
}

std::vector<double> PhaseGrid::x_centers() const {
    std::vector<double> out(nx);
    for (std::size_t i = 0; i < nx; ++i)
        out[i] = x_center(i);
    return out;
}

std::vector<double> PhaseGrid::xi_centers() const {
    std::vector<double> out(nxi);
    for (std::size_t j = 0; j < nxi; ++j)
        out[j] = xi_center(j);
    return out;
}

PhaseGrid PhaseGrid::covering(const Grid1D& space, double lambda) {
    Window w(lambda);
    double dx = space.dx();
    std::size_t stride = 1;
    while (static_cast<double>(2 * stride) * dx <= lambda / 5.0 && 2 * stride <= space.n())
        stride *= 2;
    std::size_t h = static_cast<std::size_t>(w.half_width(dx));
    std::size_t p = 1;
    while (p < 2 * h + 1 || static_cast<double>(p) < 10.0 * lambda / dx)
        p *= 2;
    PhaseGrid g{space};
    g.row_start = 0;
    g.row_stride = stride;
    g.nx = space.n() / stride;
    g.dxi = 2.0 * std::numbers::pi / (static_cast<double>(p) * dx);
    g.xi_start = -std::numbers::pi / dx;
    g.nxi = p;
    return g;
}

double WavepacketCoefs::l2_norm() const {
    double s = 0.0;
    for (auto v : values)
        s += std::norm(v);
    return std::sqrt(s * grid.cell_area());
}

void WavepacketCoefs::write_csv(std::ostream& os) const {
    os << "x0,xi0,re,im,abs\n";
    os.precision(17);
    for (std::size_t i = 0; i < grid.nx; ++i)
        for (std::size_t j = 0; j < grid.nxi; ++j) {
            cplx v = at(i, j);
            os << grid.x_center(i) << ',' << grid.xi_center(j) << ',' << v.real() << ',' << v.imag() << ','
               << std::abs(v) << '\n';
        }
}

namespace {

struct Engine {
    std::size_t n;
    double dx;
    int h;
    std::size_t p; // FFT length, 0 when the direct sum is needed
    std::vector<double> wv; // window at m*dx, m = -h..h

    Engine(const Window& w, const PhaseGrid& g) : n(g.space.n()), dx(g.space.dx()), h(w.half_width(dx)), p(0) {
        if (g.nx == 0 || g.nxi == 0 || !(g.dxi > 0.0))
            throw std::invalid_argument("phase grid must be nonempty with positive dxi");
        if (static_cast<std::size_t>(2 * h + 1) > n)
            throw std::invalid_argument("window wider than the spatial box");
        if (g.row_start + (g.nx - 1) * g.row_stride >= n)
            throw std::invalid_argument("phase grid rows outside the spatial grid");
        double ratio = 2.0 * std::numbers::pi / (dx * g.dxi);
        double pr = std::round(ratio);
        if (std::abs(ratio - pr) <= 1e-9 * ratio && pr >= 2 * h + 1 && g.nxi <= static_cast<std::size_t>(pr))
            p = static_cast<std::size_t>(pr);
        wv.resize(2 * h + 1);
        for (int m = -h; m <= h; ++m)
            wv[m + h] = w(m * dx);
    }
};

} // namespace

WavepacketCoefs analyze_unchecked(const ComplexField& f, const Window& w, const PhaseGrid& g) {
    if (!(f.grid() == g.space))
        throw std::invalid_argument("analyze: field and phase grid disagree");
    Engine e(w, g);
    const int h = e.h;
    std::vector<cplx> mod(2 * h + 1);
    for (int m = -h; m <= h; ++m)
        mod[m + h] = e.wv[m + h] * std::exp(-kI * (m * e.dx * g.xi_start)) * e.dx;
    auto vals = f.values();
    WavepacketCoefs out{g, std::vector<cplx>(g.nx * g.nxi)};
    parallel_for(g.nx, [&](std::size_t i) {
        long long c = static_cast<long long>(g.row_start + i * g.row_stride);
        cplx* row = out.values.data() + i * g.nxi;
        if (e.p) {
            std::vector<cplx> buf(e.p);
            for (int m = -h; m <= h; ++m)
                buf[wrap(m, e.p)] += vals[wrap(c + m, e.n)] * mod[m + h];
            fft_forward(buf);
            std::copy_n(buf.begin(), g.nxi, row);
        } else {
            for (std::size_t j = 0; j < g.nxi; ++j) {
                double step = e.dx * g.dxi * static_cast<double>(j);
                cplx s = 0.0;
                for (int m = -h; m <= h; ++m)
                    s += vals[wrap(c + m, e.n)] * mod[m + h] * std::exp(-kI * (m * step));
                row[j] = s;
            }
        }
    });
    return out;
}

WavepacketCoefs analyze(const ComplexField& f, const Window& w, const PhaseGrid& g) {
    double dx0 = static_cast<double>(g.row_stride) * g.space.dx();
    if (dx0 > w.scale() / 5.0 * (1 + 1e-12))
        throw std::invalid_argument("analyze: row spacing exceeds lambda/5");
    if (g.dxi > std::numbers::pi / (5.0 * w.scale()) * (1 + 1e-12))
        throw std::invalid_argument("analyze: frequency spacing exceeds pi/(5 lambda)");
    return analyze_unchecked(f, w, g);
}

ComplexField synthesize(const WavepacketCoefs& coefs, const Window& w) {
    const PhaseGrid& g = coefs.grid;
    if (coefs.values.size() != g.nx * g.nxi)
        throw std::invalid_argument("synthesize: coefficient shape mismatch");
    Engine e(w, g);
    const int h = e.h;
    const double weight = g.cell_area();
    std::vector<cplx> mod(2 * h + 1);
    for (int m = -h; m <= h; ++m)
        mod[m + h] = e.wv[m + h] * std::exp(kI * (m * e.dx * g.xi_start)) * weight;
    std::vector<cplx> out(e.n);
    std::vector<cplx> buf(e.p ? e.p : 2 * h + 1);
    for (std::size_t i = 0; i < g.nx; ++i) {
        long long c = static_cast<long long>(g.row_start + i * g.row_stride);
        const cplx* row = coefs.values.data() + i * g.nxi;
        if (e.p) {
            std::fill(buf.begin(), buf.end(), cplx{});
            std::copy_n(row, g.nxi, buf.begin());
            fft_backward(buf);
            for (int m = -h; m <= h; ++m)
                out[wrap(c + m, e.n)] += buf[wrap(m, e.p)] * mod[m + h];
        } else {
            for (int m = -h; m <= h; ++m) {
                cplx s = 0.0;
                for (std::size_t j = 0; j < g.nxi; ++j)
                    s += row[j] * std::exp(kI * (m * e.dx * g.dxi * static_cast<double>(j)));
                out[wrap(c + m, e.n)] += s * mod[m + h];
            }
        }
    }
    return ComplexField(g.space, std::move(out));
}

namespace {

void put_u64(std::ostream& os, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i)
        b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }

bool get_u64(std::istream& is, std::uint64_t& v) {
    unsigned char b[8];
    if (!is.read(reinterpret_cast<char*>(b), 8))
        return false;
    v = 0;
    for (int i = 0; i < 8; ++i)
        v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return true;
}

bool get_f64(std::istream& is, double& v) {
    std::uint64_t u;
    if (!get_u64(is, u))
        return false;
    v = std::bit_cast<double>(u);
    return true;
}

} // namespace

void save_coefs(const WavepacketCoefs& coefs, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw FormatError(FormatError::Kind::io, "cannot open " + path.string());
    const auto& g = coefs.grid;
    os.write("WPK2", 4);
    put_u64(os, g.nx);
    put_u64(os, g.nxi);
    put_f64(os, g.x_center(0));
    put_f64(os, static_cast<double>(g.row_stride) * g.space.dx());
    put_f64(os, g.xi_start);
    put_f64(os, g.dxi);
    for (auto v : coefs.values) {
        put_f64(os, v.real());
        put_f64(os, v.imag());
    }
    if (!os)
        throw FormatError(FormatError::Kind::io, "write failed for " + path.string());
}

CoefTable load_coefs(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw FormatError(FormatError::Kind::io, "cannot open " + path.string());
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, "WPK2", 4) != 0)
        throw FormatError(FormatError::Kind::header, "bad magic in " + path.string());
    CoefTable t;
    std::uint64_t nx, nxi;
    if (!get_u64(is, nx) || !get_u64(is, nxi) || !get_f64(is, t.x0_start) || !get_f64(is, t.dx0) ||
        !get_f64(is, t.xi_start) || !get_f64(is, t.dxi))
        throw FormatError(FormatError::Kind::header, "short header in " + path.string());
    if (nx == 0 || nxi == 0 || nx > (1ull << 28) / nxi)
        throw FormatError(FormatError::Kind::header, "implausible shape in " + path.string());
    t.nx = nx;
    t.nxi = nxi;
    t.values.resize(nx * nxi);
    for (auto& v : t.values) {
        double re, im;
        if (!get_f64(is, re) || !get_f64(is, im))
            throw FormatError(FormatError::Kind::truncated, "payload shorter than declared in " + path.string());
        if (!std::isfinite(re) || !std::isfinite(im))
            throw FormatError(FormatError::Kind::nonfinite, "non-finite coefficient in " + path.string());
        v = {re, im};
    }
    if (is.peek() != std::char_traits<char>::eof())
        throw FormatError(FormatError::Kind::truncated, "payload longer than declared in " + path.string());
    return t;
}

namespace {

// f(x - a) for the band-limited interpolant: roll by the nearest whole cell,
// then a Fourier phase for the remainder.
std::vector<cplx> shifted(std::span<const cplx> f, const Grid1D& g, double a) {
    const std::size_t n = g.n();
    double q = std::round(a / g.dx());
    double frac = a - q * g.dx();
    std::vector<cplx> out(n);
    long long qi = static_cast<long long>(q);
    for (std::size_t k = 0; k < n; ++k)
        out[k] = f[wrap(static_cast<long long>(k) - qi, n)];
    if (frac != 0.0) {
        fft_forward(out);
        double inv_n = 1.0 / static_cast<double>(n);
        for (std::size_t j = 0; j < n; ++j)
            out[j] *= std::exp(-kI * (g.wavenumber(j) * frac)) * inv_n;
        fft_backward(out);
    }
    return out;
}

} // namespace

ComplexField translate_modulate(PhasePoint z, const ComplexField& f) {
    const Grid1D& g = f.grid();
    auto out = shifted(f.values(), g, z.x);
    if (z.xi != 0.0)
        for (std::size_t k = 0; k < g.n(); ++k)
            out[k] *= std::exp(kI * ((g.x(k) - z.x) * z.xi));
    return ComplexField(g, std::move(out));
}

ComplexField translate_modulate_inverse(PhasePoint z, const ComplexField& f) {
    const Grid1D& g = f.grid();
    std::vector<cplx> tmp(f.values().begin(), f.values().end());
    if (z.xi != 0.0)
        for (std::size_t k = 0; k < g.n(); ++k)
            tmp[k] *= std::exp(-kI * ((g.x(k) - z.x) * z.xi));
    return ComplexField(g, shifted(tmp, g, -z.x));
}

ComplexField dilate(double lambda, const ComplexField& f) {
    if (!(lambda >= std::ldexp(1.0, -12)) || !(lambda <= 16.0))
        throw std::invalid_argument("dilate: lambda outside [2^-12, 2^4]");
    if (lambda == 1.0)
        return f;
    const Grid1D& g = f.grid();
    std::vector<double> pts(g.n());
    for (std::size_t k = 0; k < g.n(); ++k)
        pts[k] = g.x(k) / lambda;
    auto vals = bandlimited_eval(f, pts, true);
    double s = 1.0 / std::sqrt(lambda);
    for (auto& v : vals)
        v *= s;
    return ComplexField(g, std::move(vals));
}

namespace {

struct PathTable {
    double h_pos = 0, h_neg = 0;
    std::vector<PhasePoint> pos, neg; // from time 0 forwards / backwards
    double t_lo = 0, t_hi = 0;

    // cubic Hermite in the branch parameter s = |t|, slopes +-xi
    double hermite(const std::vector<PhasePoint>& pts, double h, double s) const {
        if (pts.size() == 1)
            return pts[0].x;
        double u = s / h;
        std::size_t i = std::min(static_cast<std::size_t>(std::max(0.0, std::floor(u))), pts.size() - 2);
        double th = u - static_cast<double>(i);
        const auto& a = pts[i];
        const auto& b = pts[i + 1];
        double h00 = (1 + 2 * th) * (1 - th) * (1 - th), h10 = th * (1 - th) * (1 - th);
        double h01 = th * th * (3 - 2 * th), h11 = th * th * (th - 1);
        return h00 * a.x + h10 * h * a.xi + h01 * b.x + h11 * h * b.xi;
    }

    double position(double t) const {
        if (t < t_lo - 1e-9 || t > t_hi + 1e-9)
            throw std::out_of_range("recentered potential evaluated outside its trajectory window");
        return t >= 0.0 ? hermite(pos, h_pos, t) : hermite(neg, h_neg, -t);
    }
};

} // namespace

Potential recentered_potential(const Potential& p, PhasePoint z0, double t_lo, double t_hi, double flow_dt) {
    if (p.label() == "zero" || p.label() == "linear")
        return builtin("zero");
    if (!(t_lo <= 0.0 && t_hi >= 0.0))
        throw std::invalid_argument("recentered_potential: window must contain 0");
    auto table = std::make_shared<PathTable>();
    table->t_lo = t_lo;
    table->t_hi = t_hi;
    auto fill = [&](double t1, std::vector<PhasePoint>& pts, double& h) {
        auto tr = trajectory(p, z0, 0.0, t1, flow_dt);
        pts = tr.points;
        h = tr.times.size() > 1 ? std::abs(tr.times[1] - tr.times[0]) : 1.0;
        if (t1 < 0.0)
            for (auto& q : pts)
                q.xi = -q.xi;
    };
    fill(t_hi, table->pos, table->h_pos);
    fill(t_lo, table->neg, table->h_neg);

    Potential base = p;
    auto v = [base, table](double t, double x) {
        double c = table->position(t);
        return base.value(t, c + x) - base.value(t, c) - x * base.gradient(t, c);
    };
    auto dv = [base, table](double t, double x) {
        double c = table->position(t);
        return base.gradient(t, c + x) - base.gradient(t, c);
    };
    auto d2v = [base, table](double t, double x) { return base.curvature(t, table->position(t) + x); };
    std::vector<DeclaredSeminorm> declared;
    for (const auto& d : p.declared_seminorms())
        if (d.k >= 2)
            declared.push_back(d);
    return Potential("recentered:" + p.label(), p.params(), v, dv, d2v, true, declared);
}

GalileanResidual galilean_covariance_residual(const Potential& p, PhasePoint z0, const ComplexField& phi, double t,
                                              const EvolveParams& params) {
    double fdt = std::min(1e-4, params.dt);
    GalileanResidual out;
    auto lhs = evolve(p, translate_modulate(z0, phi), 0.0, t, params);
    out.z0t = flow(p, z0, 0.0, t, fdt);
    out.alpha = action(p, z0, 0.0, t, fdt);
    auto vz = recentered_potential(p, z0, std::min(0.0, t), std::max(0.0, t), fdt);
    auto inner = evolve(vz, phi, 0.0, t, params);
    auto rhs = std::exp(kI * out.alpha) * translate_modulate(out.z0t, inner);
    out.residual = l2_distance(lhs, rhs);
    return out;
}

SpacetimeField lens_transform(const SpacetimeField& u_free, const std::vector<double>& target_times) {
    const auto& ts = u_free.times();
    const Grid1D& g = u_free.grid();
    const std::size_t n = g.n();
    if (ts.size() < 4)
        throw std::invalid_argument("lens_transform: need at least 4 recorded slices");
    std::vector<ComplexField> out;
    for (double t : target_times) {
        double c = std::cos(t);
        if (!(std::abs(c) >= 0.1))
            throw std::invalid_argument("lens_transform: |cos t| < 0.1");
        double tau = std::tan(t);
        if (tau < ts.front() - 1e-12 || tau > ts.back() + 1e-12)
            throw std::invalid_argument("lens_transform: tan t outside the recorded interval");
        std::size_t i = static_cast<std::size_t>(std::upper_bound(ts.begin(), ts.end(), tau) - ts.begin());
        std::size_t lo = i >= 2 ? i - 2 : 0;
        lo = std::min(lo, ts.size() - 4);
        std::vector<cplx> vals(n);
        for (std::size_t a = lo; a < lo + 4; ++a) {
            double wgt = 1.0;
            for (std::size_t b = lo; b < lo + 4; ++b)
                if (b != a)
                    wgt *= (tau - ts[b]) / (ts[a] - ts[b]);
            auto s = u_free.slices()[a].values();
            for (std::size_t k = 0; k < n; ++k)
                vals[k] += wgt * s[k];
        }
        ComplexField ut(g, std::move(vals));
        std::vector<double> pts(n);
        for (std::size_t k = 0; k < n; ++k)
            pts[k] = g.x(k) / c;
        auto res = bandlimited_eval(ut, pts, true);
        double amp = 1.0 / std::sqrt(c);
        for (std::size_t k = 0; k < n; ++k) {
            double x = g.x(k);
            res[k] *= amp * std::exp(-kI * (0.5 * x * x * tau));
        }
        out.emplace_back(g, std::move(res));
    }
    return SpacetimeField(target_times, std::move(out));
}

double harmonic_pde_residual(const SpacetimeField& l) {
    const auto& ts = l.times();
    if (ts.size() < 5)
        throw std::invalid_argument("pde residual: need at least 5 slices");
    double h = ts[1] - ts[0];
    for (std::size_t i = 1; i < ts.size(); ++i)
        if (std::abs(ts[i] - ts[i - 1] - h) > 1e-9 * std::abs(h))
            throw std::invalid_argument("pde residual: slices must be uniformly spaced");
    const Grid1D& g = l.grid();
    const std::size_t n = g.n();
    double worst = 0.0;
    for (std::size_t k = 2; k + 2 < ts.size(); ++k) {
        auto m2 = l.slices()[k - 2].values(), m1 = l.slices()[k - 1].values(), c = l.slices()[k].values(),
             p1 = l.slices()[k + 1].values(), p2 = l.slices()[k + 2].values();
        std::vector<cplx> lap(c.begin(), c.end());
        fft_forward(lap);
        for (std::size_t j = 0; j < n; ++j) {
            double kk = g.wavenumber(j);
            lap[j] *= -kk * kk / static_cast<double>(n);
        }
        fft_backward(lap);
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            cplx dt = (-p2[j] + 8.0 * p1[j] - 8.0 * m1[j] + m2[j]) / (12.0 * h);
            double x = g.x(j);
            cplx r = kI * dt - (-0.5 * lap[j] + 0.5 * x * x * c[j]);
            s += std::norm(r);
        }
        worst = std::max(worst, std::sqrt(s * g.dx()));
    }
    return worst;
}

double wavepacket_tail_sup(const Potential& p, PhasePoint z0, const Grid1D& grid, double delta0, double power,
                           const EvolveParams& params) {
    auto u0 = packet(grid, z0, 1.0);
    double best = 0.0;
    for (double end : {delta0, -delta0}) {
        PhasePoint z = z0;
        double tprev = 0.0;
        evolve_observe(p, u0, 0.0, end, params, [&](int, double t, std::span<const cplx> u) {
            z = flow(p, z, tprev, t, 1e-4);
            tprev = t;
            for (std::size_t k = 0; k < grid.n(); ++k) {
                double d = grid.x(k) - z.x;
                best = std::max(best, std::pow(1.0 + d * d, 0.5 * power) * std::abs(u[k]));
            }
        });
    }
    return best;
}

} // namespace wpk
