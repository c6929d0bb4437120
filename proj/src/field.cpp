#include "wpk/field.hpp"

#include "wpk/fft.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

namespace wpk {

Grid1D::Grid1D(std::size_t n, double x_min, double dx) : n_(n), x_min_(x_min), dx_(dx) {
    if (n < 8 || !std::has_single_bit(n))
        throw std::invalid_argument("Grid1D: n must be a power of two >= 8, got " + std::to_string(n));
    if (!(dx > 0.0) || !std::isfinite(dx) || !std::isfinite(x_min))
        throw std::invalid_argument("Grid1D: dx must be positive and finite");
}

Grid1D Grid1D::centered(std::size_t n, double half_length) {
    return Grid1D(n, -half_length, 2.0 * half_length / static_cast<double>(n));
}

double Grid1D::wavenumber(std::size_t i) const {
    const auto m = static_cast<long long>(i) - (i >= n_ / 2 ? static_cast<long long>(n_) : 0);
    return 2.0 * std::numbers::pi * static_cast<double>(m) / length();
}

double Grid1D::max_wavenumber() const { return std::numbers::pi / dx_; }

std::vector<double> Grid1D::positions() const {
    std::vector<double> out(n_);
    for (std::size_t i = 0; i < n_; ++i)
        out[i] = x(i);
    return out;
}

std::vector<double> Grid1D::wavenumbers() const {
    std::vector<double> out(n_);
    for (std::size_t i = 0; i < n_; ++i)
        out[i] = wavenumber(i);
    return out;
}

ComplexField::ComplexField(Grid1D grid, std::vector<cplx> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.n())
        throw std::invalid_argument("ComplexField: value count does not match grid");
    for (const auto& v : values_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw NumericalError("ComplexField: non-finite sample");
}

ComplexField ComplexField::zeros(const Grid1D& grid) {
    return ComplexField(grid, std::vector<cplx>(grid.n()));
}

namespace {

void require_same_grid(const ComplexField& a, const ComplexField& b, const char* what) {
    if (!(a.grid() == b.grid()))
        throw std::invalid_argument(std::string(what) + ": fields live on different grids");
}

} // namespace

ComplexField operator+(const ComplexField& a, const ComplexField& b) {
    require_same_grid(a, b, "operator+");
    std::vector<cplx> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = a[i] + b[i];
    return ComplexField(a.grid(), std::move(v));
}

ComplexField operator-(const ComplexField& a, const ComplexField& b) {
    require_same_grid(a, b, "operator-");
    std::vector<cplx> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = a[i] - b[i];
    return ComplexField(a.grid(), std::move(v));
}

ComplexField operator*(cplx s, const ComplexField& a) {
    std::vector<cplx> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = s * a[i];
    return ComplexField(a.grid(), std::move(v));
}

SpacetimeField::SpacetimeField(std::vector<double> times, std::vector<ComplexField> slices)
    : times_(std::move(times)), slices_(std::move(slices)) {
    if (times_.size() != slices_.size())
        throw std::invalid_argument("SpacetimeField: times and slices differ in length");
    if (times_.size() < 2)
        throw std::invalid_argument("SpacetimeField: at least two time slices required");
    for (std::size_t i = 1; i < times_.size(); ++i) {
        if (!(times_[i] > times_[i - 1]))
            throw std::invalid_argument("SpacetimeField: times must be strictly increasing");
        if (!(slices_[i].grid() == slices_[0].grid()))
            throw std::invalid_argument("SpacetimeField: slices must share one grid");
    }
}

double lp_norm(const ComplexField& f, double p) {
    if (!(p >= 1.0))
        throw std::invalid_argument("lp_norm: p must be >= 1");
    const auto v = f.values();
    if (std::isinf(p)) {
        double m = 0.0;
        for (const auto& z : v)
            m = std::max(m, std::abs(z));
        return m;
    }
    double sum = 0.0;
    if (p == 2.0) {
        for (const auto& z : v)
            sum += std::norm(z);
        return std::sqrt(sum * f.grid().dx());
    }
    for (const auto& z : v)
        sum += std::pow(std::abs(z), p);
    return std::pow(sum * f.grid().dx(), 1.0 / p);
}

cplx inner_product(const ComplexField& f, const ComplexField& g) {
    require_same_grid(f, g, "inner_product");
    cplx sum = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        sum += f[i] * std::conj(g[i]);
    return sum * f.grid().dx();
}

double mass(const ComplexField& f) {
    double sum = 0.0;
    for (const auto& z : f.values())
        sum += std::norm(z);
    return sum * f.grid().dx();
}

double l2_distance(const ComplexField& f, const ComplexField& g) {
    require_same_grid(f, g, "l2_distance");
    double sum = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        sum += std::norm(f[i] - g[i]);
    return std::sqrt(sum * f.grid().dx());
}

std::vector<double> trapezoid_weights(std::span<const double> times) {
    const std::size_t m = times.size();
    std::vector<double> w(m, 0.0);
    for (std::size_t i = 0; i + 1 < m; ++i) {
        const double h = times[i + 1] - times[i];
        w[i] += 0.5 * h;
        w[i + 1] += 0.5 * h;
    }
    return w;
}

double mixed_norm_from_samples(std::span<const double> times, std::span<const double> slice_norms,
                               double q, std::optional<std::span<const double>> weight) {
    if (times.size() < 2)
        throw std::invalid_argument("mixed_norm: at least two time slices required");
    if (slice_norms.size() != times.size())
        throw std::invalid_argument("mixed_norm: one norm per time slice required");
    if (!(q >= 1.0))
        throw std::invalid_argument("mixed_norm: q must be >= 1");
    if (weight && weight->size() != times.size())
        throw std::invalid_argument("mixed_norm: weight must be sampled at the slice times");
    const auto dt = trapezoid_weights(times);
    if (std::isinf(q)) {
        double m = 0.0;
        for (std::size_t i = 0; i < times.size(); ++i)
            if (!weight || (*weight)[i] > 0.0)
                m = std::max(m, slice_norms[i]);
        return m;
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double w = weight ? (*weight)[i] : 1.0;
        if (w < 0.0)
            throw std::invalid_argument("mixed_norm: weight must be nonnegative");
        sum += w * dt[i] * std::pow(slice_norms[i], q);
    }
    return std::pow(sum, 1.0 / q);
}

double mixed_norm(const SpacetimeField& u, double q, double r,
                  std::optional<std::span<const double>> weight) {
    if (!(r >= 1.0))
        throw std::invalid_argument("mixed_norm: r must be >= 1");
    std::vector<double> norms;
    norms.reserve(u.size());
    for (const auto& s : u.slices())
        norms.push_back(lp_norm(s, r));
    return mixed_norm_from_samples(u.times(), norms, q, weight);
}

double boundary_amplitude(const ComplexField& f) {
    const std::size_t n = f.size();
    const std::size_t edge = std::max<std::size_t>(1, n / 20);
    double m = 0.0;
    for (std::size_t i = 0; i < edge; ++i)
        m = std::max({m, std::abs(f[i]), std::abs(f[n - 1 - i])});
    return m;
}

std::vector<cplx> spectrum(const ComplexField& f) {
    std::vector<cplx> v(f.values().begin(), f.values().end());
    fft_forward(v);
    return v;
}

std::vector<cplx> bandlimited_eval(const ComplexField& f, std::span<const double> points,
                                   bool zero_outside) {
    const Grid1D& g = f.grid();
    const std::size_t n = g.n();
    const auto half = static_cast<long long>(n / 2);
    auto coef = spectrum(f);
    const double inv_n = 1.0 / static_cast<double>(n);
    const double two_pi_over_l = 2.0 * std::numbers::pi / g.length();

    std::vector<cplx> out(points.size());
    for (std::size_t p = 0; p < points.size(); ++p) {
        const double y = points[p] - g.x_min();
        if (zero_outside && (y < 0.0 || y >= g.length())) {
            out[p] = 0.0;
            continue;
        }
        const double theta = two_pi_over_l * y;
        // Re-anchor the phasor recurrence every block to bound roundoff growth.
        constexpr long long block = 64;
        const cplx step = std::polar(1.0, theta);
        cplx acc = 0.0;
        cplx phasor;
        for (long long m = -half + 1; m < half; ++m) {
            if ((m + half - 1) % block == 0)
                phasor = std::polar(1.0, theta * static_cast<double>(m));
            const std::size_t idx = static_cast<std::size_t>(m < 0 ? m + static_cast<long long>(n) : m);
            acc += coef[idx] * phasor;
            phasor *= step;
        }
        // Nyquist bin split symmetrically so real data stays real.
        acc += coef[n / 2] * std::cos(theta * static_cast<double>(half));
        out[p] = acc * inv_n;
    }
    return out;
}

} // namespace wpk
