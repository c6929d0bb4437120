#pragma once

#include <complex>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wpk {

using cplx = std::complex<double>;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Raised when a computation produces or receives non-finite samples.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Uniform periodic sampling of the line: x_k = x_min + k*dx, k = 0..n-1,
/// on the box [x_min, x_min + n*dx). n is a power of two, at least 8.
class Grid1D {
public:
    Grid1D(std::size_t n, double x_min, double dx);

    /// Box [-half_length, half_length) with n samples.
    static Grid1D centered(std::size_t n, double half_length);

    std::size_t n() const { return n_; }
    double x_min() const { return x_min_; }
    double dx() const { return dx_; }
    double length() const { return static_cast<double>(n_) * dx_; }
    double x(std::size_t i) const { return x_min_ + static_cast<double>(i) * dx_; }

    /// Angular wavenumber of DFT bin i (FFT ordering, Nyquist bin negative).
    double wavenumber(std::size_t i) const;
    double max_wavenumber() const;

    std::vector<double> positions() const;
    std::vector<double> wavenumbers() const;

    bool operator==(const Grid1D&) const = default;

private:
    std::size_t n_;
    double x_min_;
    double dx_;
};

/// A sampled complex wavefunction. Immutable once built; every sample finite.
class ComplexField {
public:
    ComplexField(Grid1D grid, std::vector<cplx> values);

    static ComplexField zeros(const Grid1D& grid);

    template <class Fn>
    static ComplexField sample(const Grid1D& grid, Fn&& fn) {
        std::vector<cplx> v(grid.n());
        for (std::size_t i = 0; i < grid.n(); ++i)
            v[i] = fn(grid.x(i));
        return ComplexField(grid, std::move(v));
    }

    const Grid1D& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    std::span<const cplx> values() const { return values_; }
    const cplx& operator[](std::size_t i) const { return values_[i]; }

    /// Steals the sample buffer (the field is left empty and must not be used).
    std::vector<cplx> release() && { return std::move(values_); }

private:
    Grid1D grid_;
    std::vector<cplx> values_;
};

ComplexField operator+(const ComplexField& a, const ComplexField& b);
ComplexField operator-(const ComplexField& a, const ComplexField& b);
ComplexField operator*(cplx s, const ComplexField& a);

/// Time series of fields on one grid; times strictly increasing, >= 2 slices.
class SpacetimeField {
public:
    SpacetimeField(std::vector<double> times, std::vector<ComplexField> slices);

    const std::vector<double>& times() const { return times_; }
    const std::vector<ComplexField>& slices() const { return slices_; }
    const Grid1D& grid() const { return slices_.front().grid(); }
    std::size_t size() const { return times_.size(); }

private:
    std::vector<double> times_;
    std::vector<ComplexField> slices_;
};

/// (sum |f_k|^p dx)^(1/p); p = kInfinity gives max |f_k|.
double lp_norm(const ComplexField& f, double p);

/// sum f_k conj(g_k) dx, linear in the first argument.
cplx inner_product(const ComplexField& f, const ComplexField& g);

double mass(const ComplexField& f);
double l2_distance(const ComplexField& f, const ComplexField& g);

/// Trapezoidal quadrature weights for the given (increasing) nodes.
std::vector<double> trapezoid_weights(std::span<const double> times);

/// ( sum_i w_i dt_i * norms_i^q )^(1/q) with trapezoidal dt_i.
double mixed_norm_from_samples(std::span<const double> times, std::span<const double> slice_norms,
                               double q, std::optional<std::span<const double>> weight = std::nullopt);

/// L^q_t L^r_x norm of a recorded evolution.
double mixed_norm(const SpacetimeField& u, double q, double r,
                  std::optional<std::span<const double>> weight = std::nullopt);

/// max |f| over the outer 5% of the box on either side; validity check for
/// the periodic discretization.
double boundary_amplitude(const ComplexField& f);

/// Unnormalized DFT of the samples (module Fourier convention).
std::vector<cplx> spectrum(const ComplexField& f);

/// Evaluates the band-limited (trigonometric) interpolant of f at arbitrary
/// points. Points outside the box are mapped to zero when zero_outside is set,
/// otherwise wrapped periodically.
std::vector<cplx> bandlimited_eval(const ComplexField& f, std::span<const double> points,
                                   bool zero_outside = true);

} // namespace wpk
