#pragma once

#include "wpk/classical_flow.hpp"
#include "wpk/field.hpp"
#include "wpk/potential.hpp"
#include "wpk/propagator.hpp"

#include <filesystem>
#include <ostream>
#include <vector>

namespace wpk {

/// The fixed window psi(x) = (2 pi)^{-1/2} pi^{-1/4} e^{-x^2/2} dilated to
/// S_lambda psi(x) = lambda^{-1/2} psi(x / lambda).
class Window {
public:
    explicit Window(double lambda = 1.0);

    static double amplitude();
    double scale() const { return lambda_; }
    double operator()(double x) const;
    ComplexField generator(const Grid1D& grid) const;
    /// Samples beyond this many cells from the centre are dropped (|x| > 9.5 lambda).
    int half_width(double dx) const;

private:
    double lambda_;
};

/// pi(z) S_lambda psi sampled directly from the closed form.
ComplexField packet(const Grid1D& grid, PhasePoint z, double lambda = 1.0);

/// Rows sit on grid points x0 = x(row_start + i*row_stride), i < nx;
/// columns xi0 = xi_start + j*dxi, j < nxi.
struct PhaseGrid {
    Grid1D space;
    std::size_t row_start = 0;
    std::size_t row_stride = 1;
    std::size_t nx = 0;
    double xi_start = 0.0;
    double dxi = 0.0;
    std::size_t nxi = 0;

    double x_center(std::size_t i) const { return space.x(row_start + i * row_stride); }
    double xi_center(std::size_t j) const { return xi_start + static_cast<double>(j) * dxi; }
    std::vector<double> x_centers() const;
    std::vector<double> xi_centers() const;
    double cell_area() const { return static_cast<double>(row_stride) * space.dx() * dxi; }

    /// Every admissible row and the full frequency band; meets analyze's
    /// resolution precondition for windows of scale lambda.
    static PhaseGrid covering(const Grid1D& space, double lambda);
};

struct WavepacketCoefs {
    PhaseGrid grid;
    std::vector<cplx> values; // row-major, nx * nxi

    cplx at(std::size_t i, std::size_t j) const { return values[i * grid.nxi + j]; }
    double l2_norm() const;
    void write_csv(std::ostream& os) const;
};

/// Tf(z) = <f, pi(z) S_lambda psi> for every z on the grid. Throws when the
/// grid is coarser than dx0 <= lambda/5, dxi0 <= pi/(5 lambda).
WavepacketCoefs analyze(const ComplexField& f, const Window& w, const PhaseGrid& grid);
/// Same transform without the resolution check.
WavepacketCoefs analyze_unchecked(const ComplexField& f, const Window& w, const PhaseGrid& grid);

/// T* F = sum_z F(z) pi(z) S_lambda psi dLambda.
ComplexField synthesize(const WavepacketCoefs& coefs, const Window& w);

/// Binary coefficient file: "WPK2", u64 nx, u64 nxi, f64 x0_start, f64 dx0,
/// f64 xi_start, f64 dxi, then nx*nxi (re, im) pairs, little-endian.
void save_coefs(const WavepacketCoefs& coefs, const std::filesystem::path& path);

struct CoefTable {
    std::size_t nx = 0, nxi = 0;
    double x0_start = 0, dx0 = 0, xi_start = 0, dxi = 0;
    std::vector<cplx> values;
};
CoefTable load_coefs(const std::filesystem::path& path);

/// e^{i(x-x0) xi0} f(x - x0): integer roll plus a Fourier sub-sample shift.
ComplexField translate_modulate(PhasePoint z, const ComplexField& f);
ComplexField translate_modulate_inverse(PhasePoint z, const ComplexField& f);

/// S_lambda f by band-limited resampling; lambda in [2^-12, 2^4].
ComplexField dilate(double lambda, const ComplexField& f);

/// V^{z0}(t,x) = V(t, x0^t + x) - V(t, x0^t) - x dV(t, x0^t) for the
/// trajectory of z0 (given at time 0), valid for t in [t_lo, t_hi].
Potential recentered_potential(const Potential& p, PhasePoint z0, double t_lo, double t_hi, double flow_dt = 1e-4);

struct GalileanResidual {
    double residual = 0.0; // |LHS - RHS|_2
    PhasePoint z0t;
    double alpha = 0.0;
};

/// Compares U(t,0) pi(z0) phi with e^{i alpha} pi(z0^t) U^{z0}(t,0) phi.
GalileanResidual galilean_covariance_residual(const Potential& p, PhasePoint z0, const ComplexField& phi, double t,
                                              const EvolveParams& params = {});

/// (cos t)^{-1/2} u(tan t, x / cos t) e^{-i x^2 tan t / 2} at each target
/// time; u is interpolated in time by 4-point Lagrange on the recorded slices.
SpacetimeField lens_transform(const SpacetimeField& u_free, const std::vector<double>& target_times);

/// max over interior slices of | i d_t L - (-1/2 d_xx + x^2/2) L |_2, with a
/// 5-point central difference in time (slices must be uniformly spaced).
double harmonic_pde_residual(const SpacetimeField& l);

/// sup over recorded |t| <= delta0 of <x - x0^t>^N |U(t,0) pi(z0) psi(x)|.
double wavepacket_tail_sup(const Potential& p, PhasePoint z0, const Grid1D& grid, double delta0, double power,
                           const EvolveParams& params = {});

} // namespace wpk
