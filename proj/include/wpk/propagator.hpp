#pragma once

#include "wpk/field.hpp"
#include "wpk/potential.hpp"

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace wpk {

struct EvolveParams {
    double dt = 1e-3;     // 0 < dt <= 1e-2
    int record_stride = 1; // slices kept every record_stride steps

    void validate() const;
};

/// Called with the step index, the time and the samples of u at that time.
using EvolveObserver = std::function<void(int step, double t, std::span<const cplx> u)>;

/// u(t1) for i u_t = (-1/2 u_xx + V u), u(t0) = f, by Strang splitting with
/// N = ceil(|t1-t0|/dt) equal steps. |t1 - t0| <= 10.
ComplexField evolve(const Potential& p, const ComplexField& f, double t0, double t1, const EvolveParams& params = {});

/// Every record_stride-th step plus both endpoints.
SpacetimeField evolve_record(const Potential& p, const ComplexField& f, double t0, double t1,
                             const EvolveParams& params = {});

/// Streams the same slices evolve_record would keep; returns u(t1).
ComplexField evolve_observe(const Potential& p, const ComplexField& f, double t0, double t1,
                            const EvolveParams& params, const EvolveObserver& observer);

/// Largest kinetic phase k^2 dt / 2 rotated in one step.
double kinetic_phase_per_step(const Grid1D& grid, double dt);
/// True when the kinetic phase per step exceeds pi (advisory only).
bool is_underresolved(const Grid1D& grid, double dt);

struct DispersiveReport {
    double width = 0.0;
    std::vector<double> times;
    std::vector<double> operator_norm_estimates; // |u(t)|_inf / |g_w|_1
    std::vector<double> refined_estimates;       // same at width w/2
    double fitted_exponent = 0.0;                // slope of log estimate vs log t
    std::size_t grid_n = 0;
    std::size_t refined_grid_n = 0;
};

/// L1 -> Linf proxy: evolves an L1-normalized Gaussian of width w from 0 to
/// each t. The grid is chosen to resolve the source and contain its spread
/// unless given; an explicit grid must satisfy w >= 4 dx.
DispersiveReport dispersive_probe(const Potential& p, const std::vector<double>& t_list, double w,
                                  const EvolveParams& params = {}, std::optional<Grid1D> grid = std::nullopt);

struct StrichartzResult {
    double norm = 0.0;
    double ratio = 0.0; // norm / |f|_2 (0 for f = 0)
    bool admissible = false;
};

/// L^q_t L^r_x norm of U(t,0) f over [t_lo, t_hi] (trapezoid in time at
/// every record_stride-th step). Arbitrary interval lengths are covered by
/// chaining evolutions.
StrichartzResult strichartz_check(const Potential& p, const ComplexField& f, double t_lo, double t_hi, double q,
                                  double r, const EvolveParams& params = {});

bool is_admissible(double q, double r);

} // namespace wpk
