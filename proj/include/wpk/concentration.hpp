#pragma once

#include "wpk/classical_flow.hpp"
#include "wpk/field.hpp"
#include "wpk/potential.hpp"
#include "wpk/propagator.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace wpk {

/// Exponent pair (q0, r0) = ((7 + sqrt 33)/2, (5 + sqrt 33)/2).
inline const double kQ0 = (7.0 + std::sqrt(33.0)) / 2.0;
inline const double kR0 = (5.0 + std::sqrt(33.0)) / 2.0;

// ---- interval location ------------------------------------------------------

struct IntervalCandidate {
    double t_start = 0.0;
    double t_end = 0.0;
    std::size_t first_cell = 0;
    std::size_t cell_count = 0;
    double score = 0.0; // |J|^{-1/q} int_J G

    double t_center() const { return 0.5 * (t_start + t_end); }
    double half_length() const { return 0.5 * (t_end - t_start); }
    double length() const { return t_end - t_start; }
};

/// Cell i covers [t0 + i h, t0 + (i+1) h] with constant value g[i] >= 0.
/// Returns the interval made of whole cells maximising |J|^{-1/q} int_J G over
/// every length and offset (ties: shortest, then leftmost). An all-zero G
/// gives score 0 and the full interval.
IntervalCandidate inverse_hls_scan(std::span<const double> g, double t0, double h, double q);

struct LocateParams {
    double delta0 = 0.5;
    double constant = 0.1;
    EvolveParams evolve{};
};

struct LocateResult {
    IntervalCandidate interval;
    double epsilon = 0.0; // |u|_{L^q L^r} on [-delta0, delta0]
    double lhs = 0.0;     // |u|_{L^{q-1} L^r(J)}
    double rhs = 0.0;     // C |J|^{1/(q(q-1))} eps^{q/(q-2)}
    double ratio = 0.0;
    bool passed = false;
    bool admissible = false;
    std::vector<double> times;
    std::vector<double> g; // G at the recorded times
};

/// Evolves f over [-delta0, delta0], forms G(t) = |u(t)|_r^{q-1} / eps^{q-1}
/// and scans for the interval. Requires 2 < q < inf; throws when u = 0.
LocateResult locate_interval(const Potential& p, const ComplexField& f, double q, double r,
                             const LocateParams& params = {});

// ---- bubble detection -------------------------------------------------------

struct SearchParams {
    double delta0 = 0.5;
    std::vector<double> lambda_ladder; // empty: 2^-j, j = 0..8, kept where lambda >= 2.5 dx
    double t_stride = 0.0;             // 0: delta0 / 64
    EvolveParams evolve{};
    std::size_t max_evals = 0; // phase-space evaluations in the coarse search, 0 = unlimited
    int refine_passes = 4;
};

/// Relative gap below which two correlations count as tied.
inline constexpr double kDetectionTieTolerance = 1e-10;

struct Bubble {
    double lambda = 1.0;
    double t0 = 0.0;
    double x0 = 0.0;
    double xi0 = 0.0;
    cplx correlation{}; // <pi(z) S_lambda psi, U(t0,0) f>
    double abs_correlation = 0.0;
    bool budget_exceeded = false;
    std::size_t evaluations = 0;
    // coarse-grid spacings at the detected scale
    double cell_dx = 0.0;
    double cell_dxi = 0.0;
};

std::vector<double> default_lambda_ladder(const Grid1D& grid);

/// Direct <pi(z) S_lambda psi, U(t,0) f>.
cplx bubble_correlation(const Potential& p, const ComplexField& f, double lambda, double t, PhasePoint z,
                        const EvolveParams& params = {});

Bubble detect_bubble(const Potential& p, const ComplexField& f, const SearchParams& params = {});

struct Extraction {
    ComplexField profile;   // phi = c psi
    ComplexField g;         // U(t0,0)^{-1} pi(z) S_lambda phi
    ComplexField remainder; // f - g
    double decoupling_residual = 0.0; // |f|^2 - |remainder|^2 - |g|^2
};

Extraction extract_profile(const Potential& p, const ComplexField& f, const Bubble& b,
                           const EvolveParams& params = {});

struct ProfileDecomposition {
    std::vector<Bubble> bubbles;
    std::vector<ComplexField> profiles;
    std::vector<double> g_mass;          // |g_j|^2
    std::vector<double> remainders_mass; // |r_j|^2 after each extraction
    std::vector<double> decoupling_residuals;
    double initial_mass = 0.0;
    double ledger_residual = 0.0; // (|f|^2 - sum |g_j|^2 - |r_final|^2) / |f|^2
    bool budget_exceeded = false;
};

struct DecomposeParams {
    int max_bubbles = 4;
    double stop_threshold = -1.0; // < 0: 0.01 |f|_2 (2 pi)^{-1/2}
    SearchParams search{};
};

ProfileDecomposition iterate_decomposition(const Potential& p, const ComplexField& f,
                                           const DecomposeParams& params = {});

// ---- four-packet kernel -----------------------------------------------------

struct KernelParams {
    double delta0 = 0.5;
    EvolveParams evolve{1e-3, 10}; // integrand sampled every record_stride steps
};

/// eta(t) = exp(1 - 1/(1 - (t/delta0)^2)) on |t| < delta0.
double kernel_eta(double t, double delta0);

/// |int eta(t) int u1 u2 conj(u3) conj(u4) dx dt| with u_j = U(t,0) pi(z_j) psi.
double kernel_K(const Potential& p, const std::array<PhasePoint, 4>& z, const Grid1D& grid,
                const KernelParams& params = {});

struct DecayRow {
    std::string family;
    double parameter = 0.0;
    double value = 0.0;
};

struct DecayProbe {
    std::vector<DecayRow> rows;
    bool crude_bound_ok = false;     // K (1 + s) <= K(0) along the spatial ray
    double worst_momentum_ratio = 0.0; // min K(m)/K(2m), m >= 4
    bool momentum_ok = false;
    double energy_exponent = 0.0; // fitted d log K / d log mismatch
    bool energy_ok = false;
};

DecayProbe kernel_decay_probe(const Potential& p, const Grid1D& grid, const KernelParams& params = {});

// ---- corpus and power-law fit ----------------------------------------------

struct CorpusElement {
    std::string kind;
    ComplexField field;
};

/// 30 unit-mass test fields: planted packets, chirps, two-bump sums and
/// dilated Gaussians, drawn from the given seed.
std::vector<CorpusElement> make_corpus(const Potential& p, const Grid1D& grid, std::uint64_t seed,
                                       double delta0 = 0.5, const EvolveParams& params = {});

struct PowerLawFit {
    std::vector<std::size_t> envelope; // indices of the lower envelope points
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double beta = 0.0; // slope - 1
};

/// Lower envelope of (log eps, log a) (points not above anything to their
/// right) and its least-squares line.
PowerLawFit fit_lower_envelope(std::span<const double> eps, std::span<const double> a);

} // namespace wpk
