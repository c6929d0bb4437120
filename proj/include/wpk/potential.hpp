#pragma once

#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace wpk {

using ParamMap = std::map<std::string, double>;

struct DeclaredSeminorm {
    int k;
    double bound; // sup_{t,x} |d^k_x V|
};

/// A real potential V(t,x) with analytic first and second x-derivatives.
/// Evaluation is pure; copies share the underlying callables.
class Potential {
public:
    using Fn = std::function<double(double t, double x)>;

    Potential(std::string label, ParamMap params, Fn v, Fn dv, Fn d2v, bool time_dependent,
              std::vector<DeclaredSeminorm> declared = {});

    double value(double t, double x) const { return v_(t, x); }
    double gradient(double t, double x) const { return dv_(t, x); }
    double curvature(double t, double x) const { return d2v_(t, x); }

    const std::string& label() const { return label_; }
    const ParamMap& params() const { return params_; }
    bool time_dependent() const { return time_dependent_; }
    /// True when V vanishes identically (lets the propagator skip the potential phase).
    bool is_zero() const { return label_ == "zero"; }
    const std::vector<DeclaredSeminorm>& declared_seminorms() const { return declared_; }

private:
    std::string label_;
    ParamMap params_;
    Fn v_, dv_, d2v_;
    bool time_dependent_;
    std::vector<DeclaredSeminorm> declared_;
};

/// Builtin subquadratic potentials:
///   zero                       V = 0
///   linear       {E=1}         V = E x
///   harmonic     {omega=1}     V = omega^2 x^2 / 2
///   soft_branch                V = sqrt(1 + x^2)
///   breathing    {omega0=1, a=0.25}
///                              V = w(t)^2 x^2 / 2,  w(t) = omega0 (1 + a sin t), |a| <= 1/2
/// Unknown labels, unknown parameter keys and non-finite values are rejected.
Potential builtin(std::string_view label, const ParamMap& params = {});
std::vector<std::string> builtin_labels();

struct SubquadraticProbe {
    double x_lo = -50.0;
    double x_hi = 50.0;
    double t_lo = -1.0;
    double t_hi = 1.0;
    int k_max = 3;
    int nx = 1001;
    int nt = 11;
};

struct SeminormEstimate {
    int k;
    double sup_dx;   // sup |d^k_x V|
    double sup_dxdt; // sup |d^k_x d_t V|
};

struct DecayReport {
    bool third_derivative_vanishes = false;
    double epsilon = 0.0; // best eps >= 0 with <x>^{1+eps} |d^3_x V| bounded; inf when d^3 V == 0
    double fitted_slope = 0.0;
};

struct SubquadraticReport {
    std::vector<SeminormEstimate> seminorms; // k = 2..k_max
    double sup_v_unit_ball = 0.0;            // sup |V| over |x| <= 1
    DecayReport decay;

    double m(int k) const;
};

/// Finite-difference estimates of the seminorms M_k plus a decay fit for
/// d^3_x V. Orders above two are nested central differences of d^2_x V with
/// step h = 1e-2 max(1,|x|)^(1/2). Throws std::domain_error when h^(k-2)
/// would underflow.
SubquadraticReport verify_subquadratic(const Potential& p, const SubquadraticProbe& probe = {});

struct DerivativeConsistency {
    double max_rel_error_dv = 0.0;
    double max_rel_error_d2v = 0.0;
};

/// Compares analytic dv, d2v against 5-point central differences of v on an
/// nx-by-nt sample grid. Errors are relative to max(|exact|, 1).
DerivativeConsistency check_derivatives(const Potential& p, double x_lo = -10.0, double x_hi = 10.0,
                                        int nx = 101, double t_lo = -1.0, double t_hi = 1.0, int nt = 11);

/// Sup of |d^2_x V| over a box, sampled on a fine grid (used for the
/// trajectory estimates).
double curvature_bound(const Potential& p, double x_lo, double x_hi, double t_lo, double t_hi);

} // namespace wpk
