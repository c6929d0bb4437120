#include "wpk/concentration.hpp"

#include "wpk/parallel.hpp"
#include "wpk/phase_space.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wpk {

double kernel_eta(double t, double delta0) {
    double s = t / delta0;
    if (std::abs(s) >= 1.0)
        return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

namespace {

// slices of U(t,0) pi(z) psi at the quadrature times, ascending in t
std::vector<std::vector<cplx>> packet_history(const Potential& p, PhasePoint z, const Grid1D& grid,
                                              const KernelParams& kp, std::vector<double>* times) {
    auto u0 = packet(grid, z, 1.0);
    std::vector<std::vector<cplx>> back, fwd;
    std::vector<double> tb, tf;
    evolve_observe(p, u0, 0.0, -kp.delta0, kp.evolve, [&](int, double t, std::span<const cplx> u) {
        back.emplace_back(u.begin(), u.end());
        tb.push_back(t);
    });
    evolve_observe(p, u0, 0.0, kp.delta0, kp.evolve, [&](int step, double t, std::span<const cplx> u) {
        if (step == 0)
            return;
        fwd.emplace_back(u.begin(), u.end());
        tf.push_back(t);
    });
    std::reverse(back.begin(), back.end());
    std::reverse(tb.begin(), tb.end());
    for (auto& s : fwd)
        back.push_back(std::move(s));
    tb.insert(tb.end(), tf.begin(), tf.end());
    if (times)
        *times = tb;
    return back;
}

} // namespace

double kernel_K(const Potential& p, const std::array<PhasePoint, 4>& z, const Grid1D& grid, const KernelParams& params) {
    params.evolve.validate();
    if (!(params.delta0 > 0.0))
        throw std::invalid_argument("kernel_K: delta0 must be positive");
    for (const auto& zj : z)
        if (std::abs(zj.xi) * grid.dx() > 0.5)
            throw std::invalid_argument("kernel_K: momentum not representable on this grid (|xi| dx > 0.5)");

    std::vector<double> times;
    std::array<std::vector<std::vector<cplx>>, 4> hist;
    for (int j = 0; j < 4; ++j)
        hist[j] = packet_history(p, z[j], grid, params, j == 0 ? &times : nullptr);

    auto w = trapezoid_weights(times);
    cplx total = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
        double eta = kernel_eta(times[k], params.delta0);
        if (eta == 0.0)
            continue;
        cplx s = 0.0;
        for (std::size_t i = 0; i < grid.n(); ++i)
            s += hist[0][k][i] * hist[1][k][i] * std::conj(hist[2][k][i]) * std::conj(hist[3][k][i]);
        total += w[k] * eta * s * grid.dx();
    }
    return std::abs(total);
}

DecayProbe kernel_decay_probe(const Potential& p, const Grid1D& grid, const KernelParams& params) {
    struct Job {
        std::string family;
        double parameter;
        std::array<PhasePoint, 4> z;
    };
    std::vector<Job> jobs;
    for (int s = 0; s <= 16; s += 2)
        jobs.push_back({"spatial", double(s), {PhasePoint{double(s), 0}, {0, 0}, {0, 0}, {0, 0}}});
    for (double m : {0.0, 4.0, 8.0, 16.0})
        jobs.push_back({"momentum_sum", m, {PhasePoint{0, m / 2}, {0, m / 2}, {0, 0}, {0, 0}}});
    for (double a : {1.0, 2.0, 3.0, 4.0})
        jobs.push_back({"energy_mismatch", 4.0 * a * a, {PhasePoint{0, a}, {0, -a}, {0, 0}, {0, 0}}});

    auto values = parallel_map<double>(jobs.size(), [&](std::size_t i) { return kernel_K(p, jobs[i].z, grid, params); });

    DecayProbe out;
    for (std::size_t i = 0; i < jobs.size(); ++i)
        out.rows.push_back({jobs[i].family, jobs[i].parameter, values[i]});

    auto family = [&](const std::string& name) {
        std::vector<DecayRow> r;
        for (const auto& row : out.rows)
            if (row.family == name)
                r.push_back(row);
        return r;
    };
    auto spatial = family("spatial");
    out.crude_bound_ok = true;
    for (const auto& r : spatial)
        if (r.value * (1.0 + r.parameter) > spatial.front().value * (1.0 + 1e-12) || r.value > spatial.front().value)
            out.crude_bound_ok = false;

    auto mom = family("momentum_sum");
    out.worst_momentum_ratio = kInfinity;
    for (std::size_t i = 0; i + 1 < mom.size(); ++i)
        if (mom[i].parameter >= 4.0) {
            double ratio = mom[i + 1].value > 0.0 ? mom[i].value / mom[i + 1].value : kInfinity;
            out.worst_momentum_ratio = std::min(out.worst_momentum_ratio, ratio);
        }
    out.momentum_ok = out.worst_momentum_ratio >= 10.0;

    auto en = family("energy_mismatch");
    double mx = 0, my = 0;
    for (const auto& r : en) {
        mx += std::log(r.parameter);
        my += std::log(r.value);
    }
    mx /= en.size();
    my /= en.size();
    double sxy = 0, sxx = 0;
    for (const auto& r : en) {
        sxy += (std::log(r.parameter) - mx) * (std::log(r.value) - my);
        sxx += (std::log(r.parameter) - mx) * (std::log(r.parameter) - mx);
    }
    out.energy_exponent = sxy / sxx;
    out.energy_ok = out.energy_exponent <= -2.0;
    return out;
}

} // namespace wpk
