#include "commands.hpp"

#include "wpk/classical_flow.hpp"
#include "wpk/concentration.hpp"
#include "wpk/phase_space.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace wpk::cli {
namespace {

constexpr double kPi = std::numbers::pi;

struct Check {
    bool ok = false;
    std::string detail;
};

class Tap {
public:
    explicit Tap(std::ostream& os) : os_(os) { os_ << "TAP version 13\n"; }

    void run(const std::string& name, const std::function<Check()>& fn) {
        Check c;
        try {
            c = fn();
        } catch (const std::exception& e) {
            c = {false, std::string("exception: ") + e.what()};
        }
        ++count_;
        failed_ += !c.ok;
        os_ << (c.ok ? "ok " : "not ok ") << count_ << " - " << name;
        if (!c.detail.empty())
            os_ << " # " << c.detail;
        os_ << '\n';
        os_.flush();
    }

    bool finish() {
        os_ << "1.." << count_ << '\n';
        return failed_ == 0;
    }

private:
    std::ostream& os_;
    int count_ = 0;
    int failed_ = 0;
};

std::string num(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

Check bound(double value, double limit, const std::string& what) {
    return {value <= limit, what + " " + num(value) + " (<= " + num(limit) + ")"};
}

ComplexField random_field(const Grid1D& g, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1, 1);
    double c = 4 * u(rng), k = 3 * u(rng), w = 0.8 + 0.4 * u(rng), a = u(rng);
    return ComplexField::sample(g, [=](double x) {
        double y = (x - c) / w;
        return std::exp(-0.5 * y * y) * std::exp(cplx(0, k * x + a * x * x / 4));
    });
}

void flow_suite(const Scenario& s, Tap& tap) {
    auto p = s.make_potential();
    std::mt19937_64 rng(s.seed);
    std::uniform_real_distribution<double> u(-1, 1);

    tap.run("flow.time_reversal", [&] {
        double worst = 0.0;
        for (int k = 0; k < 20; ++k) {
            PhasePoint z{3 * u(rng), 3 * u(rng)};
            double t = u(rng);
            auto there = flow(p, z, 0, t, 1e-4);
            auto back = flow(p, there, t, 0, 1e-4);
            worst = std::max({worst, std::abs(back.x - z.x), std::abs(back.xi - z.xi)});
        }
        return bound(worst, 1e-8, "max deviation");
    });
    tap.run("flow.group_law", [&] {
        double worst = 0.0;
        for (int k = 0; k < 20; ++k) {
            PhasePoint z{3 * u(rng), 3 * u(rng)};
            auto half = flow(p, flow(p, z, 0, 0.4, 1e-4), 0.4, 0.8, 1e-4);
            auto whole = flow(p, z, 0, 0.8, 1e-4);
            worst = std::max({worst, std::abs(half.x - whole.x), std::abs(half.xi - whole.xi)});
        }
        return bound(worst, 1e-8, "max deviation");
    });
    if (!p.time_dependent()) {
        tap.run("flow.energy", [&] {
            double worst = 0.0;
            for (int k = 0; k < 20; ++k) {
                PhasePoint z{3 * u(rng), 3 * u(rng)};
                auto h = [&](PhasePoint w) { return 0.5 * w.xi * w.xi + p.value(0, w.x); };
                double t = u(rng);
                worst = std::max(worst, std::abs(h(flow(p, z, 0, t, 1e-4)) - h(z)) / std::max(1.0, std::abs(h(z))));
            }
            return bound(worst, 1e-8, "max relative energy drift");
        });
    }
    tap.run("flow.pair_estimates", [&] {
        int ok = 0;
        for (int k = 0; k < 200; ++k) {
            double sv = 0.5 * u(rng), t = sv + u(rng);
            ok += check_pair_estimates(p, {4 * u(rng), 4 * u(rng)}, {4 * u(rng), 4 * u(rng)}, sv, t, 1e-3)
                      .all_satisfied();
        }
        return Check{ok == 200, std::to_string(ok) + "/200 samples"};
    });
    tap.run("flow.cube_constant", [&] {
        double m2 = curvature_bound(p, -20, 20, -2, 2);
        double limit = 1.0 + 3.0 * std::max(1.0, m2) * std::exp(m2);
        double worst = 0.0;
        for (int eta = 1; eta <= 64; eta *= 2)
            for (int k = 0; k < 4; ++k) {
                PhasePoint ref{2 * u(rng), 2 * u(rng)};
                double t1 = std::min(1.0 / eta, 1.0) * u(rng);
                auto at = flow(p, ref, 0, t1, 1e-4);
                auto z = flow(p, {at.x + u(rng), at.xi + eta + u(rng)}, t1, 0, 1e-4);
                auto c = cube_containment(p, ref, z, 0.0, eta, 1.0);
                if (!c.entered)
                    return Check{false, "launched point did not enter the cube"};
                worst = std::max(worst, c.c_required);
            }
        return bound(worst, limit, "max C_required");
    });
}

void propagator_suite(const Scenario& s, Tap& tap) {
    auto p = s.make_potential();
    auto g = s.grid();
    EvolveParams ep{s.evolve.dt, 1};

    tap.run("propagator.unitarity", [&] {
        auto f = packet(g, {1.0, 0.5}, 1.0);
        double m0 = mass(f), worst = 0.0;
        evolve_observe(p, f, 0, 1000 * ep.dt, {ep.dt, 10}, [&](int, double, std::span<const cplx> v) {
            double m = 0.0;
            for (auto c : v)
                m += std::norm(c);
            worst = std::max(worst, std::abs(m * g.dx() - m0) / m0);
        });
        return bound(worst, 1e-10, "relative mass drift over 1000 steps");
    });
    tap.run("propagator.free_exact", [&] {
        auto f = ComplexField::sample(g, [](double x) { return cplx(std::pow(kPi, -0.25) * std::exp(-0.5 * x * x)); });
        auto v = evolve(builtin("zero"), f, 0, 1, ep);
        auto exact = ComplexField::sample(g, [](double x) {
            cplx w = 1.0 + cplx(0, 1);
            return std::pow(kPi, -0.25) / std::sqrt(w) * std::exp(-x * x / (2.0 * w));
        });
        return bound(l2_distance(v, exact), 1e-10, "L2 distance at t=1");
    });
    tap.run("propagator.convergence", [&] {
        auto h = builtin("harmonic");
        auto f = ComplexField::sample(
            g, [](double x) { return cplx(std::pow(kPi, -0.25) * std::exp(-0.5 * (x - 2) * (x - 2))); });
        auto ref = evolve(h, f, 0, 1, {ep.dt / 8, 1});
        double e1 = l2_distance(evolve(h, f, 0, 1, ep), ref);
        double e2 = l2_distance(evolve(h, f, 0, 1, {ep.dt / 2, 1}), ref);
        double ratio = e1 / e2;
        return Check{ratio >= 3.5 && ratio <= 4.5, "error ratio " + num(ratio) + " (in [3.5, 4.5])"};
    });
    tap.run("propagator.coherent_state", [&] {
        auto h = builtin("harmonic");
        auto f = ComplexField::sample(
            g, [](double x) { return cplx(std::pow(kPi, -0.25) * std::exp(-0.5 * (x - 2) * (x - 2))); });
        double worst = 0.0;
        double t = 1.0;
        auto v = evolve(h, f, 0, t, ep);
        for (std::size_t i = 0; i < g.n(); ++i) {
            double x = g.x(i), c = 2 * std::cos(t);
            worst = std::max(worst, std::abs(std::abs(v[i]) - std::pow(kPi, -0.25) * std::exp(-0.5 * (x - c) * (x - c))));
        }
        return bound(worst, 1e-6, "sup modulus error at t=1");
    });
    tap.run("propagator.dispersive", [&] {
        auto r = dispersive_probe(builtin("zero"), {0.1}, 0.01, ep);
        double rel = std::abs(r.operator_norm_estimates[0] * std::sqrt(2 * kPi * 0.1) - 1.0);
        return bound(rel, 0.02, "relative error against the free kernel at t=0.1");
    });
}

void phasespace_suite(const Scenario& s, Tap& tap) {
    auto p = s.make_potential();
    auto g = s.grid();
    std::mt19937_64 rng(s.seed + 1);
    std::uniform_real_distribution<double> u(-1, 1);
    Window w(1.0);
    auto grid = PhaseGrid::covering(g, 1.0);

    tap.run("phasespace.isometry_inversion", [&] {
        double iso = 0.0, inv = 0.0;
        for (int k = 0; k < 5; ++k) {
            auto f = random_field(g, rng);
            double n = lp_norm(f, 2);
            auto c = analyze(f, w, grid);
            iso = std::max(iso, std::abs(c.l2_norm() - n) / n);
            inv = std::max(inv, l2_distance(synthesize(c, w), f) / n);
        }
        return Check{iso <= 1e-6 && inv <= 1e-5, "isometry " + num(iso) + ", inversion " + num(inv)};
    });
    tap.run("phasespace.conjugate_symmetry", [&] {
        auto f = ComplexField::sample(g, [](double x) { return cplx(std::exp(-0.3 * x * x)); });
        auto c = analyze(f, w, grid);
        double worst = 0.0;
        for (std::size_t i = 0; i < grid.nx; i += 5)
            for (std::size_t j = 1; j < grid.nxi; ++j)
                worst = std::max(worst, std::abs(c.at(i, j) - std::conj(c.at(i, grid.nxi - j))));
        return bound(worst, 1e-10, "max asymmetry");
    });
    tap.run("phasespace.galilean", [&] {
        auto psi = w.generator(g);
        double worst = 0.0;
        for (int k = 0; k < 10; ++k) {
            PhasePoint z0{4 * u(rng), 4 * u(rng)};
            double t = s.delta0 * u(rng);
            worst = std::max(worst, galilean_covariance_residual(p, z0, psi, t, {std::min(s.evolve.dt, 1e-3), 1}).residual);
        }
        return bound(worst, 1e-5, "max residual");
    });
    tap.run("phasespace.lens", [&] {
        auto zero = builtin("zero");
        auto f = ComplexField::sample(g, [](double x) { return cplx(std::pow(kPi, -0.25) * std::exp(-0.5 * x * x)); });
        auto rec = evolve_record(zero, evolve(zero, f, 0, -1.6, {1e-2, 1}), -1.6, 1.6, {1e-2, 1});
        std::vector<double> ts;
        for (int k = -100; k <= 100; ++k)
            ts.push_back(0.01 * k);
        return bound(harmonic_pde_residual(lens_transform(rec, ts)), 1e-3, "PDE residual");
    });
}

double brute_score(const std::vector<double>& g, double h, double q) {
    double best = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        double sum = 0.0;
        for (std::size_t j = i; j < g.size(); ++j) {
            sum += g[j];
            best = std::max(best, sum * h / std::pow((j - i + 1) * h, 1.0 / q));
        }
    }
    return best;
}

void concentration_suite(const Scenario& s, Tap& tap) {
    auto p = s.make_potential();
    auto g = s.grid();
    std::mt19937_64 rng(s.seed + 2);
    std::uniform_real_distribution<double> u(0, 1);

    tap.run("concentration.hls_brute_force", [&] {
        int ok = 0;
        for (int k = 0; k < 20; ++k) {
            std::vector<double> v(1 + static_cast<std::size_t>(511 * u(rng)));
            for (auto& x : v)
                x = std::pow(u(rng), 4);
            double q = 1.5 + 6 * u(rng);
            double a = inverse_hls_scan(v, 0, 1e-2, q).score, b = brute_score(v, 1e-2, q);
            ok += std::abs(a - b) <= 1e-12 * std::max(1.0, b);
        }
        return Check{ok == 20, std::to_string(ok) + "/20 grids"};
    });

    auto sp = s.search();
    PhasePoint z{3, 5};
    double t0 = std::min(0.3, 0.6 * s.delta0);
    auto plant = evolve(p, packet(g, z, 0.5), t0, 0.0, sp.evolve);
    Bubble found;
    tap.run("concentration.detect_planted", [&] {
        found = detect_bubble(p, plant, sp);
        double stride = sp.t_stride > 0 ? sp.t_stride : s.delta0 / 64;
        bool ok = found.abs_correlation >= 0.95 / (2 * kPi) && std::abs(found.t0 - t0) <= stride;
        return Check{ok, "2pi|c| " + num(2 * kPi * found.abs_correlation) + ", t0 " + num(found.t0)};
    });
    tap.run("concentration.decoupling", [&] {
        auto e = extract_profile(p, plant, found, sp.evolve);
        return bound(std::abs(e.decoupling_residual) / mass(plant), 1e-10, "relative residual");
    });
    tap.run("concentration.ledger", [&] {
        auto two = packet(g, {-8, -6}, 1.0) + packet(g, {8, 6}, 1.0);
        DecomposeParams dp;
        dp.max_bubbles = 2;
        dp.search = sp;
        auto d = iterate_decomposition(p, two, dp);
        double rem = d.remainders_mass.empty() ? 1.0 : d.remainders_mass.back() / d.initial_mass;
        bool ok = std::abs(d.ledger_residual) <= 1e-8 && rem <= 1e-3;
        return Check{ok, "ledger " + num(d.ledger_residual) + ", remainder " + num(rem)};
    });
    tap.run("concentration.kernel_symmetry", [&] {
        KernelParams kp;
        kp.delta0 = s.delta0;
        std::array<PhasePoint, 4> q{PhasePoint{1, 0.5}, {-0.5, 1}, {0, -0.5}, {0.5, 0}};
        double a = kernel_K(p, q, g, kp);
        double b = kernel_K(p, {q[1], q[0], q[2], q[3]}, g, kp);
        double c = kernel_K(p, {q[0], q[1], q[3], q[2]}, g, kp);
        return bound(std::max(std::abs(a - b), std::abs(a - c)), 1e-10, "max asymmetry");
    });
    tap.run("concentration.corpus", [&] {
        auto corpus = make_corpus(p, g, s.seed, s.delta0, sp.evolve);
        double worst = 0.0;
        for (const auto& e : corpus)
            worst = std::max(worst, std::abs(lp_norm(e.field, 2) - 1.0));
        auto b = detect_bubble(p, corpus.front().field, sp);
        bool ok = corpus.size() == 30 && worst <= 1e-12 && b.abs_correlation <= 1.0 / std::sqrt(2 * kPi) + 1e-12;
        return Check{ok, std::to_string(corpus.size()) + " unit-mass fields, first |c| " + num(b.abs_correlation)};
    });
}

} // namespace

bool cmd_verify(const Scenario& s, const std::string& suite, std::ostream& os) {
    Tap tap(os);
    if (suite == "flow" || suite == "all")
        flow_suite(s, tap);
    if (suite == "propagator" || suite == "all")
        propagator_suite(s, tap);
    if (suite == "phasespace" || suite == "all")
        phasespace_suite(s, tap);
    if (suite == "concentration" || suite == "all")
        concentration_suite(s, tap);
    return tap.finish();
}

} // namespace wpk::cli
