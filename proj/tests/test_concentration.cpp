#include "doctest.h"
#include "oracles.hpp"

#include "wpk/concentration.hpp"
#include "wpk/phase_space.hpp"

#include <random>

using namespace wpk;

namespace {

const Grid1D kGrid = Grid1D::centered(2048, 40.0);

ComplexField unit_gaussian(const Grid1D& g) {
    return ComplexField::sample(g, [](double x) { return cplx(std::pow(oracle::pi, -0.25) * std::exp(-0.5 * x * x)); });
}

ComplexField bubble_field(const Grid1D& g, double lambda, PhasePoint z) {
    return packet(g, z, lambda);
}

SearchParams quick_search() {
    SearchParams s;
    s.lambda_ladder = {1.0, 0.5, 0.25};
    s.t_stride = 0.05;
    return s;
}

} // namespace

TEST_CASE("HLS scan matches brute force") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0, 1);
    for (int trial = 0; trial < 60; ++trial) {
        std::size_t n = 1 + static_cast<std::size_t>(u(rng) * 256);
        if (trial % 10 == 0)
            n = 512;
        std::vector<double> g(n);
        int shape = trial % 3;
        for (std::size_t i = 0; i < n; ++i) {
            double v = u(rng);
            g[i] = shape == 0 ? v : shape == 1 ? v * v * v * v : (u(rng) < 0.1 ? 10 * v : 0.0);
        }
        double q = 1.2 + 8 * u(rng);
        double h = 0.01;
        auto fast = inverse_hls_scan(g, -1.0, h, q);
        auto slow = oracle::brute_hls(g, h, q);
        CHECK(std::abs(fast.score - slow.score) <= 1e-12 * std::max(1.0, slow.score));
    }
}

TEST_CASE("HLS scan examples") {
    SUBCASE("indicator") {
        // cells on [-1, 2), indicator of [0, 1]
        std::vector<double> g(300, 0.0);
        for (std::size_t i = 100; i < 200; ++i)
            g[i] = 1.0;
        auto c = inverse_hls_scan(g, -1.0, 0.01, 2.0);
        CHECK(c.t_start == doctest::Approx(0.0));
        CHECK(c.t_end == doctest::Approx(1.0));
        CHECK(c.score == doctest::Approx(1.0).epsilon(1e-3));
    }
    SUBCASE("constant") {
        std::vector<double> g(100, 3.0);
        auto c = inverse_hls_scan(g, -0.5, 0.01, 2.0);
        CHECK(c.cell_count == 100);
        CHECK(c.score == doctest::Approx(3.0 * std::sqrt(1.0)).epsilon(1e-12));
    }
    SUBCASE("spike") {
        std::vector<double> g(1000, 0.0);
        for (std::size_t i = 500; i < 505; ++i)
            g[i] = 20.0; // mass 1 on width 0.05
        auto c = inverse_hls_scan(g, 0.0, 0.01, 3.0);
        CHECK(c.length() == doctest::Approx(0.05));
        CHECK(c.score == doctest::Approx(std::pow(0.05, -1.0 / 3.0)).epsilon(1e-12));
    }
    SUBCASE("zero") {
        std::vector<double> g(50, 0.0);
        auto c = inverse_hls_scan(g, 0.0, 0.1, 2.0);
        CHECK(c.score == 0.0);
        CHECK(c.cell_count == 50);
    }
}

TEST_CASE("interval location") {
    Grid1D g = Grid1D::centered(4096, 40.0);
    LocateParams lp;
    lp.delta0 = 0.5;
    auto f = unit_gaussian(g);
    auto r = locate_interval(builtin("zero"), f, 8.0, 8.0 / 3.0, lp);
    CHECK_FALSE(r.admissible);
    CHECK(r.interval.t_start <= 0.0);
    CHECK(r.interval.t_end >= 0.0);
    CHECK(r.ratio >= 1.0);
    CHECK(r.passed);
    // even data: |u(t)| = |u(-t)|
    CHECK(std::abs(r.interval.t_center()) <= 2e-3 + 1e-12);

    auto adm = locate_interval(builtin("zero"), f, 8.0, 4.0, lp);
    CHECK(adm.admissible);
    CHECK(adm.ratio >= 1.0);
    CHECK_THROWS(locate_interval(builtin("zero"), ComplexField::zeros(g), 8.0, 4.0, lp));
    CHECK_THROWS(locate_interval(builtin("zero"), f, 2.0, 4.0, lp));
}

TEST_CASE("bubble correlation and detection") {
    auto f = bubble_field(kGrid, 0.5, {3, 5});
    CHECK(std::abs(bubble_correlation(builtin("zero"), f, 0.5, 0.0, {3, 5}) - 1.0 / (2 * oracle::pi)) < 1e-10);

    auto b = detect_bubble(builtin("zero"), f, quick_search());
    CHECK(b.lambda == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(std::abs(b.t0) <= 1e-3);
    CHECK(b.x0 == doctest::Approx(3.0).epsilon(1e-3));
    CHECK(b.xi0 == doctest::Approx(5.0).epsilon(1e-3));
    CHECK(std::abs(b.abs_correlation - 1.0 / (2 * oracle::pi)) <= 1e-4);
    CHECK(b.abs_correlation == std::abs(b.correlation));
    CHECK_FALSE(b.budget_exceeded);
}

TEST_CASE("detection inverts backward evolution") {
    auto h = builtin("harmonic");
    auto plant = bubble_field(kGrid, 0.5, {1, -2});
    auto f = evolve(h, plant, 0.3, 0.0);
    auto s = quick_search();
    auto b = detect_bubble(h, f, s);
    CHECK(std::abs(b.t0 - 0.3) <= s.t_stride);
    CHECK(b.abs_correlation >= 0.95 / (2 * oracle::pi));
}

TEST_CASE("detection bounds and budget") {
    auto f = unit_gaussian(kGrid);
    auto b = detect_bubble(builtin("soft_branch"), f, quick_search());
    CHECK(b.abs_correlation <= 1.0 / std::sqrt(2 * oracle::pi) + 1e-12);

    auto zero = detect_bubble(builtin("zero"), ComplexField::zeros(kGrid), quick_search());
    CHECK(zero.abs_correlation == 0.0);

    auto s = quick_search();
    s.max_evals = 1000;
    auto capped = detect_bubble(builtin("zero"), bubble_field(kGrid, 1.0, {2, 2}), s);
    CHECK(capped.budget_exceeded);
    CHECK(capped.evaluations <= 1000);
}

TEST_CASE("detection covariance") {
    auto base = bubble_field(kGrid, 1.0, {1, 1});
    auto a = detect_bubble(builtin("zero"), base, quick_search());
    auto moved = detect_bubble(builtin("zero"), translate_modulate({2, 3}, base), quick_search());
    CHECK(moved.x0 - a.x0 == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(moved.xi0 - a.xi0 == doctest::Approx(3.0).epsilon(1e-3));
    auto scaled = detect_bubble(builtin("zero"), dilate(0.5, base), quick_search());
    CHECK(scaled.lambda == doctest::Approx(0.5 * a.lambda).epsilon(1e-3));
    CHECK(scaled.x0 == doctest::Approx(0.5 * a.x0).epsilon(1e-3));
    CHECK(scaled.xi0 == doctest::Approx(2.0 * a.xi0).epsilon(1e-3));
}

TEST_CASE("profile extraction") {
    auto z = PhasePoint{-2, 4};
    auto f = bubble_field(kGrid, 0.5, z);
    Bubble b;
    b.lambda = 0.5;
    b.x0 = z.x;
    b.xi0 = z.xi;
    b.correlation = bubble_correlation(builtin("zero"), f, 0.5, 0.0, z);
    b.abs_correlation = std::abs(b.correlation);
    auto e = extract_profile(builtin("zero"), f, b);
    CHECK(lp_norm(e.remainder, 2) <= 1e-6);
    CHECK(std::abs(lp_norm(e.profile, 2) - 1.0 / std::sqrt(2 * oracle::pi)) <= 1e-6);
    CHECK(std::abs(e.decoupling_residual) <= 1e-10);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1, 1);
    auto h = builtin("harmonic");
    for (int k = 0; k < 5; ++k) {
        auto g = ComplexField::sample(kGrid, [&, a = u(rng), c = u(rng)](double x) {
            return cplx(1 + a, c) * std::exp(-0.5 * (x - 2 * a) * (x - 2 * a)) * std::exp(cplx(0, 3 * c * x));
        });
        Bubble bb;
        bb.lambda = 0.7;
        bb.t0 = 0.2 * u(rng);
        bb.x0 = u(rng);
        bb.xi0 = u(rng);
        bb.correlation = bubble_correlation(h, g, bb.lambda, bb.t0, {bb.x0, bb.xi0});
        bb.abs_correlation = std::abs(bb.correlation);
        auto ex = extract_profile(h, g, bb);
        double m = std::pow(lp_norm(g, 2), 2);
        CHECK(std::abs(ex.decoupling_residual) <= 1e-10 * m);
        CHECK(lp_norm(ex.profile, 2) == doctest::Approx(bb.abs_correlation * std::sqrt(2 * oracle::pi)).epsilon(1e-8));
    }

    Bubble degenerate;
    auto none = extract_profile(builtin("zero"), f, degenerate);
    CHECK(lp_norm(none.profile, 2) == 0.0);
    CHECK(l2_distance(none.remainder, f) == 0.0);
}

TEST_CASE("two-packet decomposition") {
    auto f = bubble_field(kGrid, 1.0, {-8, -6}) + bubble_field(kGrid, 1.0, {8, 6});
    DecomposeParams dp;
    dp.search = quick_search();
    auto d = iterate_decomposition(builtin("zero"), f, dp);
    REQUIRE(d.bubbles.size() >= 2);
    double total = d.initial_mass;
    double partial = 0.0;
    for (std::size_t j = 0; j < d.bubbles.size(); ++j) {
        partial += d.g_mass[j];
        CHECK(partial <= total * (1 + 1e-8));
        CHECK(std::abs(d.decoupling_residuals[j]) <= 1e-10 * total);
        if (j > 0)
            CHECK(d.remainders_mass[j] <= d.remainders_mass[j - 1] + 1e-14);
    }
    CHECK(std::abs(d.ledger_residual) <= 1e-8);
    std::vector<std::pair<double, double>> found;
    for (std::size_t j = 0; j < 2; ++j)
        found.emplace_back(d.bubbles[j].x0, d.bubbles[j].xi0);
    std::sort(found.begin(), found.end());
    CHECK(found[0].first == doctest::Approx(-8).epsilon(1e-3));
    CHECK(found[0].second == doctest::Approx(-6).epsilon(1e-3));
    CHECK(found[1].first == doctest::Approx(8).epsilon(1e-3));
    CHECK(found[1].second == doctest::Approx(6).epsilon(1e-3));
    CHECK(d.remainders_mass[1] <= 1e-3 * total);

    auto single = iterate_decomposition(builtin("zero"), bubble_field(kGrid, 1.0, {1, 1}), dp);
    CHECK(single.bubbles.size() == 1);
}

TEST_CASE("decomposition ledger on random data") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-1, 1);
    DecomposeParams dp;
    dp.max_bubbles = 3;
    dp.search = quick_search();
    dp.search.refine_passes = 1;
    auto f = ComplexField::sample(kGrid, [&, a = u(rng), b = u(rng)](double x) {
        return std::exp(-0.3 * (x - 3 * a) * (x - 3 * a)) * std::exp(cplx(0, 0.4 * b * x * x));
    });
    auto d = iterate_decomposition(builtin("breathing"), f, dp);
    CHECK(std::abs(d.ledger_residual) <= 1e-8);
}

TEST_CASE("four-packet kernel") {
    Grid1D g = Grid1D::centered(2048, 40.0);
    KernelParams kp;
    auto k0 = kernel_K(builtin("zero"), {PhasePoint{0, 0}, {0, 0}, {0, 0}, {0, 0}}, g, kp);
    // time integral of the closed-form x-integral by composite Simpson
    int m = 20000;
    double s = 0.0;
    for (int i = 0; i <= m; ++i) {
        double t = -kp.delta0 + 2 * kp.delta0 * i / m;
        double w = (i == 0 || i == m) ? 1 : (i % 2 ? 4 : 2);
        s += w * kernel_eta(t, kp.delta0) / std::sqrt(1 + t * t);
    }
    s *= 2 * kp.delta0 / m / 3;
    double expected = s / std::pow(2 * oracle::pi, 2) / std::sqrt(oracle::pi) / std::sqrt(2.0);
    CHECK(std::abs(k0 - expected) <= 1e-6);

    std::array<PhasePoint, 4> z{PhasePoint{1, 2}, {-1, 0.5}, {0.5, 1}, {-0.5, 1.5}};
    auto p = builtin("soft_branch");
    double a = kernel_K(p, z, g, kp);
    double b = kernel_K(p, {z[1], z[0], z[2], z[3]}, g, kp);
    double c = kernel_K(p, {z[0], z[1], z[3], z[2]}, g, kp);
    CHECK(std::abs(a - b) <= 1e-10);
    CHECK(std::abs(a - c) <= 1e-10);
    double pos = kernel_K(p, {z[0], z[1], z[0], z[1]}, g, kp);
    CHECK(pos > 0.0);
    CHECK_THROWS(kernel_K(p, {PhasePoint{0, 100}, z[1], z[2], z[3]}, g, kp));
    CHECK(kernel_eta(0.0, 0.5) == 1.0);
    CHECK(kernel_eta(0.5, 0.5) == 0.0);
}

TEST_CASE("kernel decay probe") {
    Grid1D g = Grid1D::centered(2048, 40.0);
    auto probe = kernel_decay_probe(builtin("zero"), g);
    CHECK(probe.crude_bound_ok);
    CHECK(probe.momentum_ok);
    CHECK(probe.worst_momentum_ratio >= 10.0);
    double k0 = 0.0, kmax = 0.0;
    for (const auto& row : probe.rows) {
        if (row.family == "spatial" && row.parameter == 0.0)
            k0 = row.value;
        kmax = std::max(kmax, row.value);
    }
    CHECK(k0 == kmax);
}

TEST_CASE("lower envelope fit") {
    std::vector<double> eps, a;
    for (int i = 0; i < 11; ++i) {
        double e = 0.1 + 0.05 * i;
        eps.push_back(e);
        a.push_back(0.5 * std::pow(e, 2.5) * (i % 2 ? 3.0 : 1.0));
    }
    auto fit = fit_lower_envelope(eps, a);
    CHECK(fit.slope == doctest::Approx(2.5).epsilon(1e-10));
    CHECK(fit.beta == doctest::Approx(1.5).epsilon(1e-10));
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.envelope.size() == 6);
}

TEST_CASE("corpus") {
    Grid1D g = Grid1D::centered(2048, 40.0);
    auto c1 = make_corpus(builtin("zero"), g, 42);
    auto c2 = make_corpus(builtin("zero"), g, 42);
    REQUIRE(c1.size() == 30);
    for (std::size_t i = 0; i < c1.size(); ++i) {
        CHECK(lp_norm(c1[i].field, 2) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(l2_distance(c1[i].field, c2[i].field) == 0.0);
    }
}

TEST_CASE("exponent constants") {
    CHECK(kQ0 == doctest::Approx(6.37228).epsilon(1e-5));
    CHECK(kR0 == doctest::Approx(5.37228).epsilon(1e-5));
}
