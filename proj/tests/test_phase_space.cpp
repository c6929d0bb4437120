#include "doctest.h"
#include "oracles.hpp"

#include "wpk/phase_space.hpp"

#include <filesystem>
#include <random>
#include <sstream>

using namespace wpk;

namespace {

const Grid1D kGrid = Grid1D::centered(2048, 20.0);

ComplexField gaussian(const Grid1D& g, double c = 0.0, double l = 1.0) {
    return ComplexField::sample(g, [&](double x) {
        double y = (x - c) / l;
        return cplx(std::pow(oracle::pi, -0.25) / std::sqrt(l) * std::exp(-0.5 * y * y));
    });
}

ComplexField random_schwartz(const Grid1D& g, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<std::array<double, 5>> bumps(3);
    for (auto& b : bumps)
        b = {5 * u(rng), 3 * u(rng), 0.6 + 0.5 * u(rng), u(rng), u(rng)};
    return ComplexField::sample(g, [&](double x) {
        cplx s = 0.0;
        for (const auto& b : bumps) {
            double y = (x - b[0]) / b[2];
            s += cplx(b[3], b[4]) * std::exp(-0.5 * y * y) * std::exp(cplx(0, b[1] * x));
        }
        return s;
    });
}

} // namespace

TEST_CASE("window invariants") {
    auto psi = Window(1.0).generator(kGrid);
    double even = 0.0, imag = 0.0;
    for (std::size_t i = 1; i < kGrid.n(); ++i) {
        even = std::max(even, std::abs(psi[i] - psi[kGrid.n() - i]));
        imag = std::max(imag, std::abs(psi[i].imag()));
    }
    CHECK(even <= 1e-12);
    CHECK(imag <= 1e-12);
    CHECK(std::abs(lp_norm(psi, 2) - 1.0 / std::sqrt(2 * oracle::pi)) <= 1e-10);
    CHECK(Window(0.25)(0.0) == doctest::Approx(2.0 * Window::amplitude()));
}

TEST_CASE("translation and modulation") {
    auto f = gaussian(kGrid, 0.3);
    auto same = translate_modulate({0, 0}, f);
    for (std::size_t i = 0; i < kGrid.n(); ++i)
        CHECK(same[i] == f[i]);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-6, 6);
    for (int k = 0; k < 10; ++k) {
        PhasePoint z{u(rng), u(rng)};
        CHECK(lp_norm(translate_modulate(z, f), 2) == doctest::Approx(lp_norm(f, 2)).epsilon(1e-13));
    }
    auto there = translate_modulate({3, 5}, f);
    CHECK(l2_distance(translate_modulate_inverse({3, 5}, there), f) <= 1e-12);
    // sub-sample shift of the window equals the sampled packet
    PhasePoint z{1.2345, -2.5};
    CHECK(l2_distance(translate_modulate(z, Window(0.5).generator(kGrid)), packet(kGrid, z, 0.5)) <= 1e-12);
}

TEST_CASE("dilation") {
    auto f = gaussian(kGrid);
    auto id = dilate(1.0, f);
    CHECK(l2_distance(id, f) == 0.0);
    auto half = dilate(0.5, f);
    CHECK(lp_norm(half, 2) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(lp_norm(half, kInfinity) == doctest::Approx(std::sqrt(2.0) * std::pow(oracle::pi, -0.25)).epsilon(1e-12));
    CHECK(l2_distance(half, gaussian(kGrid, 0.0, 0.5)) < 1e-12);
    CHECK(l2_distance(dilate(2.0, f), gaussian(kGrid, 0.0, 2.0)) < 1e-12);
    CHECK_THROWS(dilate(32.0, f));
    CHECK_THROWS(dilate(1e-4, f));
}

TEST_CASE("wavepacket transform of the window itself") {
    auto psi = Window(1.0).generator(kGrid);
    auto grid = PhaseGrid::covering(kGrid, 1.0);
    auto c = analyze(psi, Window(1.0), grid);
    // (x0, xi0) = (0, 0) sits at row n/(2 stride), column nxi/2
    std::size_t i0 = kGrid.n() / 2 / grid.row_stride, j0 = grid.nxi / 2;
    REQUIRE(grid.x_center(i0) == 0.0);
    REQUIRE(std::abs(grid.xi_center(j0)) < 1e-12);
    CHECK(std::abs(c.at(i0, j0) - 1.0 / (2 * oracle::pi)) < 1e-12);
    CHECK(c.l2_norm() == doctest::Approx(lp_norm(psi, 2)).epsilon(1e-10));
}

TEST_CASE("transform peaks at the packet location") {
    auto f = packet(kGrid, {4, 7}, 1.0);
    auto grid = PhaseGrid::covering(kGrid, 1.0);
    auto c = analyze(f, Window(1.0), grid);
    std::size_t bi = 0, bj = 0;
    double best = 0.0;
    for (std::size_t i = 0; i < grid.nx; ++i)
        for (std::size_t j = 0; j < grid.nxi; ++j)
            if (std::abs(c.at(i, j)) > best) {
                best = std::abs(c.at(i, j));
                bi = i;
                bj = j;
            }
    CHECK(std::abs(grid.x_center(bi) - 4.0) <= grid.row_stride * kGrid.dx());
    CHECK(std::abs(grid.xi_center(bj) - 7.0) <= grid.dxi);
}

TEST_CASE("isometry, inversion and linearity") {
    auto unit = gaussian(kGrid);
    auto grid = PhaseGrid::covering(kGrid, 1.0);
    Window w(1.0);
    auto c = analyze(unit, w, grid);
    CHECK(std::abs(c.l2_norm() - 1.0) <= 1e-6);
    CHECK(l2_distance(synthesize(c, w), unit) <= 1e-5);

    std::mt19937_64 rng(17);
    for (int k = 0; k < 20; ++k) {
        auto f = random_schwartz(kGrid, rng);
        for (double lam : {1.0, 0.5}) {
            auto g = PhaseGrid::covering(kGrid, lam);
            auto cf = analyze(f, Window(lam), g);
            CHECK(std::abs(cf.l2_norm() / lp_norm(f, 2) - 1.0) <= 1e-6);
            CHECK(l2_distance(synthesize(cf, Window(lam)), f) <= 1e-5 * lp_norm(f, 2));
        }
    }

    WavepacketCoefs zero{grid, std::vector<cplx>(grid.nx * grid.nxi)};
    CHECK(lp_norm(synthesize(zero, w), 2) == 0.0);

    auto f1 = random_schwartz(kGrid, rng), f2 = random_schwartz(kGrid, rng);
    auto a1 = analyze(f1, w, grid), a2 = analyze(f2, w, grid);
    cplx a(0.3, -1.2), b(2.0, 0.5);
    WavepacketCoefs mix{grid, a1.values};
    for (std::size_t i = 0; i < mix.values.size(); ++i)
        mix.values[i] = a * a1.values[i] + b * a2.values[i];
    auto lhs = synthesize(mix, w);
    auto rhs = a * synthesize(a1, w) + b * synthesize(a2, w);
    CHECK(l2_distance(lhs, rhs) <= 1e-12);
}

TEST_CASE("direct-sum path agrees with the FFT path") {
    auto f = packet(kGrid, {1, 2}, 1.0);
    PhaseGrid g{kGrid};
    g.row_start = 1000;
    g.row_stride = 4;
    g.nx = 20;
    g.xi_start = -1.0;
    g.dxi = 0.3; // not commensurate with the grid
    g.nxi = 15;
    auto direct = analyze(f, Window(1.0), g);
    for (std::size_t i = 0; i < g.nx; ++i)
        for (std::size_t j = 0; j < g.nxi; ++j) {
            auto w = packet(kGrid, {g.x_center(i), g.xi_center(j)}, 1.0);
            CHECK(std::abs(direct.at(i, j) - inner_product(f, w)) < 1e-12);
        }
}

TEST_CASE("covariance and conjugate symmetry") {
    Window w(1.0);
    auto grid = PhaseGrid::covering(kGrid, 1.0);
    auto f = gaussian(kGrid, 0.0, 0.8);
    auto cf = analyze(f, w, grid);
    // real even data
    for (std::size_t i = 0; i < grid.nx; i += 7)
        for (std::size_t j = 1; j < grid.nxi; j += 5)
            CHECK(std::abs(cf.at(i, j) - std::conj(cf.at(i, grid.nxi - j))) <= 1e-10);

    // shift by whole rows and whole frequency cells
    double x0 = 4 * grid.row_stride * kGrid.dx(), xi0 = 16 * grid.dxi;
    auto moved = analyze(translate_modulate({x0, xi0}, f), w, grid);
    for (std::size_t i = 4; i < grid.nx; i += 3)
        for (std::size_t j = 16; j < grid.nxi; j += 11)
            CHECK(std::abs(std::abs(moved.at(i, j)) - std::abs(cf.at(i - 4, j - 16))) <= 1e-8);
}

TEST_CASE("resolution preconditions") {
    auto f = gaussian(kGrid);
    auto grid = PhaseGrid::covering(kGrid, 1.0);
    CHECK_THROWS(analyze(f, Window(0.25), grid));
    PhaseGrid coarse = grid;
    coarse.dxi = 1.0;
    coarse.nxi = 10;
    CHECK_THROWS(analyze(f, Window(1.0), coarse));
}

TEST_CASE("coefficient export") {
    auto f = packet(kGrid, {1, 1}, 1.0);
    PhaseGrid g{kGrid};
    g.row_start = 900;
    g.row_stride = 8;
    g.nx = 10;
    g.xi_start = -2;
    g.dxi = 2 * oracle::pi / (1024 * kGrid.dx());
    g.nxi = 7;
    auto c = analyze(f, Window(1.0), g);
    auto path = std::filesystem::temp_directory_path() / "wpk_coefs.wpk2";
    save_coefs(c, path);
    auto t = load_coefs(path);
    CHECK(t.nx == 10);
    CHECK(t.nxi == 7);
    CHECK(t.x0_start == g.x_center(0));
    CHECK(t.values == c.values);
    std::ostringstream os;
    c.write_csv(os);
    CHECK(os.str().rfind("x0,xi0,re,im,abs\n", 0) == 0);
}

TEST_CASE("recentered potentials") {
    auto h = recentered_potential(builtin("harmonic"), {2, 1}, -0.5, 0.5);
    for (double t : {-0.5, 0.0, 0.3})
        for (double x : {-3.0, 0.5, 2.0})
            CHECK(h.value(t, x) == doctest::Approx(0.5 * x * x).epsilon(1e-12));
    auto z = recentered_potential(builtin("zero"), {2, 1}, 0, 0.5);
    CHECK(z.value(0.2, 3.0) == 0.0);
    auto s = recentered_potential(builtin("soft_branch"), {0, 0}, 0, 0.5);
    CHECK(s.value(0, 1.5) == doctest::Approx(std::sqrt(1 + 2.25) - 1.0));
    CHECK(s.gradient(0, 0) == 0.0);
    CHECK(s.curvature(0, 0) == 1.0);
    CHECK_THROWS(s.value(0.8, 0.0));
}

TEST_CASE("Galilean covariance") {
    Grid1D g = Grid1D::centered(4096, 40.0);
    auto psi = Window(1.0).generator(g);
    auto free = galilean_covariance_residual(builtin("zero"), {0, 3}, psi, 0.4);
    CHECK(free.residual <= 1e-6);
    CHECK(free.z0t.x == doctest::Approx(1.2));
    CHECK(free.alpha == doctest::Approx(0.5 * 9 * 0.4));
    auto harm = galilean_covariance_residual(builtin("harmonic"), {2, 0}, psi, 0.5);
    CHECK(harm.residual <= 1e-6);
    auto even = galilean_covariance_residual(builtin("soft_branch"), {0, 0}, psi, 0.5);
    CHECK(even.residual <= 1e-8);
    auto moving = galilean_covariance_residual(builtin("breathing"), {1, -2}, psi, -0.5);
    CHECK(moving.residual <= 1e-5);
}

TEST_CASE("lens transform") {
    Grid1D g = Grid1D::centered(1024, 20.0);
    auto f = gaussian(g);
    auto u = evolve_record(builtin("zero"), evolve(builtin("zero"), f, 0, -1.6, {}), -1.6, 1.6, {1e-2, 1});
    std::vector<double> ts;
    for (int k = -100; k <= 100; ++k)
        ts.push_back(0.01 * k);
    auto l = lens_transform(u, ts);
    auto zero_slice = l.slices()[100];
    CHECK(l2_distance(zero_slice, f) < 1e-10);
    for (std::size_t k = 0; k < ts.size(); k += 20)
        CHECK(std::abs(lp_norm(l.slices()[k], 2) - 1.0) <= 1e-8);
    CHECK(harmonic_pde_residual(l) <= 1e-3);
    CHECK_THROWS(lens_transform(u, {1.5}));
    CHECK_THROWS(lens_transform(u, {1.1}));
}

TEST_CASE("wavepacket tails stay bounded") {
    Grid1D g = Grid1D::centered(1024, 30.0);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-3, 3);
    for (const auto& label : {"zero", "harmonic", "soft_branch"}) {
        double lo = kInfinity, hi = 0.0;
        for (int k = 0; k < 5; ++k) {
            double s = wavepacket_tail_sup(builtin(label), {u(rng), u(rng)}, g, 0.5, 4.0, {1e-3, 50});
            lo = std::min(lo, s);
            hi = std::max(hi, s);
        }
        CHECK(hi < 10.0 * lo);
    }
}
