#include "doctest.h"

#include "wpk/potential.hpp"

#include <cmath>
#include <stdexcept>

using namespace wpk;

TEST_CASE("builtin values") {
    auto h = builtin("harmonic", {{"omega", 1.0}});
    CHECK(h.value(0, 2) == 2.0);
    auto z = builtin("zero");
    for (double x : {-3.0, 0.0, 7.5}) {
        CHECK(z.value(0.3, x) == 0.0);
        CHECK(z.gradient(0.3, x) == 0.0);
        CHECK(z.curvature(0.3, x) == 0.0);
    }
    auto s = builtin("soft_branch");
    CHECK(s.curvature(0, 0) == doctest::Approx(1.0));
    CHECK(s.curvature(0, 2) == doctest::Approx(std::pow(5.0, -1.5)));
    auto l = builtin("linear", {{"E", -2.0}});
    CHECK(l.value(0, 3) == -6.0);
    CHECK(l.gradient(5, 3) == -2.0);
    auto b = builtin("breathing", {{"omega0", 2.0}, {"a", 0.5}});
    CHECK(b.time_dependent());
    double w = 2.0 * (1 + 0.5 * std::sin(0.7));
    CHECK(b.value(0.7, 3.0) == doctest::Approx(0.5 * w * w * 9.0));
    CHECK_FALSE(h.time_dependent());
}

TEST_CASE("builtin errors") {
    CHECK_THROWS_AS(builtin("quartic"), std::invalid_argument);
    CHECK_THROWS_AS(builtin("harmonic", {{"omega", std::nan("")}}), std::invalid_argument);
    CHECK_THROWS_AS(builtin("harmonic", {{"E", 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(builtin("breathing", {{"a", 0.6}}), std::invalid_argument);
    CHECK_THROWS_AS(builtin("zero", {{"omega", 1.0}}), std::invalid_argument);
}

TEST_CASE("derivatives agree with finite differences for every builtin") {
    for (const auto& label : builtin_labels()) {
        CAPTURE(label);
        auto c = check_derivatives(builtin(label));
        CHECK(c.max_rel_error_dv <= 1e-5);
        CHECK(c.max_rel_error_d2v <= 1e-5);
    }
}

TEST_CASE("seminorm estimates") {
    SubquadraticProbe probe;
    probe.k_max = 3;
    auto h = verify_subquadratic(builtin("harmonic"), probe);
    CHECK(std::abs(h.m(2) - 1.0) <= 1e-4);
    CHECK(std::abs(h.m(3)) <= 1e-6);
    CHECK(h.decay.third_derivative_vanishes);

    auto z = verify_subquadratic(builtin("zero"), probe);
    CHECK(z.m(2) == 0.0);
    CHECK(z.m(3) == 0.0);
    CHECK(z.sup_v_unit_ball == 0.0);

    probe.k_max = 5;
    auto h5 = verify_subquadratic(builtin("harmonic", {{"omega", 3.0}}), probe);
    CHECK(std::abs(h5.m(2) - 9.0) <= 1e-9);
    CHECK(std::abs(h5.m(4)) <= 1e-6);
    CHECK(std::abs(h5.m(5)) <= 1e-3);

    auto b = verify_subquadratic(builtin("breathing"), probe);
    CHECK(b.seminorms[0].sup_dxdt > 0.0);
    CHECK(b.sup_v_unit_ball > 0.0);
}

TEST_CASE("soft branch third derivative decays like <x>^-4") {
    SubquadraticProbe probe;
    probe.k_max = 3;
    auto s = verify_subquadratic(builtin("soft_branch"), probe);
    CHECK_FALSE(s.decay.third_derivative_vanishes);
    // d^3 sqrt(1+x^2) = -3x (1+x^2)^{-5/2}
    CHECK(s.m(3) == doctest::Approx(3.0 * 0.5 * std::pow(1.25, -2.5)).epsilon(1e-2));
    CHECK(s.decay.epsilon == doctest::Approx(3.0).epsilon(0.03));
    CHECK(s.m(2) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("step underflow for very high orders") {
    SubquadraticProbe probe;
    probe.k_max = 40;
    CHECK_THROWS_AS(verify_subquadratic(builtin("soft_branch"), probe), std::domain_error);
}
