#include <cmath>

#include <doctest.h>

#include "ordcausal/prob.hpp"

using namespace ordcausal;

TEST_CASE("normal cdf reference points") {
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-9));
    CHECK(normal_cdf(-1.959963984540054) == doctest::Approx(0.025).epsilon(1e-9));
    CHECK(normal_two_sided_p(1.959963984540054) == doctest::Approx(0.05).epsilon(1e-9));
}

TEST_CASE("F upper tail against closed forms") {
    // F(1,1): cdf(f) = 2/pi * atan(sqrt(f))
    CHECK(f_sf(1.0, 1, 1) == doctest::Approx(0.5).epsilon(1e-10));
    // F(2, d2): sf(f) = (1 + 2 f / d2)^(-d2/2)
    CHECK(f_sf(1.0, 2, 10) == doctest::Approx(std::pow(1.2, -5.0)).epsilon(1e-10));
    CHECK(f_sf(3.5, 2, 8) == doctest::Approx(std::pow(1.0 + 2.0 * 3.5 / 8.0, -4.0)).epsilon(1e-10));
    CHECK(f_sf(0.0, 3, 7) == doctest::Approx(1.0));
}

TEST_CASE("chi-square upper tail against closed forms") {
    // dof 2: sf(x) = exp(-x/2)
    CHECK(chisq_sf(1.0, 2) == doctest::Approx(std::exp(-0.5)).epsilon(1e-10));
    CHECK(chisq_sf(7.3, 2) == doctest::Approx(std::exp(-3.65)).epsilon(1e-10));
    // dof 1: sf(x) = 2 (1 - Phi(sqrt(x)))
    CHECK(chisq_sf(4.0, 1) ==
          doctest::Approx(2.0 * (1.0 - normal_cdf(2.0))).epsilon(1e-10));
}

TEST_CASE("logistic helpers") {
    CHECK(logistic_cdf(0.0) == doctest::Approx(0.5));
    CHECK(logit(0.25) == doctest::Approx(std::log(1.0 / 3.0)).epsilon(1e-12));
    CHECK(logistic_cdf(logit(0.8)) == doctest::Approx(0.8).epsilon(1e-12));
}
