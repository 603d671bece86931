#include "doctest.h"

#include "rodessa/error.hpp"
#include "rodessa/robust_loss.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

using namespace rodessa;

TEST_CASE("biweight values") {
  const auto bw = LossSpec::biweight(4.685);
  CHECK(rho(bw, 0.0) == 0.0);
  CHECK(rho(bw, 5.0) == 1.0);
  CHECK(rho(bw, -5.0) == 1.0);
  // 1 - (1 - 4/4.685^2)^3, evaluated independently.
  CHECK(rho(bw, 2.0) == doctest::Approx(0.453135749667392).epsilon(1e-12));
  CHECK(rho(bw, -2.0) == rho(bw, 2.0));
}

TEST_CASE("huber values") {
  const auto h = LossSpec::huber();
  CHECK(rho(h, 1.0) == doctest::Approx(0.5));
  CHECK(rho(h, 2.0) == doctest::Approx(1.345 * 2.0 - 0.5 * 1.345 * 1.345));
  CHECK(rho_prime(h, 5.0) == doctest::Approx(1.345));
  CHECK(rho_prime(h, -0.3) == doctest::Approx(-0.3));
}

TEST_CASE("sqrt-biweight derivative") {
  for (double c : {1.0, 2.5, 4.685}) {
    const auto s = LossSpec::sqrt_biweight(c);
    CHECK(rho_prime(s, c * c) == 0.0);
    CHECK(rho_prime(s, 2.0 * c * c) == 0.0);
    CHECK(rho_prime(s, 0.0) == doctest::Approx(3.0 / (c * c)));
    CHECK(max_weight(s) == doctest::Approx(3.0 / (c * c)));
    const double t = c * c / 2.0, h = 1e-5;
    const double fd = (rho(s, t + h) - rho(s, t - h)) / (2.0 * h);
    CHECK(std::abs(fd - rho_prime(s, t)) < 1e-6);
    const double fd2 = (rho_prime(s, t + h) - rho_prime(s, t - h)) / (2.0 * h);
    CHECK(std::abs(fd2 - rho_second(s, t)) < 1e-6);
    CHECK(rho(s, c * c) == 1.0);
    CHECK(rho(s, t) == doctest::Approx(rho(LossSpec::biweight(c), std::sqrt(t))));
  }
  CHECK_THROWS_AS(rho(LossSpec::sqrt_biweight(2.0), -1.0), Error);
  CHECK_THROWS_AS(rho_prime(LossSpec::sqrt_biweight(2.0), -1e-9), Error);
  CHECK_THROWS_AS(rho(LossSpec{LossKind::SqrtBiweight, 0.0}, 1.0), Error);
}

TEST_CASE("sqrt-biweight is monotone, bounded and concave") {
  const auto s = LossSpec::sqrt_biweight(2.0);
  double prev = 0.0;
  for (int k = 0; k <= 1000; ++k) {
    const double t = 6.0 * k / 1000.0;
    const double v = rho(s, t);
    CHECK(v >= prev);
    CHECK(v <= 1.0);
    CHECK(rho_second(s, t) <= 0.0);
    prev = v;
  }
  // Midpoint concavity on random pairs.
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> d(0.0, 6.0);
  for (int k = 0; k < 500; ++k) {
    const double a = d(gen), b = d(gen);
    CHECK(rho(s, 0.5 * (a + b)) >= 0.5 * (rho(s, a) + rho(s, b)) - 1e-15);
  }
}

TEST_CASE("M-scale") {
  SUBCASE("constant sample") {
    // rho_c(t*) = 1/2 at c = 1.548 gives 1/t* = 1.42226323330455 (root-found offline).
    for (double a : {0.1, 1.0, 37.0}) {
      const std::vector<double> z(9, a);
      CHECK(mscale(z) == doctest::Approx(1.4222632333045542 * a).epsilon(1e-9));
    }
  }
  SUBCASE("equation residual, equivariance and permutation invariance") {
    std::mt19937_64 gen(2);
    std::normal_distribution<double> nd;
    std::vector<double> z(301);
    for (auto& v : z) v = std::abs(nd(gen));
    z[3] = 0.0;
    const double s = mscale(z);
    CHECK(std::abs(mscale_equation(z, s, {}) - kMScaleDelta) < 1e-8);
    std::vector<double> scaled = z;
    for (auto& v : scaled) v *= 7.5;
    CHECK(mscale(scaled) == doctest::Approx(7.5 * s).epsilon(1e-9));
    std::shuffle(z.begin(), z.end(), gen);
    CHECK(mscale(z) == doctest::Approx(s).epsilon(1e-12));
  }
  SUBCASE("normal consistency") {
    std::mt19937_64 gen(20240);
    std::normal_distribution<double> nd;
    std::vector<double> z(100000);
    for (auto& v : z) v = std::abs(nd(gen));
    const double s = mscale(z);
    CHECK(s > 0.95);
    CHECK(s < 1.05);
  }
  SUBCASE("degenerate samples") {
    CHECK_THROWS_AS(mscale(std::vector<double>{0.0, 0.0, 0.0}), Error);
    try {
      mscale(std::vector<double>{0.0, 0.0});
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::DegenerateScale);
    }
    try {
      mscale(std::vector<double>{0.0, 0.0, 0.0, 1.0});
      FAIL("expected bracketing failure");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Convergence);
    }
    CHECK_THROWS_AS(mscale(std::vector<double>{}), Error);
  }
  SUBCASE("half zeros sits on the plateau") {
    const std::vector<double> z{0.0, 0.0, 1.0, 2.0};
    const double s = mscale(z);
    CHECK(s > 0.0);
    CHECK(std::abs(mscale_equation(z, s, {}) - 0.5) < 1e-8);
  }
}
