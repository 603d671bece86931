#include "doctest.h"

#include "rodessa/error.hpp"
#include "rodessa/forecast.hpp"
#include "rodessa/lowrank.hpp"
#include "support.hpp"

#include <Eigen/LU>

#include <cmath>

using namespace rodessa;

namespace {

Matrix scenario3(std::size_t N) {
  return test::harmonic(N, {20, 30, 40, 50}, {0, M_PI / 5, 0, M_PI / 5});
}

}  // namespace

TEST_CASE("recurrence coefficients") {
  SUBCASE("constant series, rank one") {
    const Matrix x = Matrix::Constant(20, 1, 3.5);
    const EmbeddingSpec spec(5, 20, 1);
    const auto model = recurrence_coefficients(svd_lowrank(embed(x, spec).data, 1));
    // u = 1/sqrt(5) everywhere: nu^2 = 1/5 and every coefficient is (1/5)/(4/5).
    CHECK(model.verticality == doctest::Approx(0.2));
    for (Eigen::Index l = 0; l < 4; ++l) CHECK(model.coefficients(l) == doctest::Approx(0.25));
    const Matrix f = forecast(model, x, 7);
    CHECK((f.array() - 3.5).abs().maxCoeff() < 1e-12);
  }
  SUBCASE("gauge invariance") {
    const LowRankFit fit{test::random_matrix(8, 2, 1), test::random_matrix(12, 2, 2)};
    Matrix A(2, 2);
    A << 1.5, -0.2, 0.4, 0.9;
    const LowRankFit moved{fit.U * A, fit.V * A.inverse().transpose()};
    const auto a = recurrence_coefficients(fit);
    const auto b = recurrence_coefficients(moved);
    CHECK((a.coefficients - b.coefficients).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(a.verticality == doctest::Approx(b.verticality));
  }
  SUBCASE("harmonic signal satisfies the recurrence") {
    const Matrix s = scenario3(70);
    const EmbeddingSpec spec(35, 70, 4);
    const auto model = recurrence_coefficients(svd_lowrank(embed(s, spec).data, 2));
    CHECK(model.coefficients.size() == 34);
    double worst = 0.0;
    for (Eigen::Index i = 34; i < 70; ++i) {
      const Vector pred = (model.coefficients.transpose() * s.middleRows(i - 34, 34)).transpose();
      worst = std::max(worst, (pred - s.row(i).transpose()).cwiseAbs().maxCoeff());
    }
    CHECK(worst < 1e-8);
  }
  SUBCASE("vertical subspace") {
    Matrix U = Matrix::Zero(4, 1);
    U(3, 0) = 1.0;
    CHECK_THROWS_AS(recurrence_coefficients({U, Matrix::Ones(6, 1)}), Error);
    try {
      recurrence_coefficients({U, Matrix::Ones(6, 1)});
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Verticality);
    }
  }
  SUBCASE("rank deficient product uses its nonzero directions") {
    const Matrix u = test::random_matrix(6, 1, 3), v = test::random_matrix(9, 1, 4),
                 w = test::random_matrix(9, 1, 5);
    Matrix U(6, 2), V(9, 2);
    U << u, 2.0 * u;
    V << v, w;  // U V^T = u (v + 2w)^T
    const auto deficient = recurrence_coefficients({U, V});
    const auto one = recurrence_coefficients({u, v + 2.0 * w});
    CHECK(deficient.rank == 1);
    CHECK((deficient.coefficients - one.coefficients).norm() < 1e-10);
    V << v, -0.5 * v;  // U V^T = 0
    CHECK_THROWS_AS(recurrence_coefficients({U, V}), Error);
  }
}

TEST_CASE("recurrent forecasts") {
  const Matrix s = scenario3(90);
  const Matrix past = s.topRows(70);
  const EmbeddingSpec spec(35, 70, 4);
  const auto model = recurrence_coefficients(svd_lowrank(embed(past, spec).data, 2));
  SUBCASE("noiseless harmonic matches its analytic continuation") {
    const Matrix f = forecast(model, past, 20);
    CHECK(f.rows() == 20);
    CHECK((f - s.bottomRows(20)).cwiseAbs().maxCoeff() < 1e-6);
  }
  SUBCASE("boundaries") {
    CHECK(forecast(model, past, 0).rows() == 0);
    CHECK(forecast(model, Matrix::Zero(70, 4), 5) == Matrix::Zero(5, 4));
    CHECK_THROWS_AS(forecast(model, past, -1), Error);
    CHECK_THROWS_AS(forecast(model, past.topRows(20), 3), Error);
  }
  SUBCASE("linear in the reconstruction") {
    const Matrix noisy = past + test::random_matrix(70, 4, 9, 5.0);
    const Matrix a = forecast(model, noisy, 12);
    const Matrix b = forecast(model, -2.5 * noisy, 12);
    CHECK((b + 2.5 * a).cwiseAbs().maxCoeff() < 1e-9 * a.cwiseAbs().maxCoeff());
  }
  SUBCASE("one series at a time gives the same numbers") {
    const Matrix all = forecast(model, past, 10);
    for (Eigen::Index j = 0; j < 4; ++j) {
      CHECK((forecast(model, Matrix(past.col(j)), 10) - all.col(j)).norm() < 1e-12);
    }
  }
}
