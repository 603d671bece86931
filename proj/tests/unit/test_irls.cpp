#include "doctest.h"

#include "rodessa/error.hpp"
#include "rodessa/irls.hpp"
#include "rodessa/wls.hpp"
#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace rodessa;

namespace {

constexpr std::size_t kN = 70;
constexpr std::size_t kL = 35;

Matrix scenario3() { return test::harmonic(kN, {20, 30, 40, 50}, {0, M_PI / 5, 0, M_PI / 5}); }

Matrix noisy(const Matrix& s, double sigma, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> d(0.0, sigma);
  Matrix x = s;
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] += d(gen);
  return x;
}

RodessaConfig config() {
  RodessaConfig c;
  c.rank = 2;
  c.cell_tuning = 4.3;
  c.case_tuning = 2.0;
  return c;
}

}  // namespace

TEST_CASE("IRLS on clean harmonic data") {
  const Matrix s = scenario3();
  const Matrix x = noisy(s, 1.0, 1);
  const RodessaResult r = irls_fit(MultivariateSeries(x), kL, config());
  CHECK(r.converged);
  const double re = (r.reconstruction.values() - s).squaredNorm() / static_cast<double>(s.size());
  CHECK(re < 1.0);
  CHECK(r.fit.rank() == 2);
  CHECK(r.objective_trace.size() == static_cast<std::size_t>(r.iterations) + 1);
}

TEST_CASE("IRLS objective trace never increases") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    Matrix x = noisy(scenario3(), 20.0, 100 + seed);
    std::mt19937_64 gen(seed);
    for (int k = 0; k < 30; ++k) x.data()[gen() % static_cast<std::uint64_t>(x.size())] += 160.0;
    const RodessaResult r = irls_fit(MultivariateSeries(x), kL, config());
    const double slack = 1e-10 * r.objective_trace.front();
    for (std::size_t t = 1; t < r.objective_trace.size(); ++t) {
      CHECK(r.objective_trace[t] <= r.objective_trace[t - 1] + slack);
    }
  }
}

TEST_CASE("IRLS downweights a single spike") {
  Matrix x = noisy(scenario3(), 1.0, 2);
  x(30, 2) += 8.0 * 20.0;
  const RodessaResult r = irls_fit(MultivariateSeries(x), kL, config());
  Vector column = r.weights.cell.col(2);
  std::vector<double> others(column.data(), column.data() + column.size());
  others.erase(others.begin() + 30);
  std::sort(others.begin(), others.end());
  CHECK(r.weights.cell(30, 2) < others.front());
  CHECK(r.weights.cell(30, 2) < others[others.size() / 2]);
}

TEST_CASE("weights stay within their bounds") {
  Matrix x = noisy(scenario3(), 20.0, 3);
  for (int i = 0; i < 10; ++i) x.row(5 * i).array() += 160.0;
  const RodessaConfig cfg = config();
  const RodessaResult r = irls_fit(MultivariateSeries(x), kL, cfg);
  CHECK(r.weights.cell.minCoeff() >= 0.0);
  CHECK(r.weights.cell.maxCoeff() <= 3.0 / (cfg.cell_tuning * cfg.cell_tuning) + 1e-15);
  CHECK(r.weights.casewise.minCoeff() >= 0.0);
  CHECK(r.weights.casewise.maxCoeff() <= 3.0 / (cfg.case_tuning * cfg.case_tuning) + 1e-15);
}

TEST_CASE("iteration limit without convergence") {
  RodessaConfig cfg = config();
  cfg.max_iterations = 2;
  cfg.tolerance = 1e-300;
  const RodessaResult r = irls_fit(MultivariateSeries(noisy(scenario3(), 20.0, 4)), kL, cfg);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 2);
  CHECK_FALSE(r.warnings.empty());
}

TEST_CASE("rank is validated") {
  RodessaConfig cfg = config();
  cfg.rank = 36;
  CHECK_THROWS_AS(irls_fit(MultivariateSeries(scenario3()), kL, cfg), Error);
}

TEST_CASE("scale estimation") {
  const EmbeddingSpec spec(kL, kN, 4);
  const auto rho1 = LossSpec::sqrt_biweight(4.3);
  SUBCASE("exact initial fit takes the degenerate path") {
    const Matrix s = scenario3();
    const LowRankFit exact = svd_lowrank(embed(s, spec).data, 2);
    const ScaleEstimate e = estimate_scales(s, exact, spec, rho1);
    CHECK_FALSE(e.warnings.empty());
    CHECK(e.scales.cell.minCoeff() > 0.0);
    CHECK(e.scales.casewise > 0.0);
  }
  SUBCASE("scaling one series scales its cell scale") {
    const Matrix x = noisy(scenario3(), 20.0, 5);
    const LowRankFit fit = svd_lowrank(embed(x, spec).data, 2);
    const ScaleEstimate base = estimate_scales(x, fit, spec, rho1);
    Matrix x2 = x;
    x2.col(1) *= 3.0;
    LowRankFit fit2 = fit;
    fit2.V.middleRows(36, 36) *= 3.0;
    const ScaleEstimate scaled = estimate_scales(x2, fit2, spec, rho1);
    CHECK(scaled.scales.cell(1) == doctest::Approx(3.0 * base.scales.cell(1)).epsilon(1e-9));
    CHECK(scaled.scales.cell(0) == doctest::Approx(base.scales.cell(0)).epsilon(1e-12));
  }
  SUBCASE("four-series simulation instance") {
    const Matrix x = noisy(scenario3(), 20.0, 6);
    const ScaleEstimate e = estimate_scales(x, svd_lowrank(embed(x, spec).data, 2), spec, rho1);
    CHECK(std::isfinite(e.scales.casewise));
    CHECK(e.scales.casewise > 0.0);
    CHECK(e.warnings.empty());
  }
}

TEST_CASE("converged fits satisfy the stationarity conditions") {
  RodessaConfig cfg = config();
  cfg.tolerance = 1e-12;
  cfg.max_iterations = 5000;
  Matrix x = noisy(scenario3(), 20.0, 7);
  x(10, 0) += 160;
  x(40, 3) -= 160;
  const RodessaResult r = irls_fit(MultivariateSeries(x), kL, cfg);
  REQUIRE(r.converged);
  const Matrix X = embed(x, r.spec).data;
  const auto g = wls_gradient_norms(r.fit, WeightedProblem(X, r.weights.W));
  CHECK(g.rows < 1e-6 * X.norm());
  CHECK(g.columns < 1e-6 * X.norm());
}
