#include "rodessa/objective.hpp"

#include "rodessa/error.hpp"

namespace rodessa {

namespace {

void check_series(const Matrix& series, const EmbeddingSpec& spec) {
  if (static_cast<std::size_t>(series.rows()) != spec.length() ||
      static_cast<std::size_t>(series.cols()) != spec.series_count()) {
    throw Error(ErrorKind::Shape, "series does not match embedding");
  }
}

}  // namespace

Matrix diagonal_residuals(const Matrix& series, const Matrix& fitted, const EmbeddingSpec& spec) {
  check_series(series, spec);
  const auto L = static_cast<Eigen::Index>(spec.window());
  const auto Ku = static_cast<Eigen::Index>(spec.lagged());
  const auto p = series.cols();
  if (fitted.rows() != L || fitted.cols() != Ku * p) {
    throw Error(ErrorKind::Shape, "fitted matrix does not match embedding");
  }
  Matrix r = Matrix::Zero(series.rows(), p);
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index k = 0; k < Ku; ++k) {
      const auto col = fitted.col(j * Ku + k);
      for (Eigen::Index l = 0; l < L; ++l) {
        const double d = series(l + k, j) - col(l);
        r(l + k, j) += d * d;
      }
    }
  }
  for (Eigen::Index i = 0; i < r.rows(); ++i) {
    r.row(i) /= static_cast<double>(spec.diagonal_size(static_cast<std::size_t>(i) + 1));
  }
  return r;
}

Matrix diagonal_residuals(const Matrix& series, const LowRankFit& fit, const EmbeddingSpec& spec) {
  if (static_cast<std::size_t>(fit.U.rows()) != spec.window() ||
      static_cast<std::size_t>(fit.V.rows()) != spec.columns() || fit.U.cols() != fit.V.cols()) {
    throw Error(ErrorKind::Shape, "factor shapes do not match embedding");
  }
  return diagonal_residuals(series, fit.product(), spec);
}

Vector case_residuals(const Matrix& cell_residuals, const Vector& cell_scales,
                      const LossSpec& cell_loss) {
  const auto p = cell_residuals.cols();
  if (cell_scales.size() != p) throw Error(ErrorKind::Shape, "one cell scale per series required");
  Vector r = Vector::Zero(cell_residuals.rows());
  for (Eigen::Index j = 0; j < p; ++j) {
    const double s2 = cell_scales(j) * cell_scales(j);
    if (!(s2 > 0.0)) throw Error(ErrorKind::Argument, "cell scales must be positive");
    for (Eigen::Index i = 0; i < r.size(); ++i) r(i) += s2 * rho(cell_loss, cell_residuals(i, j) / s2);
  }
  return r / static_cast<double>(p);
}

double objective_from_residuals(const Matrix& cell_residuals, const EmbeddingSpec& spec,
                                const Scales& scales, const LossPair& losses) {
  const Vector r = case_residuals(cell_residuals, scales.cell, losses.cell);
  const double s2 = scales.casewise * scales.casewise;
  if (!(s2 > 0.0)) throw Error(ErrorKind::Argument, "case scale must be positive");
  const auto p = static_cast<double>(spec.series_count());
  double total = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    const auto n = static_cast<double>(spec.diagonal_size(static_cast<std::size_t>(i) + 1));
    total += p * n * s2 * rho(losses.casewise, r(i) / s2);
  }
  return total;
}

double objective(const Matrix& series, const LowRankFit& fit, const EmbeddingSpec& spec,
                 const Scales& scales, const LossPair& losses) {
  return objective_from_residuals(diagonal_residuals(series, fit, spec), spec, scales, losses);
}

Matrix cell_weights(const Matrix& cell_residuals, const Vector& cell_scales,
                    const LossSpec& cell_loss) {
  if (cell_scales.size() != cell_residuals.cols()) {
    throw Error(ErrorKind::Shape, "one cell scale per series required");
  }
  Matrix w(cell_residuals.rows(), cell_residuals.cols());
  for (Eigen::Index j = 0; j < w.cols(); ++j) {
    const double s2 = cell_scales(j) * cell_scales(j);
    for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = rho_prime(cell_loss, cell_residuals(i, j) / s2);
  }
  return w;
}

Vector case_weights(const Vector& case_residuals, double case_scale, const LossSpec& case_loss) {
  const double s2 = case_scale * case_scale;
  Vector w(case_residuals.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = rho_prime(case_loss, case_residuals(i) / s2);
  return w;
}

Matrix assemble_weight_matrix(const Matrix& cell_weights, const Vector& case_weights,
                              const EmbeddingSpec& spec) {
  const auto N = static_cast<Eigen::Index>(spec.length());
  const auto p = static_cast<Eigen::Index>(spec.series_count());
  if (cell_weights.rows() != N || cell_weights.cols() != p || case_weights.size() != N) {
    throw Error(ErrorKind::Shape, "weights do not match embedding");
  }
  const auto L = static_cast<Eigen::Index>(spec.window());
  const auto Ku = static_cast<Eigen::Index>(spec.lagged());
  Matrix W(L, Ku * p);
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index k = 0; k < Ku; ++k) {
      for (Eigen::Index l = 0; l < L; ++l) W(l, j * Ku + k) = cell_weights(l + k, j) * case_weights(l + k);
    }
  }
  return W;
}

}  // namespace rodessa
