#include "rodessa/series.hpp"

#include "rodessa/error.hpp"

#include <algorithm>
#include <cmath>

namespace rodessa {

MultivariateSeries::MultivariateSeries(Matrix values, std::vector<std::string> names,
                                       std::vector<std::string> timestamps)
    : values_(std::move(values)), names_(std::move(names)), timestamps_(std::move(timestamps)) {
  if (values_.rows() < 2) throw Error(ErrorKind::Data, "series needs at least 2 time points");
  if (values_.cols() < 1) throw Error(ErrorKind::Data, "series needs at least one component");
  if (!values_.allFinite()) throw Error(ErrorKind::Data, "series contains non-finite values");
  if (names_.empty()) {
    for (Eigen::Index j = 0; j < values_.cols(); ++j) names_.push_back("x" + std::to_string(j + 1));
  }
  if (names_.size() != count()) throw Error(ErrorKind::Data, "one name per series required");
  if (!timestamps_.empty() && timestamps_.size() != length()) {
    throw Error(ErrorKind::Data, "one timestamp per time point required");
  }
}

double MultivariateSeries::at(std::size_t i, std::size_t j) const {
  if (i < 1 || i > length() || j < 1 || j > count()) {
    throw Error(ErrorKind::Index, "cell (" + std::to_string(i) + "," + std::to_string(j) + ")");
  }
  return values_(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(j - 1));
}

EmbeddingSpec::EmbeddingSpec(std::size_t window, std::size_t length, std::size_t series_count)
    : window_(window), length_(length), series_count_(series_count) {
  if (window <= 1 || window >= length) {
    throw Error(ErrorKind::InvalidWindow, "need 1 < L < N, got L=" + std::to_string(window) +
                                              " N=" + std::to_string(length));
  }
  if (series_count < 1) throw Error(ErrorKind::Argument, "series count must be positive");
}

std::size_t EmbeddingSpec::diagonal_size(std::size_t i) const noexcept {
  return std::min({i, window_, lagged(), length_ - i + 1});
}

TrajectoryMatrix embed(const Matrix& values, const EmbeddingSpec& spec) {
  if (static_cast<std::size_t>(values.rows()) != spec.length() ||
      static_cast<std::size_t>(values.cols()) != spec.series_count()) {
    throw Error(ErrorKind::Shape, "series does not match embedding");
  }
  const auto L = static_cast<Eigen::Index>(spec.window());
  const auto Ku = static_cast<Eigen::Index>(spec.lagged());
  Matrix X(L, Ku * values.cols());
  for (Eigen::Index j = 0; j < values.cols(); ++j) {
    for (Eigen::Index k = 0; k < Ku; ++k) {
      X.col(j * Ku + k) = values.col(j).segment(k, L);
    }
  }
  return {std::move(X), spec};
}

TrajectoryMatrix embed(const MultivariateSeries& series, std::size_t window) {
  return embed(series.values(), EmbeddingSpec(window, series.length(), series.count()));
}

std::pair<std::size_t, std::size_t> diagonal_cell(std::size_t i, std::size_t a, std::size_t j,
                                                  const EmbeddingSpec& spec) {
  const std::size_t n = spec.diagonal_size(i);
  const std::size_t row = std::min(spec.window(), i) + 1 - a;
  const std::size_t col = std::min(spec.lagged(), i) - (n - a) + spec.lagged() * (j - 1);
  return {row, col};
}

DiagonalIndex antidiagonal_cells(std::size_t i, std::size_t j, const EmbeddingSpec& spec) {
  if (i < 1 || i > spec.length()) throw Error(ErrorKind::Index, "time index " + std::to_string(i));
  if (j < 1 || j > spec.series_count()) {
    throw Error(ErrorKind::Index, "series index " + std::to_string(j));
  }
  DiagonalIndex out{i, j, spec.diagonal_size(i), {}};
  out.cells.reserve(out.size);
  for (std::size_t a = 1; a <= out.size; ++a) out.cells.push_back(diagonal_cell(i, a, j, spec));
  return out;
}

Matrix diagonal_average(const Matrix& fit, const EmbeddingSpec& spec) {
  const auto L = static_cast<Eigen::Index>(spec.window());
  const auto Ku = static_cast<Eigen::Index>(spec.lagged());
  const auto p = static_cast<Eigen::Index>(spec.series_count());
  if (fit.rows() != L || fit.cols() != Ku * p) {
    throw Error(ErrorKind::Shape, "fit is " + std::to_string(fit.rows()) + "x" +
                                      std::to_string(fit.cols()) + ", embedding expects " +
                                      std::to_string(L) + "x" + std::to_string(Ku * p));
  }
  const auto N = static_cast<Eigen::Index>(spec.length());
  Matrix out = Matrix::Zero(N, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index k = 0; k < Ku; ++k) {
      for (Eigen::Index l = 0; l < L; ++l) out(l + k, j) += fit(l, j * Ku + k);
    }
  }
  for (Eigen::Index i = 0; i < N; ++i) {
    out.row(i) /= static_cast<double>(spec.diagonal_size(static_cast<std::size_t>(i) + 1));
  }
  return out;
}

MultivariateSeries reconstruct(const Matrix& fit, const EmbeddingSpec& spec,
                               const MultivariateSeries& like) {
  return MultivariateSeries(diagonal_average(fit, spec), like.names(), like.timestamps());
}

double predicted_cell(const Matrix& U, const Matrix& V, std::size_t i, std::size_t a,
                      std::size_t j, const EmbeddingSpec& spec) {
  if (i < 1 || i > spec.length() || j < 1 || j > spec.series_count()) {
    throw Error(ErrorKind::Index, "predicted cell outside the series");
  }
  if (a < 1 || a > spec.diagonal_size(i)) {
    throw Error(ErrorKind::Index, "diagonal position " + std::to_string(a));
  }
  const auto [row, col] = diagonal_cell(i, a, j, spec);
  return U.row(static_cast<Eigen::Index>(row - 1)).dot(V.row(static_cast<Eigen::Index>(col - 1)));
}

}  // namespace rodessa
