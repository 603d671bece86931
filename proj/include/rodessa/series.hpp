#pragma once

// Multivariate series container, stacked-Hankel embedding and diagonal
// averaging. Domain indices (time i, series j, row l, column k) are 1-based.

#include <Eigen/Core>

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace rodessa {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// p univariate series of common length N. Row i holds case x_i, column j
/// holds series j. Values must be finite.
class MultivariateSeries {
 public:
  MultivariateSeries() = default;
  explicit MultivariateSeries(Matrix values, std::vector<std::string> names = {},
                              std::vector<std::string> timestamps = {});

  std::size_t length() const noexcept { return static_cast<std::size_t>(values_.rows()); }
  std::size_t count() const noexcept { return static_cast<std::size_t>(values_.cols()); }

  const Matrix& values() const noexcept { return values_; }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::vector<std::string>& timestamps() const noexcept { return timestamps_; }

  /// x_i^{(j)}, 1-based.
  double at(std::size_t i, std::size_t j) const;

 private:
  Matrix values_;
  std::vector<std::string> names_;
  std::vector<std::string> timestamps_;
};

/// Window length L for series of length N; K_u = N - L + 1 lagged vectors per
/// series and K = p * K_u columns overall.
class EmbeddingSpec {
 public:
  EmbeddingSpec(std::size_t window, std::size_t length, std::size_t series_count);

  std::size_t window() const noexcept { return window_; }
  std::size_t length() const noexcept { return length_; }
  std::size_t series_count() const noexcept { return series_count_; }
  std::size_t lagged() const noexcept { return length_ - window_ + 1; }
  std::size_t columns() const noexcept { return series_count_ * lagged(); }

  /// n_i = min(i, L, K_u, N - i + 1)
  std::size_t diagonal_size(std::size_t i) const noexcept;

  bool operator==(const EmbeddingSpec&) const = default;

 private:
  std::size_t window_;
  std::size_t length_;
  std::size_t series_count_;
};

struct TrajectoryMatrix {
  Matrix data;  // L x K
  EmbeddingSpec spec;
};

struct DiagonalIndex {
  std::size_t time;
  std::size_t series;
  std::size_t size;
  std::vector<std::pair<std::size_t, std::size_t>> cells;  // 1-based (l, k)
};

TrajectoryMatrix embed(const MultivariateSeries& series, std::size_t window);
TrajectoryMatrix embed(const Matrix& values, const EmbeddingSpec& spec);

DiagonalIndex antidiagonal_cells(std::size_t i, std::size_t j, const EmbeddingSpec& spec);

/// Global 1-based (row, column) of the a-th cell of anti-diagonal A_i in block j.
std::pair<std::size_t, std::size_t> diagonal_cell(std::size_t i, std::size_t a, std::size_t j,
                                                  const EmbeddingSpec& spec);

/// Hankelization: averages every anti-diagonal of every block. Returns N x p.
Matrix diagonal_average(const Matrix& fit, const EmbeddingSpec& spec);

MultivariateSeries reconstruct(const Matrix& fit, const EmbeddingSpec& spec,
                               const MultivariateSeries& like);

/// sum_r u_{i* r} v_{a* r}
double predicted_cell(const Matrix& U, const Matrix& V, std::size_t i, std::size_t a,
                      std::size_t j, const EmbeddingSpec& spec);

}  // namespace rodessa
