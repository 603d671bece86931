#pragma once

#include "rodessa/series.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace rodessa::test {

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed,
                            double scale = 1.0) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist(0.0, scale);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(gen);
  return m;
}

// Trajectory matrix built straight from the definition: block j, entry
// (l, k) holds x_{l+k-1}^{(j)} in 1-based indexing.
inline Matrix naive_embed(const Matrix& x, std::size_t L) {
  const std::size_t N = static_cast<std::size_t>(x.rows());
  const std::size_t Ku = N - L + 1;
  Matrix out(static_cast<Eigen::Index>(L), static_cast<Eigen::Index>(Ku) * x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    for (std::size_t l = 1; l <= L; ++l)
      for (std::size_t k = 1; k <= Ku; ++k)
        out(static_cast<Eigen::Index>(l - 1), j * static_cast<Eigen::Index>(Ku) +
                                                  static_cast<Eigen::Index>(k - 1)) =
            x(static_cast<Eigen::Index>(l + k - 2), j);
  return out;
}

// Hankel series with a sinusoid per component.
inline Matrix harmonic(std::size_t N, const std::vector<double>& amp,
                       const std::vector<double>& phase, double period = 10.0) {
  Matrix x(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(amp.size()));
  for (std::size_t j = 0; j < amp.size(); ++j)
    for (std::size_t i = 1; i <= N; ++i)
      x(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(j)) =
          amp[j] * std::cos(2.0 * M_PI * static_cast<double>(i) / period + phase[j]);
  return x;
}

}  // namespace rodessa::test
