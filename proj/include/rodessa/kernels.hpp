#pragma once

// Reduction kernels used by the weighted least squares solvers. Each kernel
// has a scalar reference and a vector variant; the variant is picked once at
// startup from CPU features and may be overridden with RODESSA_SIMD=scalar.

#include <cstddef>
#include <span>
#include <string_view>

namespace rodessa::kernels {

enum class Level { Scalar, Avx2 };

struct Table {
  // sum a_i b_i
  double (*dot)(const double* a, const double* b, std::size_t n);
  // sum w_i a_i b_i
  double (*weighted_dot)(const double* w, const double* a, const double* b, std::size_t n);
  // sum (a_i - b_i)^2
  double (*sum_sq_diff)(const double* a, const double* b, std::size_t n);
  // sum w_i (a_i - b_i)^2
  double (*weighted_sq_diff)(const double* w, const double* a, const double* b, std::size_t n);
};

const Table& scalar_table() noexcept;
// nullptr when the build has no AVX2 variant.
const Table* avx2_table() noexcept;

bool cpu_supports(Level level) noexcept;
Level active_level() noexcept;
/// Pins the dispatch level; throws when the CPU lacks it.
void set_level(Level level);
std::string_view level_name(Level level) noexcept;

const Table& active() noexcept;

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}
inline double weighted_dot(std::span<const double> w, std::span<const double> a,
                           std::span<const double> b) {
  return active().weighted_dot(w.data(), a.data(), b.data(), w.size());
}
inline double sum_sq_diff(std::span<const double> a, std::span<const double> b) {
  return active().sum_sq_diff(a.data(), b.data(), a.size());
}
inline double weighted_sq_diff(std::span<const double> w, std::span<const double> a,
                               std::span<const double> b) {
  return active().weighted_sq_diff(w.data(), a.data(), b.data(), w.size());
}

}  // namespace rodessa::kernels
