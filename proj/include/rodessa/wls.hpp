#pragma once

// Alternating weighted least squares for
//   sum_{l,k} w_lk (X_lk - sum_r u_lr v_kr)^2
// with one small q x q solve per column (V step) or per row (U step).

#include "rodessa/lowrank_fit.hpp"

namespace rodessa {

/// Data and weights, with transposed copies so that both column and row
/// solves read contiguous memory.
class WeightedProblem {
 public:
  WeightedProblem(const Matrix& data, Matrix weights);

  const Matrix& data() const noexcept { return data_; }
  const Matrix& weights() const noexcept { return weights_; }
  const Matrix& data_t() const noexcept { return data_t_; }
  const Matrix& weights_t() const noexcept { return weights_t_; }

 private:
  Matrix data_;
  Matrix weights_;
  Matrix data_t_;
  Matrix weights_t_;
};

struct SolveStats {
  int singular_solves = 0;
};

/// Relative eigenvalue cutoff below which a Gram matrix direction is treated
/// as null and solved by pseudo-inverse.
inline constexpr double kPseudoInverseCutoff = 1e-12;

/// v^k = (U^T W_k U)^+ U^T W_k X_k for every column k.
Matrix wls_update_V(const Matrix& U, const WeightedProblem& problem, SolveStats* stats = nullptr);
/// u^l = (V^T W^l V)^+ V^T W^l X^l for every row l.
Matrix wls_update_U(const Matrix& V, const WeightedProblem& problem, SolveStats* stats = nullptr);

Matrix wls_update_V(const Matrix& U, const Matrix& W, const Matrix& X);
Matrix wls_update_U(const Matrix& V, const Matrix& W, const Matrix& X);

double wls_objective(const LowRankFit& fit, const WeightedProblem& problem);

/// Block gradient norms of the weighted objective at a fit: the largest
/// ||V^T W^l (V u^l - X^l)|| over rows and ||U^T W_k (U v^k - X_k)|| over columns.
struct GradientNorms {
  double rows = 0.0;
  double columns = 0.0;
};
GradientNorms wls_gradient_norms(const LowRankFit& fit, const WeightedProblem& problem);

/// Solve G x = b through the eigendecomposition of symmetric G, dropping
/// directions below the relative cutoff. Returns true when any was dropped.
bool pseudo_solve(const Matrix& gram, const Vector& rhs, Vector& out);

}  // namespace rodessa
