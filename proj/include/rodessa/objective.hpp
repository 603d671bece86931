#pragma once

// The diagonalwise objective: per-cell squared diagonal residuals r_i^(j),
// per-case residuals r_i, the two-level bounded loss, and the weights that
// the IRLS solver derives from them.

#include "rodessa/lowrank_fit.hpp"
#include "rodessa/robust_loss.hpp"
#include "rodessa/series.hpp"

namespace rodessa {

struct LossPair {
  LossSpec cell;  // rho_1
  LossSpec casewise;  // rho_2
};

/// sigma_1j per series (not squared) and sigma_2.
struct Scales {
  Vector cell;
  double casewise = 1.0;

  static Scales unit(std::size_t series_count) {
    return {Vector::Ones(static_cast<Eigen::Index>(series_count)), 1.0};
  }
};

/// r_i^(j) = (1/n_i) sum_a (x_i^(j) - xhat_ia^(j))^2, N x p.
Matrix diagonal_residuals(const Matrix& series, const Matrix& fitted, const EmbeddingSpec& spec);
Matrix diagonal_residuals(const Matrix& series, const LowRankFit& fit, const EmbeddingSpec& spec);

/// r_i = (1/p) sum_j sigma_1j^2 rho_1(r_i^(j) / sigma_1j^2)
Vector case_residuals(const Matrix& cell_residuals, const Vector& cell_scales,
                      const LossSpec& cell_loss);

/// sum_i p n_i sigma_2^2 rho_2(r_i / sigma_2^2) given the cell residuals.
double objective_from_residuals(const Matrix& cell_residuals, const EmbeddingSpec& spec,
                                const Scales& scales, const LossPair& losses);
double objective(const Matrix& series, const LowRankFit& fit, const EmbeddingSpec& spec,
                 const Scales& scales, const LossPair& losses);

/// w_c = rho_1'(r_i^(j) / sigma_1j^2)
Matrix cell_weights(const Matrix& cell_residuals, const Vector& cell_scales,
                    const LossSpec& cell_loss);
/// w_r = rho_2'(r_i / sigma_2^2)
Vector case_weights(const Vector& case_residuals, double case_scale, const LossSpec& case_loss);

/// L x K matrix W = T(w_c) (.) T(w_r): block j is the Hankel embedding of
/// column j of cell_weights times the embedding of case_weights.
Matrix assemble_weight_matrix(const Matrix& cell_weights, const Vector& case_weights,
                              const EmbeddingSpec& spec);

}  // namespace rodessa
