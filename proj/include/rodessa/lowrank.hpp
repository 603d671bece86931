#pragma once

// Candidate rank-q fits of a trajectory matrix used to start the IRLS solver
// (and, on their own, as the classical and competing robust SSA
// decompositions).

#include "rodessa/lowrank_fit.hpp"
#include "rodessa/robust_loss.hpp"

#include <optional>
#include <string>
#include <vector>

namespace rodessa {

/// Truncated SVD: U = U~_q D_q^{1/2}, V = V~_q D_q^{1/2}.
LowRankFit svd_lowrank(const Matrix& X, Eigen::Index rank);

struct L1Options {
  double tolerance = 1e-8;   // relative change of U V^T
  int max_iterations = 200;
  /// Smoothing floor as a fraction of ||X||_F / sqrt(LK).
  double floor_fraction = 1e-8;
};

struct IterativeFit {
  LowRankFit fit;
  std::vector<double> trace;  // per-iteration objective, starting value first
  int iterations = 0;
  bool converged = false;
  Warnings warnings;
};

/// Rank-q local minimizer of sum |X - U V^T| by IRLS with weights
/// 1 / max(|R|, eps), started from the SVD fit. The trace records the
/// eps-smoothed L1 objective, which each sweep cannot increase.
IterativeFit l1_lowrank(const Matrix& X, Eigen::Index rank, const L1Options& options = {});

/// Smoothed absolute value used by l1_lowrank: |r| above eps, quadratic below.
double smoothed_abs(double r, double eps);

struct PcpOptions {
  std::optional<double> lambda;  // default 1 / sqrt(max(L, K))
  double tolerance = 1e-7;       // ||X - A - E||_F / ||X||_F
  int max_iterations = 1000;
  double mu_growth = 1.5;
};

struct PcpResult {
  Matrix lowrank;
  Matrix sparse;
  int iterations = 0;
  bool converged = false;
  Warnings warnings;
};

/// Principal component pursuit min ||A||_* + lambda ||E||_1 s.t. A + E = X by
/// the inexact augmented Lagrangian method.
PcpResult rpca_pcp(const Matrix& X, const PcpOptions& options = {});

/// rpca_pcp followed by a rank-q truncated SVD of the low-rank part.
LowRankFit pcp_lowrank(const Matrix& X, Eigen::Index rank, const PcpOptions& options = {},
                       Warnings* warnings = nullptr);

/// 1.4826 * median |R - median(R)| over all entries.
double mad_scale(const Matrix& R);

struct BiweightOptions {
  double tolerance = 1e-6;  // relative change of U V^T
  int max_iterations = 100;
};

/// sum_lk rho_c(R_lk / sigma) with Tukey's biweight and a fixed scale.
double biweight_objective(const Matrix& X, const LowRankFit& fit, double tuning, double scale);

/// Local minimizer of biweight_objective by IRLS from `start`, with weights
/// (1 - R^2 / (c sigma)^2)_+^2. The trace is the objective, non-increasing.
IterativeFit biweight_lowrank(const Matrix& X, const LowRankFit& start, double tuning,
                              double scale, const BiweightOptions& options = {});

struct Candidate {
  std::string name;
  LowRankFit fit;
};

struct Selection {
  std::size_t index = 0;  // into candidates; equals candidates.size() on fallback
  LowRankFit fit;
  std::vector<std::optional<double>> scales;  // M-scale per candidate, empty when degenerate
  Warnings warnings;
};

/// Picks the candidate whose diagonal residuals sqrt(r_i^(j)) have the
/// smallest M-scale; ties go to the earlier candidate. When no candidate has
/// a usable scale the SVD fit of X is returned.
Selection select_initializer(const Matrix& series, const Matrix& X,
                             const std::vector<Candidate>& candidates, const EmbeddingSpec& spec,
                             Eigen::Index rank, const MScaleConfig& mscale_config = {});

/// SVD, L1 and PCP candidates in that order.
std::vector<Candidate> default_candidates(const Matrix& X, Eigen::Index rank,
                                          Warnings* warnings = nullptr);

}  // namespace rodessa
