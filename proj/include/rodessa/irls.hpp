#pragma once

#include "rodessa/lowrank.hpp"
#include "rodessa/objective.hpp"
#include "rodessa/series.hpp"

#include <optional>
#include <string>
#include <vector>

namespace rodessa {

enum class InitPolicy { BestOfThree, Svd, L1, Pcp };

struct RodessaConfig {
  Eigen::Index rank = 2;
  /// Tuning constants c1, c2 of the sqrt-biweight losses.
  double cell_tuning = 4.0;
  double case_tuning = 4.0;
  double tolerance = 1e-6;  // nu
  int max_iterations = 100;
  InitPolicy init = InitPolicy::BestOfThree;
  MScaleConfig mscale{};
  /// Floor for degenerate scales, as a fraction of the rms of X.
  double scale_floor_fraction = 1e-8;

  LossPair losses() const {
    return {LossSpec::sqrt_biweight(cell_tuning), LossSpec::sqrt_biweight(case_tuning)};
  }
};

struct ResidualState {
  Matrix cell;       // N x p, r_i^(j)
  Vector casewise;   // N, r_i
  Scales scales;
};

struct WeightState {
  Matrix cell;      // N x p, w_c
  Vector casewise;  // N, w_r
  Matrix W;         // L x K
};

struct RodessaResult {
  EmbeddingSpec spec;
  LossPair losses;
  LowRankFit fit;
  LowRankFit initial;
  std::string initializer;
  ResidualState residuals;
  WeightState weights;
  MultivariateSeries reconstruction;
  std::vector<double> objective_trace;  // starting fit first, then one per sweep
  int iterations = 0;
  bool converged = false;
  int singular_solves = 0;
  Warnings warnings;
};

struct ScaleEstimate {
  Scales scales;
  Warnings warnings;
};

/// M-scales of sqrt(r_i^(j)) per series and of sqrt(r_i), relative to the
/// given fit. Degenerate samples are floored at floor_fraction * rms(X).
ScaleEstimate estimate_scales(const Matrix& series, const LowRankFit& fit,
                              const EmbeddingSpec& spec, const LossSpec& cell_loss,
                              const MScaleConfig& mscale_config = {},
                              double floor_fraction = 1e-8);

/// Residual and weight state of a fit under frozen scales.
ResidualState residual_state(const Matrix& series, const LowRankFit& fit, const EmbeddingSpec& spec,
                             const Scales& scales, const LossPair& losses);
WeightState weight_state(const ResidualState& residuals, const EmbeddingSpec& spec,
                         const LossPair& losses);

struct InitialState {
  LowRankFit fit;
  Scales scales;
  std::string initializer;
  Warnings warnings;
};

InitialState initialize(const MultivariateSeries& series, const EmbeddingSpec& spec,
                        const RodessaConfig& config);

/// Runs the IRLS sweeps from a given start with frozen scales.
RodessaResult irls_solve(const MultivariateSeries& series, const EmbeddingSpec& spec,
                         const RodessaConfig& config, InitialState start);

/// Initialization, scale estimation and IRLS sweeps.
RodessaResult irls_fit(const MultivariateSeries& series, std::size_t window,
                       const RodessaConfig& config);

}  // namespace rodessa
