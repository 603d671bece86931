#include "rodessa/irls.hpp"

#include "rodessa/error.hpp"
#include "rodessa/kernels.hpp"
#include "rodessa/wls.hpp"

#include <cmath>

namespace rodessa {

namespace {

double floored_mscale(const Matrix& z, double floor, const MScaleConfig& cfg,
                      const std::string& what, Warnings& warnings) {
  try {
    const double s = mscale({z.data(), static_cast<std::size_t>(z.size())}, cfg);
    if (s >= floor) return s;
    warnings.push_back(what + ": scale below floor, floored");
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::DegenerateScale && e.kind() != ErrorKind::Convergence) throw;
    warnings.push_back(what + ": degenerate residuals, scale floored");
  }
  return floor;
}

double rms(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.norm() / std::sqrt(static_cast<double>(m.size()));
}

}  // namespace

ScaleEstimate estimate_scales(const Matrix& series, const LowRankFit& fit,
                              const EmbeddingSpec& spec, const LossSpec& cell_loss,
                              const MScaleConfig& mscale_config, double floor_fraction) {
  ScaleEstimate out;
  const Matrix r = diagonal_residuals(series, fit, spec);
  double floor = floor_fraction * rms(series);
  if (floor == 0.0) floor = floor_fraction;
  out.scales.cell.resize(r.cols());
  for (Eigen::Index j = 0; j < r.cols(); ++j) {
    const Matrix z = r.col(j).cwiseSqrt();
    out.scales.cell(j) =
        floored_mscale(z, floor, mscale_config, "cell scale " + std::to_string(j + 1), out.warnings);
  }
  const Vector rc = case_residuals(r, out.scales.cell, cell_loss);
  out.scales.casewise = floored_mscale(rc.cwiseSqrt(), floor, mscale_config, "case scale", out.warnings);
  return out;
}

ResidualState residual_state(const Matrix& series, const LowRankFit& fit, const EmbeddingSpec& spec,
                             const Scales& scales, const LossPair& losses) {
  ResidualState s;
  s.cell = diagonal_residuals(series, fit, spec);
  s.casewise = case_residuals(s.cell, scales.cell, losses.cell);
  s.scales = scales;
  return s;
}

WeightState weight_state(const ResidualState& residuals, const EmbeddingSpec& spec,
                         const LossPair& losses) {
  WeightState w;
  w.cell = cell_weights(residuals.cell, residuals.scales.cell, losses.cell);
  w.casewise = case_weights(residuals.casewise, residuals.scales.casewise, losses.casewise);
  w.W = assemble_weight_matrix(w.cell, w.casewise, spec);
  return w;
}

InitialState initialize(const MultivariateSeries& series, const EmbeddingSpec& spec,
                        const RodessaConfig& config) {
  const Matrix X = embed(series.values(), spec).data;
  InitialState start;
  switch (config.init) {
    case InitPolicy::Svd:
      start.fit = svd_lowrank(X, config.rank);
      start.initializer = "svd";
      break;
    case InitPolicy::L1: {
      IterativeFit l1 = l1_lowrank(X, config.rank);
      start.fit = std::move(l1.fit);
      start.warnings = std::move(l1.warnings);
      start.initializer = "l1";
      break;
    }
    case InitPolicy::Pcp:
      start.fit = pcp_lowrank(X, config.rank, {}, &start.warnings);
      start.initializer = "pcp";
      break;
    case InitPolicy::BestOfThree: {
      auto candidates = default_candidates(X, config.rank, &start.warnings);
      Selection sel = select_initializer(series.values(), X, candidates, spec, config.rank,
                                         config.mscale);
      start.warnings.insert(start.warnings.end(), sel.warnings.begin(), sel.warnings.end());
      start.initializer = sel.index < candidates.size() ? candidates[sel.index].name : "svd";
      start.fit = std::move(sel.fit);
      break;
    }
  }
  ScaleEstimate est = estimate_scales(series.values(), start.fit, spec, config.losses().cell,
                                      config.mscale, config.scale_floor_fraction);
  start.scales = est.scales;
  start.warnings.insert(start.warnings.end(), est.warnings.begin(), est.warnings.end());
  return start;
}

RodessaResult irls_solve(const MultivariateSeries& series, const EmbeddingSpec& spec,
                         const RodessaConfig& config, InitialState start) {
  if (config.rank < 1) throw Error(ErrorKind::Argument, "rank must be at least 1");
  if (!(config.tolerance > 0.0)) throw Error(ErrorKind::Argument, "tolerance must be positive");
  if (config.max_iterations < 0) throw Error(ErrorKind::Argument, "negative iteration limit");

  const LossPair losses = config.losses();
  const Matrix& x = series.values();
  const Matrix X = embed(x, spec).data;

  RodessaResult out{spec, losses, start.fit, start.fit, start.initializer, {}, {},
                    series, {}, 0, false, 0, std::move(start.warnings)};
  const Scales& scales = start.scales;

  LowRankFit fit = start.fit;
  Matrix F = fit.product();
  ResidualState res = residual_state(x, fit, spec, scales, losses);
  out.objective_trace.push_back(objective_from_residuals(res.cell, spec, scales, losses));
  WeightState weights = weight_state(res, spec, losses);

  SolveStats stats;
  const auto& k = kernels::active();
  for (int t = 0; t < config.max_iterations; ++t) {
    WeightedProblem problem(X, weights.W);
    fit.V = wls_update_V(fit.U, problem, &stats);
    fit.U = wls_update_U(fit.V, problem, &stats);
    Matrix F_new = fit.product();
    const double change =
        std::sqrt(k.sum_sq_diff(F_new.data(), F.data(), static_cast<std::size_t>(F.size())));
    const double ref = F.norm();
    F = std::move(F_new);

    res = residual_state(x, fit, spec, scales, losses);
    out.objective_trace.push_back(objective_from_residuals(res.cell, spec, scales, losses));
    weights = weight_state(res, spec, losses);
    out.iterations = t + 1;
    if (change < config.tolerance * ref || (ref == 0.0 && change == 0.0)) {
      out.converged = true;
      break;
    }
  }
  if (config.max_iterations == 0) out.converged = false;
  if (!out.converged) {
    out.warnings.push_back("irls: no convergence after " + std::to_string(out.iterations) +
                           " iterations");
  }
  out.singular_solves = stats.singular_solves;
  if (stats.singular_solves > 0) {
    out.warnings.push_back("irls: " + std::to_string(stats.singular_solves) +
                           " singular Gram solves handled by pseudo-inverse");
  }

  out.fit = balance(fit);
  out.residuals = std::move(res);
  out.weights = std::move(weights);
  out.reconstruction = reconstruct(F, spec, series);
  return out;
}

RodessaResult irls_fit(const MultivariateSeries& series, std::size_t window,
                       const RodessaConfig& config) {
  const EmbeddingSpec spec(window, series.length(), series.count());
  const auto limit = static_cast<Eigen::Index>(std::min(spec.window(), spec.columns()));
  if (config.rank < 1 || config.rank > limit) {
    throw Error(ErrorKind::Rank, "rank " + std::to_string(config.rank) + " outside [1, " +
                                     std::to_string(limit) + "]");
  }
  return irls_solve(series, spec, config, initialize(series, spec, config));
}

}  // namespace rodessa
