#include "rodessa/lowrank.hpp"

#include "rodessa/error.hpp"
#include "rodessa/objective.hpp"
#include "rodessa/wls.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace rodessa {

namespace {

void check_rank(const Matrix& X, Eigen::Index rank) {
  if (rank < 1 || rank > std::min(X.rows(), X.cols())) {
    throw Error(ErrorKind::Rank, "rank " + std::to_string(rank) + " outside [1, " +
                                     std::to_string(std::min(X.rows(), X.cols())) + "]");
  }
}

double l1_norm(const Matrix& R) { return R.cwiseAbs().sum(); }

Matrix soft_threshold(const Matrix& M, double tau) {
  return M.unaryExpr([tau](double v) {
    return v > tau ? v - tau : (v < -tau ? v + tau : 0.0);
  });
}

}  // namespace

LowRankFit svd_lowrank(const Matrix& X, Eigen::Index rank) {
  check_rank(X, rank);
  Eigen::BDCSVD<Matrix> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector root = svd.singularValues().head(rank).cwiseSqrt();
  return {svd.matrixU().leftCols(rank) * root.asDiagonal(),
          svd.matrixV().leftCols(rank) * root.asDiagonal()};
}

double smoothed_abs(double r, double eps) {
  const double a = std::abs(r);
  return a >= eps ? a : r * r / (2.0 * eps) + 0.5 * eps;
}

IterativeFit l1_lowrank(const Matrix& X, Eigen::Index rank, const L1Options& options) {
  check_rank(X, rank);
  IterativeFit out;
  out.fit = svd_lowrank(X, rank);
  const double scale = X.norm() / std::sqrt(static_cast<double>(X.size()));
  if (scale == 0.0) {
    out.trace.push_back(0.0);
    out.converged = true;
    return out;
  }
  const double eps = options.floor_fraction * scale;
  auto smoothed = [eps](const Matrix& R) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < R.size(); ++i) s += smoothed_abs(R.data()[i], eps);
    return s;
  };

  LowRankFit fit = out.fit;
  Matrix F = fit.product();
  Matrix R = X - F;
  out.trace.push_back(smoothed(R));
  double best = l1_norm(R);
  LowRankFit best_fit = fit;

  for (int it = 0; it < options.max_iterations; ++it) {
    Matrix W = R.unaryExpr([eps](double r) { return 1.0 / std::max(std::abs(r), eps); });
    WeightedProblem problem(X, std::move(W));
    fit.V = wls_update_V(fit.U, problem);
    fit.U = wls_update_U(fit.V, problem);
    Matrix F_new = fit.product();
    const double change = (F_new - F).norm();
    const double ref = F.norm();
    F = std::move(F_new);
    R = X - F;
    out.trace.push_back(smoothed(R));
    out.iterations = it + 1;
    const double l1 = l1_norm(R);
    if (l1 < best) {
      best = l1;
      best_fit = fit;
    }
    if (change <= options.tolerance * ref) {
      out.converged = true;
      break;
    }
  }
  if (!out.converged) {
    out.warnings.push_back("l1_lowrank: no convergence after " +
                           std::to_string(options.max_iterations) + " iterations");
  }
  out.fit = best_fit;
  return out;
}

double mad_scale(const Matrix& R) {
  if (R.size() == 0) throw Error(ErrorKind::Argument, "MAD of an empty matrix");
  std::vector<double> v(R.data(), R.data() + R.size());
  auto median = [](std::vector<double>& a) {
    const std::size_t n = a.size(), mid = n / 2;
    std::nth_element(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(mid), a.end());
    double m = a[mid];
    if (n % 2 == 0) m = 0.5 * (m + *std::max_element(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(mid)));
    return m;
  };
  const double center = median(v);
  for (Eigen::Index i = 0; i < R.size(); ++i) v[static_cast<std::size_t>(i)] = std::abs(R.data()[i] - center);
  return 1.482602218505602 * median(v);
}

double biweight_objective(const Matrix& X, const LowRankFit& fit, double tuning, double scale) {
  if (!(scale > 0.0)) throw Error(ErrorKind::DegenerateScale, "biweight scale must be positive");
  const auto loss = LossSpec::biweight(tuning);
  const Matrix R = X - fit.product();
  double s = 0.0;
  for (Eigen::Index i = 0; i < R.size(); ++i) s += rho(loss, R.data()[i] / scale);
  return s;
}

IterativeFit biweight_lowrank(const Matrix& X, const LowRankFit& start, double tuning,
                              double scale, const BiweightOptions& options) {
  if (!(scale > 0.0)) throw Error(ErrorKind::DegenerateScale, "biweight scale must be positive");
  if (!(tuning > 0.0)) throw Error(ErrorKind::Argument, "biweight tuning must be positive");
  IterativeFit out;
  LowRankFit fit = start;
  Matrix F = fit.product();
  out.trace.push_back(biweight_objective(X, fit, tuning, scale));
  const double cs2 = tuning * tuning * scale * scale;
  auto weights = [&](const Matrix& Fc) {
    return Matrix((X - Fc).unaryExpr([cs2](double r) {
      const double u = 1.0 - r * r / cs2;
      return u > 0.0 ? u * u : 0.0;
    }));
  };
  Matrix W = weights(F);
  for (int it = 0; it < options.max_iterations; ++it) {
    WeightedProblem problem(X, W);
    fit.V = wls_update_V(fit.U, problem);
    fit.U = wls_update_U(fit.V, problem);
    Matrix F_new = fit.product();
    const double change = (F_new - F).norm();
    const double ref = F.norm();
    F = std::move(F_new);
    W = weights(F);
    out.trace.push_back(biweight_objective(X, fit, tuning, scale));
    out.iterations = it + 1;
    if (change <= options.tolerance * ref) {
      out.converged = true;
      break;
    }
  }
  if (!out.converged) {
    out.warnings.push_back("biweight_lowrank: no convergence after " +
                           std::to_string(options.max_iterations) + " iterations");
  }
  out.fit = balance(fit);
  return out;
}

PcpResult rpca_pcp(const Matrix& X, const PcpOptions& options) {
  PcpResult out;
  out.lowrank = Matrix::Zero(X.rows(), X.cols());
  out.sparse = Matrix::Zero(X.rows(), X.cols());
  const double xnorm = X.norm();
  if (xnorm == 0.0) {
    out.converged = true;
    return out;
  }
  const double lambda =
      options.lambda.value_or(1.0 / std::sqrt(static_cast<double>(std::max(X.rows(), X.cols()))));
  if (!(lambda > 0.0)) throw Error(ErrorKind::Argument, "PCP lambda must be positive");

  const double norm2 = Eigen::BDCSVD<Matrix>(X).singularValues()(0);
  const double dual = std::max(norm2, X.cwiseAbs().maxCoeff() / lambda);
  Matrix Y = X / dual;
  double mu = 1.25 / norm2;
  const double mu_max = mu * 1e7;
  Matrix& A = out.lowrank;
  Matrix& E = out.sparse;

  for (int it = 0; it < options.max_iterations; ++it) {
    E = soft_threshold(X - A + Y / mu, lambda / mu);
    Eigen::BDCSVD<Matrix> svd(X - E + Y / mu, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector s = svd.singularValues();
    Eigen::Index keep = 0;
    while (keep < s.size() && s(keep) > 1.0 / mu) ++keep;
    const Vector shrunk = (s.head(keep).array() - 1.0 / mu).matrix();
    A = svd.matrixU().leftCols(keep) * shrunk.asDiagonal() * svd.matrixV().leftCols(keep).transpose();
    if (keep == 0) A.setZero(X.rows(), X.cols());
    const Matrix Z = X - A - E;
    Y += mu * Z;
    mu = std::min(mu * options.mu_growth, mu_max);
    out.iterations = it + 1;
    if (Z.norm() <= options.tolerance * xnorm) {
      out.converged = true;
      break;
    }
  }
  if (!out.converged) {
    out.warnings.push_back("rpca_pcp: no convergence after " +
                           std::to_string(options.max_iterations) + " iterations");
  }
  return out;
}

LowRankFit pcp_lowrank(const Matrix& X, Eigen::Index rank, const PcpOptions& options,
                       Warnings* warnings) {
  check_rank(X, rank);
  PcpResult pcp = rpca_pcp(X, options);
  if (warnings) warnings->insert(warnings->end(), pcp.warnings.begin(), pcp.warnings.end());
  return svd_lowrank(pcp.lowrank, rank);
}

std::vector<Candidate> default_candidates(const Matrix& X, Eigen::Index rank, Warnings* warnings) {
  std::vector<Candidate> out;
  out.push_back({"svd", svd_lowrank(X, rank)});
  IterativeFit l1 = l1_lowrank(X, rank);
  if (warnings) warnings->insert(warnings->end(), l1.warnings.begin(), l1.warnings.end());
  out.push_back({"l1", std::move(l1.fit)});
  out.push_back({"pcp", pcp_lowrank(X, rank, {}, warnings)});
  return out;
}

Selection select_initializer(const Matrix& series, const Matrix& X,
                             const std::vector<Candidate>& candidates, const EmbeddingSpec& spec,
                             Eigen::Index rank, const MScaleConfig& mscale_config) {
  if (candidates.empty()) throw Error(ErrorKind::Argument, "no initial candidates");
  Selection sel;
  const double floor = 1e-8 * series.norm() / std::sqrt(static_cast<double>(series.size()));
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const Matrix r = diagonal_residuals(series, candidates[c].fit, spec);
    const Matrix z = r.cwiseSqrt();
    try {
      const double s = mscale({z.data(), static_cast<std::size_t>(z.size())}, mscale_config);
      if (!(s > floor)) {
        sel.scales.emplace_back(std::nullopt);
        continue;
      }
      sel.scales.emplace_back(s);
      if (s < best) {
        best = s;
        sel.index = c;
      }
    } catch (const Error&) {
      sel.scales.emplace_back(std::nullopt);
    }
  }
  if (best == std::numeric_limits<double>::infinity()) {
    sel.index = candidates.size();
    sel.fit = svd_lowrank(X, rank);
    sel.warnings.push_back("select_initializer: no candidate has a usable M-scale; using SVD fit");
    return sel;
  }
  sel.fit = candidates[sel.index].fit;
  return sel;
}

}  // namespace rodessa
