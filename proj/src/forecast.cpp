#include "rodessa/forecast.hpp"

#include "rodessa/error.hpp"

#include <sstream>

namespace rodessa {

RecurrenceModel recurrence_coefficients(const LowRankFit& fit) {
  if (fit.U.rows() < 2) throw Error(ErrorKind::Shape, "recurrence needs a window of at least 2");
  if (fit.rank() < 1 || fit.V.cols() != fit.rank()) {
    throw Error(ErrorKind::Shape, "factor ranks do not match");
  }
  const ProductSvd svd = product_svd(fit);
  if (!(svd.values(0) > 1e-12 * fit.U.norm() * fit.V.norm())) throw Error(ErrorKind::Rank, "cannot forecast from a zero fit");
  Eigen::Index keep = 0;
  while (keep < svd.values.size() && svd.values(keep) > 1e-12 * svd.values(0)) ++keep;
  const Eigen::Index L = svd.left.rows();
  const Matrix left = svd.left.leftCols(keep);
  const Vector last = left.row(L - 1).transpose();
  RecurrenceModel m;
  m.rank = keep;
  m.verticality = last.squaredNorm();
  if (m.verticality >= kVerticalityLimit) {
    std::ostringstream msg;
    msg << "series not forecastable by recurrence: verticality " << m.verticality;
    throw Error(ErrorKind::Verticality, msg.str());
  }
  m.coefficients = left.topRows(L - 1) * last / (1.0 - m.verticality);
  return m;
}

Matrix forecast(const RecurrenceModel& model, const Matrix& reconstruction, int horizon) {
  if (horizon < 0) throw Error(ErrorKind::Argument, "forecast horizon must be non-negative");
  const Eigen::Index lags = model.coefficients.size();
  if (reconstruction.rows() < lags) {
    throw Error(ErrorKind::Shape, "reconstruction shorter than the recurrence order");
  }
  const Eigen::Index N = reconstruction.rows();
  Matrix path(N + horizon, reconstruction.cols());
  path.topRows(N) = reconstruction;
  for (Eigen::Index i = N; i < N + horizon; ++i) {
    path.row(i) = model.coefficients.transpose() * path.middleRows(i - lags, lags);
  }
  return path.bottomRows(horizon);
}

Matrix forecast(const RecurrenceModel& model, const MultivariateSeries& reconstruction,
                int horizon) {
  return forecast(model, reconstruction.values(), horizon);
}

}  // namespace rodessa
