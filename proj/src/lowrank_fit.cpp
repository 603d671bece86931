#include "rodessa/lowrank_fit.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

namespace rodessa {

ProductSvd product_svd(const LowRankFit& fit) {
  const Eigen::Index q = fit.rank();
  Eigen::HouseholderQR<Matrix> qr_u(fit.U);
  Eigen::HouseholderQR<Matrix> qr_v(fit.V);
  const Matrix Qu = qr_u.householderQ() * Matrix::Identity(fit.U.rows(), q);
  const Matrix Qv = qr_v.householderQ() * Matrix::Identity(fit.V.rows(), q);
  const Matrix Ru = qr_u.matrixQR().topRows(q).triangularView<Eigen::Upper>();
  const Matrix Rv = qr_v.matrixQR().topRows(q).triangularView<Eigen::Upper>();
  Eigen::JacobiSVD<Matrix> svd(Ru * Rv.transpose(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  return {Qu * svd.matrixU(), svd.singularValues(), Qv * svd.matrixV()};
}

LowRankFit balance(const LowRankFit& fit, bool drop_null) {
  if (fit.rank() == 0) return fit;
  ProductSvd s = product_svd(fit);
  Eigen::Index keep = s.values.size();
  if (drop_null) {
    const double cut = s.values.size() > 0 ? s.values(0) * 1e-13 : 0.0;
    keep = 0;
    while (keep < s.values.size() && s.values(keep) > cut) ++keep;
  }
  const Vector root = s.values.head(keep).cwiseSqrt();
  return {s.left.leftCols(keep) * root.asDiagonal(), s.right.leftCols(keep) * root.asDiagonal()};
}

}  // namespace rodessa
