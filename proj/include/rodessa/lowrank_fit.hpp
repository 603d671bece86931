#pragma once

#include "rodessa/series.hpp"

#include <string>
#include <vector>

namespace rodessa {

/// Factor pair whose product U V^T is the fitted L x K matrix. The factors
/// themselves are only defined up to an invertible q x q change of basis.
struct LowRankFit {
  Matrix U;  // L x q
  Matrix V;  // K x q

  Eigen::Index rank() const noexcept { return U.cols(); }
  Matrix product() const { return U * V.transpose(); }
};

/// Same product, factors rewritten as U = U~ D^{1/2}, V = V~ D^{1/2} from the
/// exact SVD of U V^T. Directions with zero singular value are dropped
/// only when drop_null is set.
LowRankFit balance(const LowRankFit& fit, bool drop_null = false);

struct ProductSvd {
  Matrix left;   // L x q, orthonormal columns
  Vector values; // descending
  Matrix right;  // K x q
};

/// Exact SVD of U V^T computed through thin QR factors of U and V.
ProductSvd product_svd(const LowRankFit& fit);

using Warnings = std::vector<std::string>;

}  // namespace rodessa
