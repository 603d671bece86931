#include "rodessa/wls.hpp"

#include "rodessa/error.hpp"
#include "rodessa/kernels.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <span>

namespace rodessa {

namespace {

std::span<const double> col_span(const Matrix& m, Eigen::Index c) {
  return {m.data() + c * m.rows(), static_cast<std::size_t>(m.rows())};
}

// Solves every column of `data` (length n) against the n x q factor `basis`
// with the matching column of `weights`. Output is (#columns) x q.
Matrix solve_columns(const Matrix& basis, const Matrix& data, const Matrix& weights,
                     SolveStats* stats) {
  const Eigen::Index q = basis.cols();
  const Eigen::Index m = data.cols();
  Matrix out(m, q);
  Matrix gram(q, q);
  Vector rhs(q);
  Vector x(q);
  const auto& k = kernels::active();
  for (Eigen::Index c = 0; c < m; ++c) {
    const auto w = col_span(weights, c);
    const auto y = col_span(data, c);
    for (Eigen::Index r = 0; r < q; ++r) {
      const auto br = col_span(basis, r);
      for (Eigen::Index s = 0; s <= r; ++s) {
        const auto bs = col_span(basis, s);
        gram(r, s) = gram(s, r) = k.weighted_dot(w.data(), br.data(), bs.data(), w.size());
      }
      rhs(r) = k.weighted_dot(w.data(), y.data(), br.data(), w.size());
    }
    if (pseudo_solve(gram, rhs, x) && stats) ++stats->singular_solves;
    out.row(c) = x.transpose();
  }
  return out;
}

}  // namespace

WeightedProblem::WeightedProblem(const Matrix& data, Matrix weights)
    : data_(data), weights_(std::move(weights)) {
  if (data_.rows() != weights_.rows() || data_.cols() != weights_.cols()) {
    throw Error(ErrorKind::Shape, "weights and data differ in shape");
  }
  if ((weights_.array() < 0.0).any()) throw Error(ErrorKind::Argument, "negative weight");
  data_t_ = data_.transpose();
  weights_t_ = weights_.transpose();
}

bool pseudo_solve(const Matrix& gram, const Vector& rhs, Vector& out) {
  const Eigen::Index q = gram.rows();
  if (q == 1) {
    const double g = gram(0, 0);
    if (g > 0.0) {
      out.resize(1);
      out(0) = rhs(0) / g;
      return false;
    }
    out = Vector::Zero(1);
    return true;
  }
  Eigen::LLT<Matrix> llt(gram);
  if (llt.info() == Eigen::Success) {
    // Accept Cholesky only when the pivots stay above the cutoff.
    const Vector d = llt.matrixL().toDenseMatrix().diagonal();
    const double dmax = d.cwiseAbs().maxCoeff();
    const double dmin = d.cwiseAbs().minCoeff();
    if (dmin * dmin > kPseudoInverseCutoff * 1e2 * dmax * dmax) {
      out = llt.solve(rhs);
      return false;
    }
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
  const Vector& ev = eig.eigenvalues();
  const double top = ev.cwiseAbs().maxCoeff();
  const double cut = kPseudoInverseCutoff * top;
  const Vector proj = eig.eigenvectors().transpose() * rhs;
  Vector coef = Vector::Zero(q);
  bool dropped = false;
  for (Eigen::Index i = 0; i < q; ++i) {
    if (top > 0.0 && ev(i) > cut) {
      coef(i) = proj(i) / ev(i);
    } else {
      dropped = true;
    }
  }
  out = eig.eigenvectors() * coef;
  return dropped;
}

Matrix wls_update_V(const Matrix& U, const WeightedProblem& problem, SolveStats* stats) {
  if (U.rows() != problem.data().rows()) throw Error(ErrorKind::Shape, "U rows must equal L");
  return solve_columns(U, problem.data(), problem.weights(), stats);
}

Matrix wls_update_U(const Matrix& V, const WeightedProblem& problem, SolveStats* stats) {
  if (V.rows() != problem.data().cols()) throw Error(ErrorKind::Shape, "V rows must equal K");
  return solve_columns(V, problem.data_t(), problem.weights_t(), stats);
}

Matrix wls_update_V(const Matrix& U, const Matrix& W, const Matrix& X) {
  return wls_update_V(U, WeightedProblem(X, W));
}

Matrix wls_update_U(const Matrix& V, const Matrix& W, const Matrix& X) {
  return wls_update_U(V, WeightedProblem(X, W));
}

double wls_objective(const LowRankFit& fit, const WeightedProblem& problem) {
  const Matrix F = fit.product();
  const auto& k = kernels::active();
  const std::size_t n = static_cast<std::size_t>(F.size());
  return k.weighted_sq_diff(problem.weights().data(), problem.data().data(), F.data(), n);
}

GradientNorms wls_gradient_norms(const LowRankFit& fit, const WeightedProblem& problem) {
  const Matrix R = problem.weights().cwiseProduct(fit.product() - problem.data());
  GradientNorms g;
  // Column k: U^T W_k (U v^k - X_k); row l: V^T W^l (V u^l - X^l).
  g.columns = (fit.U.transpose() * R).colwise().norm().maxCoeff();
  g.rows = (fit.V.transpose() * R.transpose()).colwise().norm().maxCoeff();
  return g;
}

}  // namespace rodessa
