#include "rodessa/robust_loss.hpp"

#include "rodessa/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace rodessa {

namespace {

void check_tuning(const LossSpec& loss) {
  if (!(loss.tuning > 0.0)) throw Error(ErrorKind::Argument, "loss tuning constant must be positive");
}

void check_nonnegative(double t) {
  if (t < 0.0) throw Error(ErrorKind::Domain, "loss defined on [0, inf), got " + std::to_string(t));
}

}  // namespace

double rho(const LossSpec& loss, double t) {
  check_tuning(loss);
  const double c = loss.tuning;
  switch (loss.kind) {
    case LossKind::Biweight: {
      if (std::abs(t) > c) return 1.0;
      const double u = 1.0 - (t * t) / (c * c);
      return 1.0 - u * u * u;
    }
    case LossKind::Huber: {
      const double a = std::abs(t);
      return a <= c ? 0.5 * t * t : c * a - 0.5 * c * c;
    }
    case LossKind::SqrtBiweight: {
      check_nonnegative(t);
      if (t > c * c) return 1.0;
      const double u = 1.0 - t / (c * c);
      return 1.0 - u * u * u;
    }
    case LossKind::Absolute: return std::abs(t);
  }
  return 0.0;
}

double rho_prime(const LossSpec& loss, double t) {
  check_tuning(loss);
  const double c = loss.tuning;
  switch (loss.kind) {
    case LossKind::Biweight: {
      if (std::abs(t) > c) return 0.0;
      const double u = 1.0 - (t * t) / (c * c);
      return 6.0 * t / (c * c) * u * u;
    }
    case LossKind::Huber: return std::clamp(t, -c, c);
    case LossKind::SqrtBiweight: {
      check_nonnegative(t);
      if (t >= c * c) return 0.0;
      const double u = 1.0 - t / (c * c);
      return 3.0 / (c * c) * u * u;
    }
    case LossKind::Absolute: return t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 1.0);
  }
  return 0.0;
}

double rho_second(const LossSpec& loss, double t) {
  check_tuning(loss);
  const double c = loss.tuning;
  switch (loss.kind) {
    case LossKind::Biweight: {
      if (std::abs(t) > c) return 0.0;
      const double s = (t * t) / (c * c);
      return 6.0 / (c * c) * (1.0 - s) * (1.0 - 5.0 * s);
    }
    case LossKind::Huber: return std::abs(t) <= c ? 1.0 : 0.0;
    case LossKind::SqrtBiweight: {
      check_nonnegative(t);
      if (t >= c * c) return 0.0;
      return -6.0 / (c * c * c * c) * (1.0 - t / (c * c));
    }
    case LossKind::Absolute: return 0.0;
  }
  return 0.0;
}

double max_weight(const LossSpec& loss) {
  switch (loss.kind) {
    case LossKind::SqrtBiweight: return 3.0 / (loss.tuning * loss.tuning);
    case LossKind::Absolute: return 1.0;
    case LossKind::Biweight: return 6.0 / (loss.tuning * loss.tuning);  // limit of psi(t)/t
    case LossKind::Huber: return 1.0;
  }
  return 1.0;
}

double mscale_equation(std::span<const double> values, double sigma, const MScaleConfig& config) {
  const LossSpec loss = LossSpec::biweight(config.tuning);
  double s = 0.0;
  for (double z : values) s += rho(loss, std::abs(z) / sigma);
  return s / static_cast<double>(values.size());
}

double mscale(std::span<const double> values, const MScaleConfig& config) {
  if (values.empty()) throw Error(ErrorKind::Argument, "M-scale of an empty sample");
  if (!(config.delta > 0.0 && config.delta < 1.0)) {
    throw Error(ErrorKind::Argument, "M-scale delta must lie in (0, 1)");
  }
  double min_pos = std::numeric_limits<double>::infinity();
  double max_abs = 0.0;
  for (double z : values) {
    const double a = std::abs(z);
    if (!std::isfinite(a)) throw Error(ErrorKind::Domain, "non-finite value in M-scale sample");
    if (a > 0.0) min_pos = std::min(min_pos, a);
    max_abs = std::max(max_abs, a);
  }
  if (max_abs == 0.0) throw Error(ErrorKind::DegenerateScale, "all values are zero");

  // The left side is continuous and non-increasing in sigma.
  double lo = min_pos / config.tuning;
  double hi = max_abs * 10.0;
  const double f_lo = mscale_equation(values, lo, config) - config.delta;
  const double f_hi = mscale_equation(values, hi, config) - config.delta;
  if (f_lo < 0.0 || f_hi > 0.0) {
    throw Error(ErrorKind::Convergence,
                "M-scale root not bracketed: fraction of nonzero values below delta");
  }
  if (f_lo == 0.0) return lo;

  for (int it = 0; it < config.max_iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f = mscale_equation(values, mid, config) - config.delta;
    if (f == 0.0) return mid;
    if (f > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= config.tolerance * 1e-2 * hi) break;
  }
  const double sigma = 0.5 * (lo + hi);
  const double residual = std::abs(mscale_equation(values, sigma, config) - config.delta);
  // The flat-region case (no value inside the support) leaves residual 0 at
  // any sigma in the plateau, so any slack here means a genuine failure.
  if (residual > 1e-9) {
    throw Error(ErrorKind::Convergence, "M-scale equation residual " + std::to_string(residual));
  }
  return sigma;
}

}  // namespace rodessa
