#pragma once

#include <span>

namespace rodessa {

enum class LossKind {
  Biweight,      // Tukey: 1 - (1 - t^2/c^2)^3 on |t| <= c, else 1
  Huber,         // t^2/2 on |t| <= b, else b|t| - b^2/2
  SqrtBiweight,  // biweight of sqrt(t), t >= 0
  Absolute,      // |t|; with unit scales it turns the diagonal objective into least squares
};

inline constexpr double kBiweightEfficiency = 4.685;
inline constexpr double kHuberEfficiency = 1.345;
inline constexpr double kMScaleTuning = 1.548;
inline constexpr double kMScaleDelta = 0.5;

struct LossSpec {
  LossKind kind = LossKind::SqrtBiweight;
  double tuning = kBiweightEfficiency;

  static LossSpec biweight(double c = kBiweightEfficiency) { return {LossKind::Biweight, c}; }
  static LossSpec huber(double b = kHuberEfficiency) { return {LossKind::Huber, b}; }
  static LossSpec sqrt_biweight(double c) { return {LossKind::SqrtBiweight, c}; }
  static LossSpec absolute() { return {LossKind::Absolute, 1.0}; }
};

double rho(const LossSpec& loss, double t);
double rho_prime(const LossSpec& loss, double t);
double rho_second(const LossSpec& loss, double t);

/// rho_prime at zero: the largest weight a loss can hand out.
double max_weight(const LossSpec& loss);

struct MScaleConfig {
  double delta = kMScaleDelta;
  double tuning = kMScaleTuning;
  double tolerance = 1e-10;  // relative, on sigma
  int max_iterations = 400;
};

/// Solves (1/n) sum rho_c(z_i / sigma) = delta for sigma by bisection, with
/// rho_c Tukey's biweight. Values are taken in absolute value.
double mscale(std::span<const double> values, const MScaleConfig& config = {});

/// Left side of the M-scale equation at sigma.
double mscale_equation(std::span<const double> values, double sigma, const MScaleConfig& config);

}  // namespace rodessa
