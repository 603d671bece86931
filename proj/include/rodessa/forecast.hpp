#pragma once

#include "rodessa/lowrank_fit.hpp"
#include "rodessa/series.hpp"

namespace rodessa {

/// Linear recurrence x_i = sum_l a_l x_{i-L+l}, l = 1..L-1, shared by all series.
struct RecurrenceModel {
  Vector coefficients;  // length L-1, oldest lag first
  double verticality = 0.0;
  Eigen::Index rank = 0;  // directions with nonzero singular value
};

constexpr double kVerticalityLimit = 1.0 - 1e-8;

/// Uses the left singular vectors of U V^T with nonzero singular value.
RecurrenceModel recurrence_coefficients(const LowRankFit& fit);

/// h x p forecasts continuing the reconstruction; h == 0 gives an empty matrix.
Matrix forecast(const RecurrenceModel& model, const Matrix& reconstruction, int horizon);
Matrix forecast(const RecurrenceModel& model, const MultivariateSeries& reconstruction, int horizon);

}  // namespace rodessa
