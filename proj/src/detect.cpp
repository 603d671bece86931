#include "rodessa/detect.hpp"

#include "rodessa/error.hpp"
#include "rodessa/plot_style.hpp"

#include <algorithm>
#include <cmath>

namespace rodessa {

namespace style {

Rgb ramp(const Rgb& target, double weight) {
  const double w = std::clamp(weight, 0.0, 1.0);
  Rgb out{};
  for (int k = 0; k < 3; ++k) {
    out[k] = static_cast<int>(std::lround(target[k] + w * (kWhite[k] - target[k])));
  }
  return out;
}

}  // namespace style

std::size_t OutlierFlags::cell_count() const {
  return static_cast<std::size_t>((cell.array() != 0).count());
}

std::size_t OutlierFlags::case_count() const {
  return static_cast<std::size_t>(std::count(casewise.begin(), casewise.end(), true));
}

Matrix standardized_cell_weights(const RodessaResult& result) {
  return result.weights.cell / max_weight(result.losses.cell);
}

Vector standardized_case_weights(const RodessaResult& result) {
  return result.weights.casewise / max_weight(result.losses.casewise);
}

OutlierFlags flag_outliers(const Matrix& w_cell, const Vector& w_case, const Matrix& residuals,
                           const FlagQuantiles& thresholds) {
  if (w_cell.rows() != residuals.rows() || w_cell.cols() != residuals.cols() ||
      w_case.size() != w_cell.rows()) {
    throw Error(ErrorKind::Shape, "weights and residuals disagree in shape");
  }
  OutlierFlags f;
  f.thresholds = thresholds;
  f.cell = FlagMatrix::Zero(w_cell.rows(), w_cell.cols());
  for (Eigen::Index j = 0; j < w_cell.cols(); ++j)
    for (Eigen::Index i = 0; i < w_cell.rows(); ++i)
      if (w_cell(i, j) < thresholds.cell) f.cell(i, j) = residuals(i, j) < 0.0 ? -1 : 1;
  f.casewise.resize(static_cast<std::size_t>(w_case.size()));
  for (Eigen::Index i = 0; i < w_case.size(); ++i) {
    f.casewise[static_cast<std::size_t>(i)] = w_case(i) < thresholds.casewise;
  }
  return f;
}

OutlierFlags flag_outliers(const RodessaResult& result, const MultivariateSeries& raw,
                           const CalibrationTable& table) {
  const auto& spec = result.spec;
  if (!table.matches(spec.length(), spec.series_count(), spec.window())) {
    throw Error(ErrorKind::Configuration,
                "calibration table is for N=" + std::to_string(table.setup.length) +
                    ", p=" + std::to_string(table.setup.series_count) +
                    ", L=" + std::to_string(table.setup.window) + " but the fit has N=" +
                    std::to_string(spec.length()) + ", p=" + std::to_string(spec.series_count()) +
                    ", L=" + std::to_string(spec.window()));
  }
  auto same = [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::abs(b); };
  if (!same(result.losses.cell.tuning, table.tuning.cell) ||
      !same(result.losses.casewise.tuning, table.tuning.casewise)) {
    throw Error(ErrorKind::Configuration, "fit tuning constants differ from the calibration table");
  }
  if (raw.length() != spec.length() || raw.count() != spec.series_count()) {
    throw Error(ErrorKind::Shape, "raw series does not match the fit");
  }
  const Matrix residuals = raw.values() - result.reconstruction.values();
  return flag_outliers(standardized_cell_weights(result), standardized_case_weights(result),
                       residuals, table.quantiles);
}

std::size_t PlotModel::horizon() const {
  return panels.empty() ? 0 : static_cast<std::size_t>(panels.front().forecasts.size());
}

PlotModel build_plot_model(const RodessaResult& result, const MultivariateSeries& raw,
                           const OutlierFlags& flags, const std::optional<Matrix>& forecasts) {
  const Eigen::Index N = static_cast<Eigen::Index>(raw.length());
  const Eigen::Index p = static_cast<Eigen::Index>(raw.count());
  if (result.reconstruction.length() != raw.length() || result.reconstruction.count() != raw.count() ||
      flags.cell.rows() != N || flags.cell.cols() != p ||
      flags.casewise.size() != static_cast<std::size_t>(N)) {
    throw Error(ErrorKind::Shape, "plot inputs disagree in shape");
  }
  if (forecasts && forecasts->rows() > 0 && forecasts->cols() != p) {
    throw Error(ErrorKind::Shape, "forecasts must have one column per series");
  }
  const Matrix w = standardized_cell_weights(result);
  PlotModel m;
  m.timestamps = raw.timestamps();
  m.case_weights = standardized_case_weights(result);
  m.case_flags = flags.casewise;
  for (Eigen::Index j = 0; j < p; ++j) {
    SeriesPanel panel;
    panel.name = raw.names()[static_cast<std::size_t>(j)];
    panel.raw = raw.values().col(j);
    panel.reconstructed = result.reconstruction.values().col(j);
    panel.weights = w.col(j);
    panel.residuals = panel.raw - panel.reconstructed;
    panel.flags.assign(flags.cell.col(j).data(), flags.cell.col(j).data() + N);
    if (forecasts && forecasts->rows() > 0) panel.forecasts = forecasts->col(j);
    m.panels.push_back(std::move(panel));
  }
  return m;
}

}  // namespace rodessa
