#pragma once

#include "rodessa/calibration.hpp"
#include "rodessa/csv.hpp"
#include "rodessa/irls.hpp"

#include <optional>
#include <string>
#include <vector>

namespace rodessa {

using FlagMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;

struct OutlierFlags {
  FlagMatrix cell;          // N x p: 0, +1 (raw above fit) or -1
  std::vector<bool> casewise;
  FlagQuantiles thresholds;

  std::size_t cell_count() const;
  std::size_t case_count() const;
};

/// Weights divided by their zero-residual value, so they lie in [0, 1].
Matrix standardized_cell_weights(const RodessaResult& result);
Vector standardized_case_weights(const RodessaResult& result);

/// Flags cells and cases whose standardized weight is below the table's
/// quantiles. The table must match the fit's dimensions and tuning constants.
OutlierFlags flag_outliers(const RodessaResult& result, const MultivariateSeries& raw,
                           const CalibrationTable& table);
OutlierFlags flag_outliers(const Matrix& std_cell_weights, const Vector& std_case_weights,
                           const Matrix& residuals, const FlagQuantiles& thresholds);

struct SeriesPanel {
  std::string name;
  Vector raw;
  Vector reconstructed;
  Vector weights;     // standardized
  Vector residuals;   // raw - reconstructed
  std::vector<int> flags;
  Vector forecasts;   // empty without an overlay
};

struct PlotModel {
  std::vector<std::string> timestamps;
  std::vector<SeriesPanel> panels;
  Vector case_weights;  // standardized
  std::vector<bool> case_flags;

  std::size_t length() const { return static_cast<std::size_t>(case_weights.size()); }
  std::size_t horizon() const;
};

PlotModel build_plot_model(const RodessaResult& result, const MultivariateSeries& raw,
                           const OutlierFlags& flags, const std::optional<Matrix>& forecasts = {});

struct SvgGeometry {
  double width = 960;
  double panel_height = 150;
  double strip_height = 44;
  double margin = 56;
  double gap = 18;
};

std::string emit_svg(const PlotModel& model, const SvgGeometry& geometry = {});

/// Everything the JSON report carries; parse_report inverts emit_report.
struct Report {
  Provenance config;
  std::vector<std::string> names;
  std::vector<std::string> timestamps;
  Matrix cell_weights;  // standardized, N x p
  Matrix residuals;     // raw - reconstructed
  FlagMatrix cell_flags;
  Vector case_weights;
  std::vector<bool> case_flags;
  FlagQuantiles thresholds;
  Vector cell_scales;
  double case_scale = 0.0;
  std::vector<double> objective_trace;
  int iterations = 0;
  bool converged = false;
  std::string initializer;
  Matrix forecasts;  // h x p, possibly empty
  Warnings warnings;
};

constexpr int kReportSchemaVersion = 1;

Report make_report(const RodessaResult& result, const PlotModel& model, const OutlierFlags& flags,
                   Provenance config);
std::string emit_report(const Report& report);
Report parse_report(const std::string& text);

}  // namespace rodessa
