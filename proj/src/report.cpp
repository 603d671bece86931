#include "rodessa/detect.hpp"

#include "rodessa/error.hpp"

#include <json.hpp>

namespace rodessa {

namespace {

using Json = nlohmann::ordered_json;

Json rows_of(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

Json rows_of(const FlagMatrix& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

Json list_of(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

template <typename M>
M matrix_from(const Json& rows, Eigen::Index cols) {
  M m(static_cast<Eigen::Index>(rows.size()), cols);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const Json& row = rows.at(static_cast<std::size_t>(i));
    if (static_cast<Eigen::Index>(row.size()) != cols) throw Error(ErrorKind::Data, "report: ragged matrix");
    for (Eigen::Index j = 0; j < cols; ++j) {
      m(i, j) = row.at(static_cast<std::size_t>(j)).get<typename M::Scalar>();
    }
  }
  return m;
}

Vector vector_from(const Json& list) {
  Vector v(static_cast<Eigen::Index>(list.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = list.at(static_cast<std::size_t>(i)).get<double>();
  return v;
}

}  // namespace

Report make_report(const RodessaResult& result, const PlotModel& model, const OutlierFlags& flags,
                   Provenance config) {
  Report r;
  r.config = std::move(config);
  r.timestamps = model.timestamps;
  const auto N = static_cast<Eigen::Index>(model.length());
  const auto p = static_cast<Eigen::Index>(model.panels.size());
  r.cell_weights.resize(N, p);
  r.residuals.resize(N, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const auto& panel = model.panels[static_cast<std::size_t>(j)];
    r.names.push_back(panel.name);
    r.cell_weights.col(j) = panel.weights;
    r.residuals.col(j) = panel.residuals;
  }
  r.cell_flags = flags.cell;
  r.case_weights = model.case_weights;
  r.case_flags = flags.casewise;
  r.thresholds = flags.thresholds;
  r.cell_scales = result.residuals.scales.cell;
  r.case_scale = result.residuals.scales.casewise;
  r.objective_trace = result.objective_trace;
  r.iterations = result.iterations;
  r.converged = result.converged;
  r.initializer = result.initializer;
  const auto h = static_cast<Eigen::Index>(model.horizon());
  r.forecasts.resize(h, p);
  for (Eigen::Index j = 0; j < p && h > 0; ++j) {
    r.forecasts.col(j) = model.panels[static_cast<std::size_t>(j)].forecasts;
  }
  r.warnings = result.warnings;
  return r;
}

std::string emit_report(const Report& r) {
  Json j;
  j["schema_version"] = kReportSchemaVersion;
  Json config = Json::object();
  for (const auto& [k, v] : r.config) config[k] = v;
  j["config"] = std::move(config);
  j["series"] = r.names;
  j["timestamps"] = r.timestamps;
  j["cells"] = {{"weights", rows_of(r.cell_weights)},
                {"residuals", rows_of(r.residuals)},
                {"flags", rows_of(r.cell_flags)}};
  Json case_flags = Json::array();
  for (bool b : r.case_flags) case_flags.push_back(b);
  j["cases"] = {{"weights", list_of(r.case_weights)}, {"flags", std::move(case_flags)}};
  j["thresholds"] = {{"cell", r.thresholds.cell}, {"case", r.thresholds.casewise}};
  j["scales"] = {{"cell", list_of(r.cell_scales)}, {"case", r.case_scale}};
  j["fit"] = {{"initializer", r.initializer},
              {"iterations", r.iterations},
              {"converged", r.converged},
              {"objective_trace", r.objective_trace}};
  j["forecasts"] = rows_of(r.forecasts);
  j["warnings"] = r.warnings;
  return j.dump(1) + "\n";
}

Report parse_report(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Data, std::string("report: ") + e.what());
  }
  try {
    if (j.at("schema_version").get<int>() != kReportSchemaVersion) {
      throw Error(ErrorKind::Data, "report: unsupported schema_version");
    }
    Report r;
    for (const auto& [k, v] : j.at("config").items()) r.config.emplace_back(k, v.get<std::string>());
    r.names = j.at("series").get<std::vector<std::string>>();
    r.timestamps = j.at("timestamps").get<std::vector<std::string>>();
    const auto p = static_cast<Eigen::Index>(r.names.size());
    const Json& cells = j.at("cells");
    r.cell_weights = matrix_from<Matrix>(cells.at("weights"), p);
    r.residuals = matrix_from<Matrix>(cells.at("residuals"), p);
    r.cell_flags = matrix_from<FlagMatrix>(cells.at("flags"), p);
    r.case_weights = vector_from(j.at("cases").at("weights"));
    r.case_flags = j.at("cases").at("flags").get<std::vector<bool>>();
    r.thresholds = {j.at("thresholds").at("cell").get<double>(), j.at("thresholds").at("case").get<double>()};
    r.cell_scales = vector_from(j.at("scales").at("cell"));
    r.case_scale = j.at("scales").at("case").get<double>();
    const Json& fit = j.at("fit");
    r.initializer = fit.at("initializer").get<std::string>();
    r.iterations = fit.at("iterations").get<int>();
    r.converged = fit.at("converged").get<bool>();
    r.objective_trace = fit.at("objective_trace").get<std::vector<double>>();
    r.forecasts = matrix_from<Matrix>(j.at("forecasts"), p);
    r.warnings = j.at("warnings").get<Warnings>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Data, std::string("report: ") + e.what());
  }
}

}  // namespace rodessa
