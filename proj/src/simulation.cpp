#include "rodessa/simulation.hpp"

#include "rodessa/calibration.hpp"
#include "rodessa/error.hpp"
#include "rodessa/forecast.hpp"
#include "rodessa/lowrank.hpp"
#include "rodessa/parallel.hpp"
#include "rodessa/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace rodessa {

namespace {

std::size_t contaminated_count(double fraction, std::size_t total) {
  // eps * total is meant to be an integer count; guard against 0.1*280 = 28.000000000000004
  return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(total) + 1e-9));
}

// First k entries of a uniformly shuffled 0..n-1 (partial Fisher-Yates).
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k,
                                                    std::mt19937_64& gen) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> d(i, n - 1);
    std::swap(idx[i], idx[d(gen)]);
  }
  idx.resize(k);
  return idx;
}

LowRankFit method_fit(Method m, const Matrix& X, Eigen::Index q, double cs_tuning, MethodOutput& out) {
  switch (m) {
    case Method::Cmssa:
      return svd_lowrank(X, q);
    case Method::Rlm: {
      IterativeFit f = l1_lowrank(X, q);
      out.converged = f.converged;
      out.warnings = std::move(f.warnings);
      return f.fit;
    }
    case Method::Cheng:
      return pcp_lowrank(X, q, {}, &out.warnings);
    case Method::Cs: {
      IterativeFit init = l1_lowrank(X, q);
      double scale = mad_scale(X - init.fit.product());
      if (!(scale > 0.0)) {
        scale = std::max(1e-8 * X.norm() / std::sqrt(static_cast<double>(X.size())), 1e-300);
        out.warnings.push_back("cs: MAD scale is zero, floored");
      }
      IterativeFit f = biweight_lowrank(X, init.fit, cs_tuning, scale);
      out.converged = f.converged;
      out.warnings = std::move(f.warnings);
      return f.fit;
    }
    case Method::Rodessa:
      break;
  }
  throw Error(ErrorKind::Argument, "unsupported method");
}

}  // namespace

Scenario standard_scenario(int id) {
  Scenario s;
  s.id = id;
  s.amplitudes.resize(4);
  s.phases.resize(4);
  const double a = M_PI / 5.0;
  switch (id) {
    case 1:
      s.amplitudes << 20, 30, 40, 50;
      s.phases << 0, 0, 0, 0;
      break;
    case 2:
      s.amplitudes << 35, 35, 35, 35;
      s.phases << 0, a, 0, a;
      break;
    case 3:
      s.amplitudes << 20, 30, 40, 50;
      s.phases << 0, a, 0, a;
      break;
    default:
      throw Error(ErrorKind::Argument, "unknown scenario " + std::to_string(id) + " (expected 1, 2 or 3)");
  }
  return s;
}

Matrix scenario_signal(const Scenario& s, std::size_t first, std::size_t count) {
  if (s.phases.size() != s.amplitudes.size()) throw Error(ErrorKind::Shape, "amplitudes and phases differ in length");
  Matrix out(static_cast<Eigen::Index>(count), s.amplitudes.size());
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    for (std::size_t k = 0; k < count; ++k) {
      const double i = static_cast<double>(first + k);
      out(static_cast<Eigen::Index>(k), j) = s.amplitudes(j) * std::cos(2.0 * M_PI * i / s.period + s.phases(j));
    }
  }
  return out;
}

SimulatedSeries generate(const Scenario& s, std::mt19937_64& gen, int horizon, bool shared_noise) {
  if (!(s.sigma >= 0.0)) throw Error(ErrorKind::Argument, "noise scale must be non-negative");
  if (horizon < 0) throw Error(ErrorKind::Argument, "horizon must be non-negative");
  SimulatedSeries out;
  out.signal = scenario_signal(s, 1, s.length);
  out.extension = scenario_signal(s, s.length + 1, static_cast<std::size_t>(horizon));
  const auto N = static_cast<Eigen::Index>(s.length);
  if (shared_noise) {
    const Matrix e = normal_matrix(N, 1, gen, 1.0);
    out.observed = out.signal + s.sigma * e.replicate(1, out.signal.cols());
  } else {
    out.observed = out.signal + s.sigma * normal_matrix(N, out.signal.cols(), gen, 1.0);
  }
  return out;
}

ContaminatedCells contaminate(Matrix& x, double sigma, const Contamination& c, std::mt19937_64& gen) {
  ContaminatedCells out;
  if (c.mode == ContaminationMode::None) return out;
  if (!(c.fraction >= 0.0 && c.fraction < 1.0)) throw Error(ErrorKind::Argument, "contamination fraction must lie in [0, 1)");
  if (!(c.gamma >= 0.0)) throw Error(ErrorKind::Argument, "gamma must be non-negative");
  const auto N = static_cast<std::size_t>(x.rows()), p = static_cast<std::size_t>(x.cols());
  const double shift = c.gamma * sigma;
  if (c.mode == ContaminationMode::Cellwise) {
    for (std::size_t idx : sample_without_replacement(N * p, contaminated_count(c.fraction, N * p), gen)) {
      const std::size_t i = idx % N, j = idx / N;
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += shift;
      out.cells.emplace_back(i, j);
    }
  } else {
    for (std::size_t i : sample_without_replacement(N, contaminated_count(c.fraction, N), gen)) {
      for (std::size_t j = 0; j < p; ++j) {
        x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += shift;
        out.cells.emplace_back(i, j);
      }
    }
  }
  return out;
}

const char* to_string(ContaminationMode m) {
  switch (m) {
    case ContaminationMode::None: return "none";
    case ContaminationMode::Cellwise: return "cellwise";
    case ContaminationMode::Casewise: return "casewise";
  }
  return "?";
}

ContaminationMode parse_contamination_mode(const std::string& t) {
  if (t == "none") return ContaminationMode::None;
  if (t == "cellwise") return ContaminationMode::Cellwise;
  if (t == "casewise") return ContaminationMode::Casewise;
  throw Error(ErrorKind::Argument, "unknown contamination mode '" + t + "'");
}

const char* to_string(Method m) {
  switch (m) {
    case Method::Cmssa: return "CMSSA";
    case Method::Rlm: return "RLM";
    case Method::Cs: return "CS";
    case Method::Cheng: return "CHENG";
    case Method::Rodessa: return "RODESSA";
  }
  return "?";
}

Method parse_method(const std::string& text) {
  std::string t = text;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char ch) { return std::toupper(ch); });
  for (Method m : all_methods())
    if (t == to_string(m)) return m;
  throw Error(ErrorKind::Argument, "unknown method '" + text + "' (expected CMSSA, RLM, CS, CHENG or RODESSA)");
}

std::vector<Method> all_methods() {
  return {Method::Cmssa, Method::Rlm, Method::Cs, Method::Cheng, Method::Rodessa};
}

MethodOutput run_method(Method method, const Matrix& series, const MethodConfig& config) {
  const EmbeddingSpec spec(config.window, static_cast<std::size_t>(series.rows()),
                           static_cast<std::size_t>(series.cols()));
  MethodOutput out;
  LowRankFit fit;
  Matrix fitted;
  if (method == Method::Rodessa) {
    RodessaConfig cfg = config.rodessa;
    cfg.rank = config.rank;
    RodessaResult r = irls_fit(MultivariateSeries(series), config.window, cfg);
    out.converged = r.converged;
    out.warnings = std::move(r.warnings);
    fit = std::move(r.fit);
    out.reconstruction = r.reconstruction.values();
  } else {
    const Matrix X = embed(series, spec).data;
    fit = method_fit(method, X, config.rank, config.cs_tuning, out);
    out.reconstruction = diagonal_average(fit.product(), spec);
  }
  out.forecasts = forecast(recurrence_coefficients(fit), out.reconstruction, config.horizon);
  return out;
}

Metrics metrics(const Matrix& reconstruction, const Matrix& forecasts, const Matrix& signal,
                const Matrix& extension) {
  if (reconstruction.rows() != signal.rows() || reconstruction.cols() != signal.cols() ||
      forecasts.rows() != extension.rows() ||
      (forecasts.size() > 0 && forecasts.cols() != extension.cols())) {
    throw Error(ErrorKind::Shape, "metric inputs disagree in shape");
  }
  Metrics m;
  m.re = (reconstruction - signal).squaredNorm() / static_cast<double>(signal.size());
  m.fe = forecasts.size() == 0 ? 0.0 : (forecasts - extension).squaredNorm() / static_cast<double>(extension.size());
  return m;
}

const StudyCell& StudyReport::at(int scenario, ContaminationMode mode, double fraction, double gamma,
                                 Method method) const {
  for (const auto& c : cells)
    if (c.scenario == scenario && c.mode == mode && c.fraction == fraction && c.gamma == gamma &&
        c.method == method)
      return c;
  throw Error(ErrorKind::Argument, "no such study cell");
}

std::uint64_t replication_seed(std::uint64_t base, int scenario, ContaminationMode mode,
                               double fraction, double gamma, int replication) {
  return derive_seed(base, {static_cast<std::uint64_t>(scenario), static_cast<std::uint64_t>(mode),
                            double_bits(fraction), double_bits(gamma),
                            static_cast<std::uint64_t>(replication)});
}

StudyReport run_study(const StudyGrid& grid, int replications, std::uint64_t base_seed, unsigned jobs) {
  if (replications < 1) throw Error(ErrorKind::Argument, "replications must be positive");
  if (grid.methods.empty() || grid.scenarios.empty() || grid.modes.empty() ||
      grid.fractions.empty() || grid.gammas.empty()) {
    throw Error(ErrorKind::Argument, "study grid has an empty axis");
  }
  std::vector<Scenario> scenarios;
  for (int id : grid.scenarios) scenarios.push_back(standard_scenario(id));
  const Scenario& first = scenarios.front();

  StudyReport report;
  report.grid = grid;
  report.replications = replications;
  report.base_seed = base_seed;
  const std::uint64_t cal_seed = derive_seed(base_seed, {0xca1ULL});
  const auto tuning = calibrate_tuning(first.length, first.series_count(), grid.window, grid.delta_c,
                                       grid.delta_r, grid.calibration_replications, cal_seed, jobs);
  report.rodessa_cell_tuning = tuning.cell;
  report.rodessa_case_tuning = tuning.casewise;
  report.cs_tuning = calibrate_entrywise_tuning(first.length, first.series_count(), grid.window,
                                                grid.delta_c, grid.calibration_replications,
                                                cal_seed, jobs);

  MethodConfig mc;
  mc.window = grid.window;
  mc.rank = grid.rank;
  mc.horizon = grid.horizon;
  mc.rodessa.cell_tuning = tuning.cell;
  mc.rodessa.case_tuning = tuning.casewise;
  mc.cs_tuning = report.cs_tuning;

  struct Task {
    std::size_t scenario;
    ContaminationMode mode;
    double fraction, gamma;
    int rep;
  };
  std::vector<Task> tasks;
  for (std::size_t s = 0; s < scenarios.size(); ++s)
    for (auto mode : grid.modes)
      for (double f : grid.fractions)
        for (double g : grid.gammas)
          for (int rep = 0; rep < replications; ++rep) tasks.push_back({s, mode, f, g, rep});

  struct Outcome {
    bool ok = false;
    bool converged = true;
    Metrics m;
  };
  const std::size_t M = grid.methods.size();
  std::vector<Outcome> results(tasks.size() * M);
  parallel_for(tasks.size(), jobs, [&](std::size_t t) {
    const Task& task = tasks[t];
    const Scenario& sc = scenarios[task.scenario];
    std::mt19937_64 gen(replication_seed(base_seed, sc.id, task.mode, task.fraction, task.gamma, task.rep));
    SimulatedSeries data = generate(sc, gen, grid.horizon, grid.shared_noise);
    contaminate(data.observed, sc.sigma, {task.mode, task.fraction, task.gamma}, gen);
    for (std::size_t k = 0; k < M; ++k) {
      Outcome& o = results[t * M + k];
      try {
        const MethodOutput out = run_method(grid.methods[k], data.observed, mc);
        o.m = metrics(out.reconstruction, out.forecasts, data.signal, data.extension);
        o.converged = out.converged;
        o.ok = true;
      } catch (const Error&) {
        o.ok = false;
      }
    }
  });

  for (std::size_t t = 0; t < tasks.size(); t += static_cast<std::size_t>(replications)) {
    const Task& task = tasks[t];
    for (std::size_t k = 0; k < M; ++k) {
      StudyCell cell;
      cell.scenario = scenarios[task.scenario].id;
      cell.mode = task.mode;
      cell.fraction = task.fraction;
      cell.gamma = task.gamma;
      cell.method = grid.methods[k];
      double re = 0.0, fe = 0.0;
      int ok = 0;
      for (int rep = 0; rep < replications; ++rep) {
        const Outcome& o = results[(t + static_cast<std::size_t>(rep)) * M + k];
        if (!o.ok) {
          ++cell.failures;
          continue;
        }
        if (!o.converged) ++cell.nonconverged;
        re += o.m.re;
        fe += o.m.fe;
        ++ok;
      }
      cell.replications = replications;
      const double nan = std::numeric_limits<double>::quiet_NaN();
      cell.mean_re = ok ? re / ok : nan;
      cell.mean_fe = ok ? fe / ok : nan;
      report.cells.push_back(cell);
    }
  }
  return report;
}

}  // namespace rodessa
