#include "cli.hpp"

#include "rodessa/calibration.hpp"
#include "rodessa/csv.hpp"
#include "rodessa/detect.hpp"
#include "rodessa/error.hpp"
#include "rodessa/forecast.hpp"
#include "rodessa/irls.hpp"
#include "rodessa/parallel.hpp"
#include "rodessa/random.hpp"
#include "rodessa/simulation.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

namespace fs = std::filesystem;

namespace rodessa::cli {

namespace {

constexpr const char* kVersion = "1.0.0";

struct Options {
  std::string input;
  std::string window = "auto";
  int rank = 2;
  double delta_c = 0.9;
  double delta_r = 0.9;
  double alpha = 0.01;
  double tol = 1e-6;
  int max_iter = 100;
  int horizon = -1;  // per-command default
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string method = "best";
  std::string out = ".";
  unsigned jobs = 0;  // per-command default
  int calibration_reps = 200;
  std::string cache;
  bool no_plot = false;

  // calibrate without input
  std::size_t length = 0;
  std::size_t series = 0;

  int max_rank = 10;

  // plot
  std::string report;

  // simulate / generate
  std::vector<int> scenarios{3};
  std::vector<std::string> modes{"cellwise"};
  std::vector<double> fractions{0.2};
  std::vector<double> gammas{0, 1, 2, 3, 4, 5, 6, 7, 8};
  std::vector<std::string> methods;
  int replications = 50;
  bool shared_noise = false;
  std::string scenario = "3";
  double sigma = 20.0;
  std::string mode = "none";
  double fraction = 0.0;
  double gamma = 0.0;
  std::string file = "series.csv";
};

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Argument:
    case ErrorKind::Configuration:
    case ErrorKind::InvalidWindow:
    case ErrorKind::Rank:
      return kUsage;
    case ErrorKind::Convergence:
      return kNonConvergence;
    default:
      return kData;
  }
}

std::string text(double v) { return format_double(v); }

template <class T>
std::string join(const std::vector<T>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ';';
    if constexpr (std::is_same_v<T, std::string>) {
      s += v[i];
    } else if constexpr (std::is_floating_point_v<T>) {
      s += format_double(v[i]);
    } else {
      s += std::to_string(v[i]);
    }
  }
  return s;
}

std::uint64_t entropy_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

void resolve_seed(Options& o, std::ostream& err) {
  if (o.seed_given) return;
  o.seed = entropy_seed();
  err << "seed=" << o.seed << " (from entropy; pass --seed " << o.seed << " to reproduce)\n";
}

std::size_t resolve_window(const std::string& w, std::size_t N, std::size_t p) {
  if (w == "auto") return default_window(N, p, WindowPolicy::Auto);
  if (w == "half") return default_window(N, p, WindowPolicy::Half);
  if (w == "multivariate") return default_window(N, p, WindowPolicy::Multivariate);
  std::size_t L = 0;
  const auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), L);
  if (ec != std::errc() || ptr != w.data() + w.size()) {
    throw Error(ErrorKind::Argument, "--window must be an integer, auto, half or multivariate");
  }
  return L;
}

InitPolicy init_policy(const std::string& m) {
  if (m == "best") return InitPolicy::BestOfThree;
  if (m == "svd") return InitPolicy::Svd;
  if (m == "l1") return InitPolicy::L1;
  if (m == "pcp") return InitPolicy::Pcp;
  throw Error(ErrorKind::Argument, "--method must be best, svd, l1 or pcp, got '" + m + "'");
}

fs::path cache_dir(const Options& o) {
  if (!o.cache.empty()) return o.cache;
  if (const char* env = std::getenv("RODESSA_CACHE")) return env;
  if (const char* xdg = std::getenv("XDG_CACHE_HOME")) return fs::path(xdg) / "rodessa";
  if (const char* home = std::getenv("HOME")) return fs::path(home) / ".cache" / "rodessa";
  return {};
}

CalibrationTable calibration_for(const Options& o, std::size_t N, std::size_t p, std::size_t L) {
  CalibrationSetup setup;
  setup.length = N;
  setup.series_count = p;
  setup.window = L;
  setup.delta_c = o.delta_c;
  setup.delta_r = o.delta_r;
  setup.alpha = o.alpha;
  setup.replications = o.calibration_reps;
  setup.seed = o.seed;
  setup.jobs = o.jobs;
  const fs::path dir = cache_dir(o);
  if (o.cache == "none" || dir.empty()) return calibrate(setup);
  return cached_calibration(setup, dir);
}

fs::path output_dir(const Options& o) {
  const fs::path dir(o.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create output directory " + dir.string());
  return dir;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Io, "cannot write " + path.string());
  f << content;
  if (!f) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

std::string comment_safe(std::string s) {
  for (std::size_t at; (at = s.find("--")) != std::string::npos;) s.replace(at, 2, "- -");
  return s;
}

// provenance as an XML comment after the declaration
std::string stamp_svg(const std::string& svg, const Provenance& prov) {
  std::string block = "<!--\n";
  for (const auto& [k, v] : prov) block += comment_safe(k + "=" + v) + "\n";
  block += "-->\n";
  const auto at = svg.find("?>\n");
  if (at == std::string::npos) return block + svg;
  return svg.substr(0, at + 3) + block + svg.substr(at + 3);
}

void echo(std::ostream& out, const Provenance& prov) {
  for (const auto& [k, v] : prov) out << k << '=' << v << '\n';
}

Provenance base_provenance(const std::string& command) {
  return {{"tool", "rodessa"}, {"version", kVersion}, {"command", command}};
}

// -------------------------------------------------------------------- fit

enum class FitKind { Fit, Forecast, Detect };

int cmd_fit(Options o, FitKind kind, std::ostream& out, std::ostream& err) {
  const char* name = kind == FitKind::Fit ? "fit" : kind == FitKind::Forecast ? "forecast" : "detect";
  const MultivariateSeries series = read_series_csv(fs::path(o.input));
  if (series.length() < 3) throw Error(ErrorKind::Data, "series too short to embed");
  resolve_seed(o, err);
  const std::size_t N = series.length(), p = series.count();
  const std::size_t L = resolve_window(o.window, N, p);
  EmbeddingSpec spec(L, N, p);  // validates the window
  if (o.rank < 1) throw Error(ErrorKind::Argument, "--rank must be positive");
  if (o.horizon < 0) throw Error(ErrorKind::Argument, "--horizon must be non-negative");

  const CalibrationTable table = calibration_for(o, N, p, L);
  RodessaConfig cfg;
  cfg.rank = o.rank;
  cfg.cell_tuning = table.tuning.cell;
  cfg.case_tuning = table.tuning.casewise;
  cfg.tolerance = o.tol;
  cfg.max_iterations = o.max_iter;
  cfg.init = init_policy(o.method);

  Provenance prov = base_provenance(name);
  prov.insert(prov.end(), {{"input", o.input},
                           {"length", std::to_string(N)},
                           {"series", std::to_string(p)},
                           {"window_policy", o.window},
                           {"window", std::to_string(L)},
                           {"rank", std::to_string(o.rank)},
                           {"delta_c", text(o.delta_c)},
                           {"delta_r", text(o.delta_r)},
                           {"alpha", text(o.alpha)},
                           {"tol", text(o.tol)},
                           {"max_iter", std::to_string(o.max_iter)},
                           {"horizon", std::to_string(o.horizon)},
                           {"seed", std::to_string(o.seed)},
                           {"method", o.method},
                           {"calibration_reps", std::to_string(o.calibration_reps)},
                           {"loss", "sqrt-biweight"},
                           {"c1", text(table.tuning.cell)},
                           {"c2", text(table.tuning.casewise)},
                           {"q_cell", text(table.quantiles.cell)},
                           {"q_case", text(table.quantiles.casewise)}});
  echo(out, prov);

  const RodessaResult result = irls_fit(series, L, cfg);
  for (const auto& w : result.warnings) err << "warning: " << w << '\n';
  const OutlierFlags flags = flag_outliers(result, series, table);

  std::optional<Matrix> forecasts;
  if (o.horizon > 0) {
    const RecurrenceModel model = recurrence_coefficients(result.fit);
    forecasts = forecast(model, result.reconstruction, o.horizon);
  }
  const PlotModel plot = build_plot_model(result, series, flags, forecasts);
  const Report report = make_report(result, plot, flags, prov);

  const fs::path dir = output_dir(o);
  {
    std::ostringstream s;
    write_series_csv(s, result.reconstruction, prov);
    write_file(dir / "reconstruction.csv", s.str());
  }
  write_file(dir / "report.json", emit_report(report));
  {
    std::ostringstream s;
    for (const auto& [k, v] : prov) s << "# " << k << '=' << v << '\n';
    s << "iteration,objective\n";
    for (std::size_t t = 0; t < result.objective_trace.size(); ++t) {
      s << t << ',' << text(result.objective_trace[t]) << '\n';
    }
    write_file(dir / "trace.csv", s.str());
  }
  if (forecasts) {
    std::ostringstream s;
    write_matrix_csv(s, *forecasts, series.names(), prov, N + 1);
    write_file(dir / "forecast.csv", s.str());
  }
  if (kind == FitKind::Detect) {
    Matrix m(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(p + 1));
    m.leftCols(static_cast<Eigen::Index>(p)) = flags.cell.cast<double>();
    for (std::size_t i = 0; i < N; ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(p)) = flags.casewise[i];
    std::vector<std::string> header = series.names();
    header.push_back("case");
    std::ostringstream s;
    write_matrix_csv(s, m, header, prov);
    write_file(dir / "flags.csv", s.str());
    out << "flagged_cells=" << flags.cell_count() << "\nflagged_cases=" << flags.case_count() << '\n';
  }
  if (!o.no_plot) write_file(dir / "plot.svg", stamp_svg(emit_svg(plot), prov));

  out << "iterations=" << result.iterations << "\nconverged=" << (result.converged ? "true" : "false")
      << "\ninitializer=" << result.initializer << '\n';
  if (!result.converged) {
    err << "error: no convergence after " << result.iterations << " iterations\n";
    return kNonConvergence;
  }
  return kSuccess;
}

// -------------------------------------------------------------- calibrate

int cmd_calibrate(Options o, std::ostream& out, std::ostream& err) {
  std::size_t N = o.length, p = o.series;
  if (!o.input.empty()) {
    const MultivariateSeries series = read_series_csv(fs::path(o.input));
    N = series.length();
    p = series.count();
  }
  if (N == 0 || p == 0) throw Error(ErrorKind::Argument, "give --input or both --length and --series");
  resolve_seed(o, err);
  const std::size_t L = resolve_window(o.window, N, p);
  EmbeddingSpec spec(L, N, p);
  const CalibrationTable table = calibration_for(o, N, p, L);

  Provenance prov = base_provenance("calibrate");
  prov.insert(prov.end(), {{"input", o.input},
                           {"window_policy", o.window},
                           {"jobs", std::to_string(o.jobs)}});
  std::ostringstream s;
  for (const auto& [k, v] : prov) s << "# " << k << '=' << v << '\n';
  write_calibration(s, table);
  write_file(output_dir(o) / "calibration.txt", s.str());
  echo(out, prov);
  write_calibration(out, table);
  return kSuccess;
}

// -------------------------------------------------------------- rank-scan

std::string rank_svg(const std::vector<RankPoint>& pts) {
  constexpr double W = 640, H = 400, M = 56;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& pt : pts) {
    if (pt.objective > 0.0) lo = std::min(lo, pt.objective);
    hi = std::max(hi, pt.objective);
  }
  if (!(hi > 0.0)) hi = 1.0;
  if (!std::isfinite(lo) || lo >= hi) lo = hi / 10.0;
  const double llo = std::log10(lo), lhi = std::log10(hi);
  auto fmt = [](double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
    return std::string(buf, ptr);
  };
  auto x = [&](double r) {
    const double span = pts.size() > 1 ? static_cast<double>(pts.size() - 1) : 1.0;
    return M + (W - 2 * M) * (r - 1.0) / span;
  };
  auto y = [&](double v) {
    const double t = v > 0.0 ? (std::log10(v) - llo) / (lhi - llo) : 0.0;
    return H - M - (H - 2 * M) * std::clamp(t, 0.0, 1.0);
  };
  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << fmt(W) << "\" height=\""
    << fmt(H) << "\">\n"
    << "<rect x=\"0\" y=\"0\" width=\"" << fmt(W) << "\" height=\"" << fmt(H) << "\" fill=\"white\"/>\n"
    << "<rect x=\"" << fmt(M) << "\" y=\"" << fmt(M) << "\" width=\"" << fmt(W - 2 * M) << "\" height=\""
    << fmt(H - 2 * M) << "\" fill=\"none\" stroke=\"#888\"/>\n"
    << "<text x=\"" << fmt(W / 2) << "\" y=\"" << fmt(H - 16) << "\" text-anchor=\"middle\" font-size=\"12\">rank</text>\n"
    << "<text x=\"" << fmt(M) << "\" y=\"" << fmt(M - 10) << "\" font-size=\"12\">objective (log scale)</text>\n";
  s << "<polyline fill=\"none\" stroke=\"#0040cc\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) s << ' ';
    s << fmt(x(static_cast<double>(pts[i].rank))) << ',' << fmt(y(pts[i].objective));
  }
  s << "\"/>\n";
  for (const auto& pt : pts) {
    const double px = x(static_cast<double>(pt.rank));
    s << "<circle cx=\"" << fmt(px) << "\" cy=\"" << fmt(y(pt.objective)) << "\" r=\"3\" fill=\""
      << (pt.converged ? "#0040cc" : "#cc0000") << "\"/>\n"
      << "<text x=\"" << fmt(px) << "\" y=\"" << fmt(H - M + 16) << "\" text-anchor=\"middle\" font-size=\"11\">"
      << pt.rank << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

int cmd_rank_scan(Options o, std::ostream& out, std::ostream& err) {
  const MultivariateSeries series = read_series_csv(fs::path(o.input));
  resolve_seed(o, err);
  const std::size_t N = series.length(), p = series.count();
  const std::size_t L = resolve_window(o.window, N, p);
  EmbeddingSpec spec(L, N, p);
  const auto limit = static_cast<int>(std::min(L, spec.columns()));
  if (o.max_rank < 1) throw Error(ErrorKind::Argument, "--max-rank must be positive");
  const int max_rank = std::min(o.max_rank, limit);

  const CalibrationTable table = calibration_for(o, N, p, L);
  RodessaConfig cfg;
  cfg.cell_tuning = table.tuning.cell;
  cfg.case_tuning = table.tuning.casewise;
  cfg.tolerance = o.tol;
  cfg.max_iterations = o.max_iter;
  cfg.init = init_policy(o.method);

  Provenance prov = base_provenance("rank-scan");
  prov.insert(prov.end(), {{"input", o.input},
                           {"length", std::to_string(N)},
                           {"series", std::to_string(p)},
                           {"window_policy", o.window},
                           {"window", std::to_string(L)},
                           {"max_rank", std::to_string(max_rank)},
                           {"delta_c", text(o.delta_c)},
                           {"delta_r", text(o.delta_r)},
                           {"tol", text(o.tol)},
                           {"max_iter", std::to_string(o.max_iter)},
                           {"seed", std::to_string(o.seed)},
                           {"method", o.method},
                           {"calibration_reps", std::to_string(o.calibration_reps)},
                           {"c1", text(table.tuning.cell)},
                           {"c2", text(table.tuning.casewise)}});
  echo(out, prov);

  const auto pts = rank_curve(series, L, cfg, max_rank);
  std::ostringstream s;
  for (const auto& [k, v] : prov) s << "# " << k << '=' << v << '\n';
  s << "rank,objective,converged\n";
  for (const auto& pt : pts) {
    s << pt.rank << ',' << text(pt.objective) << ',' << (pt.converged ? 1 : 0) << '\n';
    out << "rank " << pt.rank << " objective " << text(pt.objective) << (pt.converged ? "" : " (not converged)")
        << '\n';
  }
  const fs::path dir = output_dir(o);
  write_file(dir / "rank_scan.csv", s.str());
  if (!o.no_plot) write_file(dir / "rank_scan.svg", stamp_svg(rank_svg(pts), prov));
  return kSuccess;
}

// --------------------------------------------------------------- simulate

int cmd_simulate(Options o, std::ostream& out, std::ostream& err) {
  resolve_seed(o, err);
  StudyGrid grid;
  grid.scenarios = o.scenarios;
  grid.modes.clear();
  for (const auto& m : o.modes) grid.modes.push_back(parse_contamination_mode(m));
  grid.fractions = o.fractions;
  grid.gammas = o.gammas;
  if (!o.methods.empty()) {
    grid.methods.clear();
    for (const auto& m : o.methods) grid.methods.push_back(parse_method(m));
  }
  if (o.window != "auto") grid.window = resolve_window(o.window, 70, 4);
  grid.rank = o.rank;
  grid.horizon = o.horizon;
  grid.delta_c = o.delta_c;
  grid.delta_r = o.delta_r;
  grid.calibration_replications = o.calibration_reps;
  grid.shared_noise = o.shared_noise;
  if (o.replications < 1) throw Error(ErrorKind::Argument, "--replications must be positive");
  for (int sc : grid.scenarios) standard_scenario(sc);

  std::vector<std::string> method_names;
  for (Method m : grid.methods) method_names.emplace_back(to_string(m));
  std::vector<std::string> mode_names;
  for (auto m : grid.modes) mode_names.emplace_back(to_string(m));
  Provenance prov = base_provenance("simulate");
  prov.insert(prov.end(), {{"scenarios", join(grid.scenarios)},
                           {"modes", join(mode_names)},
                           {"fractions", join(grid.fractions)},
                           {"gammas", join(grid.gammas)},
                           {"methods", join(method_names)},
                           {"window", std::to_string(grid.window)},
                           {"rank", std::to_string(grid.rank)},
                           {"horizon", std::to_string(grid.horizon)},
                           {"delta_c", text(grid.delta_c)},
                           {"delta_r", text(grid.delta_r)},
                           {"calibration_reps", std::to_string(grid.calibration_replications)},
                           {"replications", std::to_string(o.replications)},
                           {"shared_noise", grid.shared_noise ? "true" : "false"},
                           {"seed", std::to_string(o.seed)}});
  echo(out, prov);

  const StudyReport report = run_study(grid, o.replications, o.seed, o.jobs);
  prov.emplace_back("rodessa_c1", text(report.rodessa_cell_tuning));
  prov.emplace_back("rodessa_c2", text(report.rodessa_case_tuning));
  prov.emplace_back("cs_tuning", text(report.cs_tuning));

  const fs::path dir = output_dir(o);
  std::ostringstream table;
  write_study_table(table, report, prov);
  write_file(dir / "study.csv", table.str());
  if (!o.no_plot) {
    for (int sc : grid.scenarios) {
      for (auto mode : grid.modes) {
        for (double f : grid.fractions) {
          const std::string name = "study-s" + std::to_string(sc) + "-" + to_string(mode) + "-" + text(f) + ".svg";
          write_file(dir / name, stamp_svg(emit_study_svg(report, sc, mode, f), prov));
        }
      }
    }
  }
  int failures = 0;
  for (const auto& c : report.cells) {
    out << "s" << c.scenario << ' ' << to_string(c.mode) << " eps=" << text(c.fraction) << " gamma="
        << text(c.gamma) << ' ' << to_string(c.method) << " RE=" << text(c.mean_re) << " FE=" << text(c.mean_fe)
        << '\n';
    failures += c.failures;
  }
  if (failures) err << "warning: " << failures << " replications failed and were excluded\n";
  return kSuccess;
}

// ------------------------------------------------------------------- plot

int cmd_plot(Options o, std::ostream& out, std::ostream&) {
  const MultivariateSeries series = read_series_csv(fs::path(o.input));
  std::ifstream f(o.report, std::ios::binary);
  if (!f) throw Error(ErrorKind::Io, "cannot open " + o.report);
  std::stringstream buf;
  buf << f.rdbuf();
  const Report r = parse_report(buf.str());
  const auto N = static_cast<Eigen::Index>(series.length());
  const auto p = static_cast<Eigen::Index>(series.count());
  if (r.residuals.rows() != N || r.residuals.cols() != p) {
    throw Error(ErrorKind::Data, "report does not match the input series");
  }
  PlotModel model;
  model.timestamps = series.timestamps();
  model.case_weights = r.case_weights;
  model.case_flags = r.case_flags;
  for (Eigen::Index j = 0; j < p; ++j) {
    SeriesPanel panel;
    panel.name = series.names()[static_cast<std::size_t>(j)];
    panel.raw = series.values().col(j);
    panel.residuals = r.residuals.col(j);
    panel.reconstructed = panel.raw - panel.residuals;
    panel.weights = r.cell_weights.col(j);
    panel.flags.assign(r.cell_flags.col(j).data(), r.cell_flags.col(j).data() + N);
    if (r.forecasts.size() > 0) panel.forecasts = r.forecasts.col(j);
    model.panels.push_back(std::move(panel));
  }
  Provenance prov = r.config;
  prov.emplace_back("plot_input", o.input);
  prov.emplace_back("plot_report", o.report);
  write_file(output_dir(o) / "plot.svg", stamp_svg(emit_svg(model), prov));
  echo(out, prov);
  return kSuccess;
}

// --------------------------------------------------------------- generate

int cmd_generate(Options o, std::ostream& out, std::ostream& err) {
  resolve_seed(o, err);
  Provenance prov = base_provenance("generate");
  prov.emplace_back("scenario", o.scenario);
  prov.emplace_back("seed", std::to_string(o.seed));
  MultivariateSeries series;
  if (o.scenario == "demo") {
    series = demo_series(o.seed);
  } else {
    int id = 0;
    const auto [ptr, ec] = std::from_chars(o.scenario.data(), o.scenario.data() + o.scenario.size(), id);
    if (ec != std::errc() || ptr != o.scenario.data() + o.scenario.size()) {
      throw Error(ErrorKind::Argument, "--scenario must be 1, 2, 3 or demo");
    }
    Scenario s = standard_scenario(id);
    if (o.length > 0) s.length = o.length;
    s.sigma = o.sigma;
    std::mt19937_64 gen(o.seed);
    SimulatedSeries d = generate(s, gen, 0, o.shared_noise);
    const Contamination c{parse_contamination_mode(o.mode), o.fraction, o.gamma};
    contaminate(d.observed, s.sigma, c, gen);
    std::vector<std::string> names;
    for (Eigen::Index j = 0; j < d.observed.cols(); ++j) names.push_back("x" + std::to_string(j + 1));
    series = MultivariateSeries(d.observed, names);
    prov.insert(prov.end(), {{"length", std::to_string(s.length)},
                             {"sigma", text(s.sigma)},
                             {"shared_noise", o.shared_noise ? "true" : "false"},
                             {"mode", o.mode},
                             {"fraction", text(o.fraction)},
                             {"gamma", text(o.gamma)}});
  }
  std::ostringstream s;
  write_series_csv(s, series, prov);
  write_file(output_dir(o) / o.file, s.str());
  echo(out, prov);
  return kSuccess;
}

// ---------------------------------------------------------------- options

void add_fit_options(CLI::App* sub, Options& o) {
  sub->add_option("input,--input,-i", o.input, "series CSV")->required();
  sub->add_option("--window,-L", o.window, "window length, or auto|half|multivariate");
  sub->add_option("--delta-c", o.delta_c, "target mean cell weight")->check(CLI::Range(0.0, 1.0));
  sub->add_option("--delta-r", o.delta_r, "target mean case weight")->check(CLI::Range(0.0, 1.0));
  sub->add_option("--tol", o.tol, "relative convergence tolerance")->check(CLI::PositiveNumber);
  sub->add_option("--max-iter", o.max_iter, "IRLS iteration limit")->check(CLI::PositiveNumber);
  sub->add_option("--method", o.method, "initial fit: best|svd|l1|pcp");
  sub->add_option("--calibration-reps", o.calibration_reps, "reference simulations for calibration")
      ->check(CLI::PositiveNumber);
  sub->add_option("--cache", o.cache, "calibration cache directory, or none");
  sub->add_flag("--no-plot", o.no_plot, "skip the SVG");
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--out,-o", o.out, "output directory");
  sub->add_option("--jobs,-j", o.jobs, "worker threads")->check(CLI::PositiveNumber);
  auto* seed = sub->add_option("--seed", o.seed, "base seed; drawn from entropy when omitted");
  seed->each([&o](const std::string&) { o.seed_given = true; });
}

}  // namespace

MultivariateSeries demo_series(std::uint64_t seed) {
  constexpr int N = 176, p = 6;
  constexpr double pi = 3.14159265358979323846;
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 1.0);
  Matrix x(N, p);
  std::vector<std::string> names{"north", "south", "east", "west", "central", "coast"};
  for (int j = 0; j < p; ++j) {
    const double level = 50.0 + 10.0 * j, slope = 0.05 + 0.02 * j;
    const double a12 = 8.0 + 2.0 * uni(gen), f12 = 2 * pi * uni(gen);
    const double a6 = 3.0 + uni(gen), f6 = 2 * pi * uni(gen);
    const double a2 = 1.0 + 0.5 * uni(gen);
    for (int i = 0; i < N; ++i) {
      const double t = i + 1;
      x(i, j) = level + slope * t + a12 * std::cos(2 * pi * t / 12 + f12) + a6 * std::cos(2 * pi * t / 6 + f6) +
                a2 * std::cos(pi * t) + noise(gen);
    }
  }
  // isolated spikes and one disturbed month
  x(30, 1) += 12.0;
  x(75, 4) -= 12.0;
  x(140, 0) += 10.0;
  x.row(110).array() += 9.0;
  std::vector<std::string> stamps;
  for (int i = 0; i < N; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d", 2005 + i / 12, i % 12 + 1);
    stamps.emplace_back(buf);
  }
  return MultivariateSeries(x, names, stamps);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robust multivariate singular spectrum analysis", "rodessa"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Options o;
  const unsigned cores = default_jobs();

  auto* fit = app.add_subcommand("fit", "robust reconstruction with weights and flags");
  auto* fc = app.add_subcommand("forecast", "fit, then continue the reconstruction");
  auto* det = app.add_subcommand("detect", "fit and report flagged cells and cases");
  for (auto* sub : {fit, fc, det}) {
    add_fit_options(sub, o);
    add_common(sub, o);
    sub->add_option("--rank,-q", o.rank, "rank q")->check(CLI::PositiveNumber);
    sub->add_option("--alpha", o.alpha, "flagging level")->check(CLI::Range(0.0, 1.0));
    sub->add_option("--horizon", o.horizon, "forecast horizon")->check(CLI::NonNegativeNumber);
  }

  auto* cal = app.add_subcommand("calibrate", "tuning constants and flag thresholds");
  cal->add_option("--input,-i", o.input, "series CSV giving N and p");
  cal->add_option("--length,-N", o.length, "series length N");
  cal->add_option("--series,-p", o.series, "number of series p");
  cal->add_option("--window,-L", o.window, "window length, or auto|half|multivariate");
  cal->add_option("--delta-c", o.delta_c)->check(CLI::Range(0.0, 1.0));
  cal->add_option("--delta-r", o.delta_r)->check(CLI::Range(0.0, 1.0));
  cal->add_option("--alpha", o.alpha)->check(CLI::Range(0.0, 1.0));
  cal->add_option("--calibration-reps", o.calibration_reps)->check(CLI::PositiveNumber);
  cal->add_option("--cache", o.cache, "calibration cache directory, or none");
  add_common(cal, o);

  auto* scan = app.add_subcommand("rank-scan", "final objective against rank");
  add_fit_options(scan, o);
  add_common(scan, o);
  scan->add_option("--max-rank", o.max_rank, "largest rank")->check(CLI::PositiveNumber);

  auto* sim = app.add_subcommand("simulate", "Monte Carlo comparison of the methods");
  sim->add_option("--scenario", o.scenarios, "scenario ids 1-3")->delimiter(',');
  sim->add_option("--mode", o.modes, "none|cellwise|casewise")->delimiter(',');
  sim->add_option("--fraction", o.fractions, "contamination fractions")->delimiter(',');
  sim->add_option("--gamma", o.gammas, "outlier sizes in noise sd")->delimiter(',');
  sim->add_option("--method", o.methods, "CMSSA,RLM,CS,CHENG,RODESSA")->delimiter(',');
  sim->add_option("--replications,-r", o.replications)->check(CLI::PositiveNumber);
  sim->add_option("--window,-L", o.window, "window length (default 35)");
  sim->add_option("--rank,-q", o.rank)->check(CLI::PositiveNumber);
  sim->add_option("--horizon", o.horizon)->check(CLI::NonNegativeNumber);
  sim->add_option("--delta-c", o.delta_c)->check(CLI::Range(0.0, 1.0));
  sim->add_option("--delta-r", o.delta_r)->check(CLI::Range(0.0, 1.0));
  sim->add_option("--calibration-reps", o.calibration_reps)->check(CLI::PositiveNumber);
  sim->add_flag("--shared-noise", o.shared_noise, "one noise draw per time point");
  sim->add_flag("--no-plot", o.no_plot);
  add_common(sim, o);

  auto* plot = app.add_subcommand("plot", "redraw the SVG from a saved report");
  plot->add_option("input,--input,-i", o.input, "series CSV")->required();
  plot->add_option("--report", o.report, "report.json from fit/detect/forecast")->required();
  plot->add_option("--out,-o", o.out, "output directory");

  auto* gen = app.add_subcommand("generate", "write a simulated or demo series CSV");
  gen->add_option("--scenario", o.scenario, "1, 2, 3 or demo");
  gen->add_option("--length,-N", o.length, "series length (scenarios only)");
  gen->add_option("--sigma", o.sigma)->check(CLI::NonNegativeNumber);
  gen->add_option("--mode", o.mode, "none|cellwise|casewise");
  gen->add_option("--fraction", o.fraction)->check(CLI::Range(0.0, 1.0));
  gen->add_option("--gamma", o.gamma)->check(CLI::NonNegativeNumber);
  gen->add_flag("--shared-noise", o.shared_noise);
  gen->add_option("--file", o.file, "file name inside --out");
  add_common(gen, o);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  }
  if (o.horizon < 0) o.horizon = (fc->parsed() || sim->parsed()) ? 20 : 0;
  if (o.jobs == 0) o.jobs = (cal->parsed() || sim->parsed()) ? cores : 1;

  try {
    if (fit->parsed()) return cmd_fit(o, FitKind::Fit, out, err);
    if (fc->parsed()) return cmd_fit(o, FitKind::Forecast, out, err);
    if (det->parsed()) return cmd_fit(o, FitKind::Detect, out, err);
    if (cal->parsed()) return cmd_calibrate(o, out, err);
    if (scan->parsed()) return cmd_rank_scan(o, out, err);
    if (sim->parsed()) return cmd_simulate(o, out, err);
    if (plot->parsed()) return cmd_plot(o, out, err);
    if (gen->parsed()) return cmd_generate(o, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kData;
  }
  return kUsage;
}

}  // namespace rodessa::cli
