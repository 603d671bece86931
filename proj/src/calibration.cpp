#include "rodessa/calibration.hpp"

#include "rodessa/csv.hpp"
#include "rodessa/error.hpp"
#include "rodessa/parallel.hpp"
#include "rodessa/random.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>

namespace rodessa {

namespace {

constexpr double kTuningLow = 0.1;
constexpr double kTuningHigh = 50.0;

void check_dims(std::size_t length, std::size_t series_count, std::size_t window, int replications) {
  EmbeddingSpec(window, length, series_count);  // validates the window
  if (series_count < 1) throw Error(ErrorKind::Argument, "need at least one series");
  if (replications < 1) throw Error(ErrorKind::Argument, "replications must be positive");
}

void check_target(double delta, const char* name) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw Error(ErrorKind::Argument, std::string(name) + " must lie in (0, 1)");
  }
}

// One reference-model draw. The fit equals the truth, so every anti-diagonal
// of the residual trajectory matrix is constant and r_i^(j) = e_i^(j)^2.
struct Draw {
  Matrix r;             // N x p
  Vector cell_scales;   // sigma_1j
};

double scale_or_throw(const Matrix& z, const char* what) {
  try {
    return mscale({z.data(), static_cast<std::size_t>(z.size())});
  } catch (const Error& e) {
    throw Error(ErrorKind::Calibration, std::string(what) + ": " + e.what());
  }
}

std::vector<Draw> draw_reference(std::size_t length, std::size_t series_count, int replications,
                                 std::uint64_t seed, unsigned jobs) {
  std::vector<Draw> draws(static_cast<std::size_t>(replications));
  parallel_for(draws.size(), jobs, [&](std::size_t rep) {
    std::mt19937_64 gen(derive_seed(seed, {rep}));
    const Matrix e = normal_matrix(static_cast<Eigen::Index>(length),
                                   static_cast<Eigen::Index>(series_count), gen);
    Draw d;
    d.r = e.array().square();
    d.cell_scales.resize(e.cols());
    for (Eigen::Index j = 0; j < e.cols(); ++j) {
      d.cell_scales(j) = scale_or_throw(e.col(j).cwiseAbs(), "reference cell scale");
    }
    draws[rep] = std::move(d);
  });
  return draws;
}

// r_i / sigma_2^2 for every case of every draw.
std::vector<double> standardized_case_residuals(const std::vector<Draw>& draws, double cell_tuning) {
  const auto rho1 = LossSpec::sqrt_biweight(cell_tuning);
  std::vector<double> out;
  for (const Draw& d : draws) {
    const Vector rc = case_residuals(d.r, d.cell_scales, rho1);
    const double s2 = scale_or_throw(rc.cwiseSqrt(), "reference case scale");
    for (Eigen::Index i = 0; i < rc.size(); ++i) out.push_back(rc(i) / (s2 * s2));
  }
  return out;
}

std::vector<double> standardized_cell_residuals(const std::vector<Draw>& draws) {
  std::vector<double> out;
  for (const Draw& d : draws) {
    for (Eigen::Index j = 0; j < d.r.cols(); ++j) {
      const double s = d.cell_scales(j);
      for (Eigen::Index i = 0; i < d.r.rows(); ++i) out.push_back(d.r(i, j) / (s * s));
    }
  }
  return out;
}

double mean_weight(const std::vector<double>& t, double tuning) {
  const auto loss = LossSpec::sqrt_biweight(tuning);
  double s = 0.0;
  for (double v : t) s += standardized_weight(loss, v);
  return s / static_cast<double>(t.size());
}

double solve_tuning(const std::vector<double>& t, double target, const char* what) {
  double lo = kTuningLow, hi = kTuningHigh;
  const double f_lo = mean_weight(t, lo), f_hi = mean_weight(t, hi);
  if (!(f_lo <= target && target <= f_hi)) {
    std::ostringstream msg;
    msg << what << ": target " << target << " not bracketed; mean weight is " << f_lo << " at c="
        << lo << " and " << f_hi << " at c=" << hi;
    throw Error(ErrorKind::Calibration, msg.str());
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mean_weight(t, mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::string fmt(double v) { return format_double(v); }

double parse_number(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorKind::Data, "calibration file: bad value for " + key + ": '" + text + "'");
  }
  return v;
}

}  // namespace

std::size_t default_window(std::size_t length, std::size_t series_count, WindowPolicy policy) {
  if (length < 3) throw Error(ErrorKind::InvalidWindow, "series too short for any window");
  if (series_count < 1) throw Error(ErrorKind::Argument, "need at least one series");
  if (policy == WindowPolicy::Auto) {
    policy = series_count <= kSmallSeriesCount ? WindowPolicy::Multivariate : WindowPolicy::Half;
  }
  const double n = static_cast<double>(length), p = static_cast<double>(series_count);
  const double raw = policy == WindowPolicy::Multivariate ? p * n / (p + 1.0) : n / 2.0;
  const auto L = static_cast<std::size_t>(std::llround(raw));
  return std::clamp<std::size_t>(L, 2, length - 1);
}

bool CalibrationTable::matches(std::size_t length, std::size_t series_count,
                               std::size_t window) const {
  return setup.length == length && setup.series_count == series_count && setup.window == window;
}

double standardized_weight(const LossSpec& loss, double t) {
  return rho_prime(loss, t) / max_weight(loss);
}

double empirical_quantile(std::vector<double> values, double alpha) {
  if (values.empty()) throw Error(ErrorKind::Argument, "quantile of an empty sample");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorKind::Argument, "alpha must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = alpha * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

ReferenceWeights reference_weights(std::size_t length, std::size_t series_count,
                                   std::size_t window, const TuningConstants& tuning,
                                   int replications, std::uint64_t seed, unsigned jobs) {
  check_dims(length, series_count, window, replications);
  const auto draws = draw_reference(length, series_count, replications, seed, jobs);
  ReferenceWeights out;
  const auto rho1 = LossSpec::sqrt_biweight(tuning.cell);
  const auto rho2 = LossSpec::sqrt_biweight(tuning.casewise);
  for (double t : standardized_cell_residuals(draws)) out.cell.push_back(standardized_weight(rho1, t));
  for (double t : standardized_case_residuals(draws, tuning.cell)) {
    out.casewise.push_back(standardized_weight(rho2, t));
  }
  return out;
}

TuningConstants calibrate_tuning(std::size_t length, std::size_t series_count, std::size_t window,
                                 double delta_c, double delta_r, int replications,
                                 std::uint64_t seed, unsigned jobs) {
  check_target(delta_c, "delta_c");
  check_target(delta_r, "delta_r");
  check_dims(length, series_count, window, replications);
  const auto draws = draw_reference(length, series_count, replications, seed, jobs);
  TuningConstants c;
  c.cell = solve_tuning(standardized_cell_residuals(draws), delta_c, "cell tuning");
  c.casewise = solve_tuning(standardized_case_residuals(draws, c.cell), delta_r, "case tuning");
  return c;
}

double calibrate_entrywise_tuning(std::size_t length, std::size_t series_count, std::size_t window,
                                  double delta, int replications, std::uint64_t seed,
                                  unsigned jobs) {
  check_target(delta, "delta");
  check_dims(length, series_count, window, replications);
  const EmbeddingSpec spec(window, length, series_count);
  std::vector<std::vector<double>> per_rep(static_cast<std::size_t>(replications));
  parallel_for(per_rep.size(), jobs, [&](std::size_t rep) {
    std::mt19937_64 gen(derive_seed(seed, {rep}));
    const Matrix e = normal_matrix(static_cast<Eigen::Index>(length),
                                   static_cast<Eigen::Index>(series_count), gen);
    const Matrix X = embed(e, spec).data;
    const double s = mad_scale(X);
    if (!(s > 0.0)) throw Error(ErrorKind::Calibration, "reference MAD is zero");
    auto& t = per_rep[rep];
    t.reserve(static_cast<std::size_t>(X.size()));
    for (Eigen::Index i = 0; i < X.size(); ++i) t.push_back(X.data()[i] * X.data()[i] / (s * s));
  });
  std::vector<double> t;
  for (const auto& v : per_rep) t.insert(t.end(), v.begin(), v.end());
  return solve_tuning(t, delta, "entrywise tuning");
}

FlagQuantiles flagging_quantiles(std::size_t length, std::size_t series_count, std::size_t window,
                                 const TuningConstants& tuning, double alpha, int replications,
                                 std::uint64_t seed, unsigned jobs) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorKind::Argument, "alpha must lie in [0, 1]");
  ReferenceWeights w =
      reference_weights(length, series_count, window, tuning, replications, seed, jobs);
  return {empirical_quantile(std::move(w.cell), alpha),
          empirical_quantile(std::move(w.casewise), alpha)};
}

CalibrationTable calibrate(const CalibrationSetup& s) {
  CalibrationTable t;
  t.setup = s;
  t.tuning = calibrate_tuning(s.length, s.series_count, s.window, s.delta_c, s.delta_r,
                              s.replications, s.seed, s.jobs);
  t.quantiles = flagging_quantiles(s.length, s.series_count, s.window, t.tuning, s.alpha,
                                   s.replications, derive_seed(s.seed, {1}), s.jobs);
  return t;
}

void write_calibration(std::ostream& out, const CalibrationTable& t) {
  const auto& s = t.setup;
  out << "# rodessa calibration table\n"
      << "length=" << s.length << "\n"
      << "series_count=" << s.series_count << "\n"
      << "window=" << s.window << "\n"
      << "delta_c=" << fmt(s.delta_c) << "\n"
      << "delta_r=" << fmt(s.delta_r) << "\n"
      << "alpha=" << fmt(s.alpha) << "\n"
      << "replications=" << s.replications << "\n"
      << "seed=" << s.seed << "\n"
      << "cell_tuning=" << fmt(t.tuning.cell) << "\n"
      << "case_tuning=" << fmt(t.tuning.casewise) << "\n"
      << "cell_quantile=" << fmt(t.quantiles.cell) << "\n"
      << "case_quantile=" << fmt(t.quantiles.casewise) << "\n";
}

CalibrationTable read_calibration(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::Data, "calibration file: bad line '" + line + "'");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  auto get = [&](const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw Error(ErrorKind::Data, "calibration file: missing " + key);
    return parse_number(key, it->second);
  };
  auto get_int = [&](const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw Error(ErrorKind::Data, "calibration file: missing " + key);
    std::uint64_t v = 0;
    const auto& text = it->second;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      throw Error(ErrorKind::Data, "calibration file: bad value for " + key);
    }
    return v;
  };
  CalibrationTable t;
  t.setup.length = get_int("length");
  t.setup.series_count = get_int("series_count");
  t.setup.window = get_int("window");
  t.setup.delta_c = get("delta_c");
  t.setup.delta_r = get("delta_r");
  t.setup.alpha = get("alpha");
  t.setup.replications = static_cast<int>(get_int("replications"));
  t.setup.seed = get_int("seed");
  t.tuning = {get("cell_tuning"), get("case_tuning")};
  t.quantiles = {get("cell_quantile"), get("case_quantile")};
  if (!(t.tuning.cell > 0.0 && t.tuning.casewise > 0.0)) {
    throw Error(ErrorKind::Data, "calibration file: tuning constants must be positive");
  }
  return t;
}

std::filesystem::path calibration_cache_path(const CalibrationSetup& s,
                                             const std::filesystem::path& cache_dir) {
  const std::uint64_t key =
      derive_seed(s.seed, {s.length, s.series_count, s.window, double_bits(s.delta_c),
                           double_bits(s.delta_r), double_bits(s.alpha),
                           static_cast<std::uint64_t>(s.replications)});
  std::ostringstream name;
  name << "calibration-" << s.length << "x" << s.series_count << "-L" << s.window << "-"
       << std::hex << std::setw(16) << std::setfill('0') << key << ".txt";
  return cache_dir / name.str();
}

CalibrationTable cached_calibration(const CalibrationSetup& setup,
                                    const std::filesystem::path& cache_dir) {
  const auto path = calibration_cache_path(setup, cache_dir);
  if (std::ifstream in(path); in) {
    CalibrationTable t = read_calibration(in);
    const auto& s = t.setup;
    if (s.length == setup.length && s.series_count == setup.series_count &&
        s.window == setup.window && s.delta_c == setup.delta_c && s.delta_r == setup.delta_r &&
        s.alpha == setup.alpha && s.replications == setup.replications && s.seed == setup.seed) {
      t.setup.jobs = setup.jobs;
      return t;
    }
  }
  CalibrationTable t = calibrate(setup);
  std::error_code ec;
  std::filesystem::create_directories(cache_dir, ec);
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw Error(ErrorKind::Io, "cannot write calibration cache " + tmp);
    write_calibration(out, t);
  }
  std::filesystem::rename(tmp, path);
  return t;
}

std::vector<RankPoint> rank_curve(const MultivariateSeries& series, std::size_t window,
                                  const RodessaConfig& config, Eigen::Index max_rank) {
  const EmbeddingSpec spec(window, series.length(), series.count());
  const auto limit = static_cast<Eigen::Index>(std::min(spec.window(), spec.columns()));
  if (max_rank < 1 || max_rank > limit) {
    throw Error(ErrorKind::Rank, "maximum rank " + std::to_string(max_rank) + " outside [1, " +
                                     std::to_string(limit) + "]");
  }
  const Matrix X = embed(series.values(), spec).data;
  RodessaConfig cfg = config;
  cfg.rank = 1;
  const Scales scales = initialize(series, spec, cfg).scales;

  std::vector<RankPoint> out;
  std::optional<LowRankFit> previous;
  for (Eigen::Index r = 1; r <= max_rank; ++r) {
    cfg.rank = r;
    InitialState fresh = initialize(series, spec, cfg);
    fresh.scales = scales;
    RodessaResult best = irls_solve(series, spec, cfg, std::move(fresh));
    if (previous) {
      const Matrix R = X - previous->product();
      if (R.norm() > 0.0) {
        Eigen::BDCSVD<Matrix> svd(R, Eigen::ComputeThinU);
        InitialState warm;
        warm.fit.U.resize(previous->U.rows(), r);
        warm.fit.V.resize(previous->V.rows(), r);
        warm.fit.U << previous->U, svd.matrixU().col(0) * std::sqrt(svd.singularValues()(0));
        warm.fit.V << previous->V, Vector::Zero(previous->V.rows());
        warm.scales = scales;
        warm.initializer = "nested";
        RodessaResult nested = irls_solve(series, spec, cfg, std::move(warm));
        if (nested.objective_trace.back() < best.objective_trace.back()) best = std::move(nested);
      }
    }
    out.push_back({r, best.objective_trace.back(), best.converged});
    previous = best.fit;
  }
  return out;
}

}  // namespace rodessa
