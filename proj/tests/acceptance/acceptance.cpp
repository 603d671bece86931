// One line per acceptance criterion; exit status is the number of failures.

#include "cli.hpp"

#include "rodessa/calibration.hpp"
#include "rodessa/detect.hpp"
#include "rodessa/forecast.hpp"
#include "rodessa/irls.hpp"
#include "rodessa/lowrank.hpp"
#include "rodessa/parallel.hpp"
#include "rodessa/random.hpp"
#include "rodessa/robust_loss.hpp"
#include "rodessa/simulation.hpp"
#include "rodessa/wls.hpp"

#include <Eigen/SVD>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <unistd.h>

using namespace rodessa;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("criterion %2d %s  %s: %s (%.1f s)\n", id, o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Matrix normal(Eigen::Index r, Eigen::Index c, std::mt19937_64& gen, double sd = 1.0) {
  std::normal_distribution<double> d(0.0, sd);
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = d(gen);
  return m;
}

const CalibrationTable& table70() {
  static const CalibrationTable t = [] {
    CalibrationSetup s;
    s.length = 70;
    s.series_count = 4;
    s.window = 35;
    s.seed = 7;
    s.jobs = default_jobs();
    return calibrate(s);
  }();
  return t;
}

RodessaConfig config70() {
  RodessaConfig c;
  c.rank = 2;
  c.cell_tuning = table70().tuning.cell;
  c.case_tuning = table70().tuning.casewise;
  return c;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace

int main() {
  criterion(1, "round trip", [] {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 gen(1);
    double worst = 0.0, worst_embed = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
      const auto N = std::uniform_int_distribution<std::size_t>(5, 100)(gen);
      const auto p = std::uniform_int_distribution<std::size_t>(1, 6)(gen);
      const auto L = std::uniform_int_distribution<std::size_t>(2, N - 1)(gen);
      const Matrix x = normal(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(p), gen, 100.0);
      const EmbeddingSpec spec(L, N, p);
      const Matrix X = embed(x, spec).data;
      // entry (l, k) of block j is x_{l+k-1}
      const std::size_t Ku = N - L + 1;
      for (std::size_t j = 0; j < p; ++j)
        for (std::size_t l = 0; l < L; ++l)
          for (std::size_t k = 0; k < Ku; ++k)
            worst_embed = std::max(worst_embed,
                                   std::abs(X(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(j * Ku + k)) -
                                            x(static_cast<Eigen::Index>(l + k), static_cast<Eigen::Index>(j))));
      worst = std::max(worst, (diagonal_average(X, spec) - x).cwiseAbs().maxCoeff());
    }
    const double secs = seconds_since(t0);
    return Outcome{worst < 1e-12 && worst_embed == 0.0 && secs < 5.0,
                   fmt("max |S - avg(embed(S))| = %.2e, embedding mismatch %.1e, %.2f s", worst, worst_embed, secs)};
  });

  criterion(2, "monotone descent", [] {
    const auto t0 = std::chrono::steady_clock::now();
    const Scenario s3 = standard_scenario(3);
    const RodessaConfig cfg = config70();
    std::vector<double> excess(100, 0.0);
    std::vector<int> sweeps(100, 0);
    parallel_for(100, default_jobs(), [&](std::size_t rep) {
      std::mt19937_64 gen(derive_seed(2, {rep}));
      auto d = generate(s3, gen, 0);
      const auto mode = rep % 2 ? ContaminationMode::Casewise : ContaminationMode::Cellwise;
      const double gamma = std::uniform_real_distribution<double>(0.0, 12.0)(gen);
      const double eps = std::uniform_real_distribution<double>(0.0, 0.3)(gen);
      contaminate(d.observed, s3.sigma, {mode, eps, gamma}, gen);
      const auto r = irls_fit(MultivariateSeries(d.observed), 35, cfg);
      const auto& tr = r.objective_trace;
      double e = -std::numeric_limits<double>::infinity();
      for (std::size_t t = 1; t < tr.size(); ++t) e = std::max(e, (tr[t] - tr[t - 1]) / tr.front());
      excess[rep] = e;
      sweeps[rep] = r.iterations;
    });
    double worst = -std::numeric_limits<double>::infinity();
    int total = 0;
    for (int rep = 0; rep < 100; ++rep) {
      worst = std::max(worst, excess[static_cast<std::size_t>(rep)]);
      total += sweeps[static_cast<std::size_t>(rep)];
    }
    const double secs = seconds_since(t0);
    return Outcome{worst <= 1e-10 && secs < 120.0,
                   fmt("%.0f sweeps over 100 instances, largest relative increase %.2e, %.1f s", total, worst, secs)};
  });

  criterion(3, "stationarity", [] {
    const Scenario s3 = standard_scenario(3);
    RodessaConfig cfg = config70();
    cfg.tolerance = 1e-12;
    cfg.max_iterations = 5000;
    int converged = 0;
    double worst = 0.0;
    for (std::uint64_t rep = 0; rep < 10; ++rep) {
      std::mt19937_64 gen(derive_seed(3, {rep}));
      auto d = generate(s3, gen, 0);
      contaminate(d.observed, s3.sigma, {ContaminationMode::Cellwise, 0.1, 6.0}, gen);
      const auto r = irls_fit(MultivariateSeries(d.observed), 35, cfg);
      if (!r.converged) continue;
      ++converged;
      const Matrix X = embed(d.observed, r.spec).data;
      const auto g = wls_gradient_norms(r.fit, WeightedProblem(X, r.weights.W));
      worst = std::max(worst, std::max(g.rows, g.columns) / X.norm());
    }
    return Outcome{converged == 10 && worst < 1e-6,
                   fmt("%.0f/10 fits converged, largest gradient norm / ||X||_F = %.2e", converged, worst)};
  });

  criterion(4, "M-scale", [] {
    std::mt19937_64 gen(4);
    const MScaleConfig cfg;
    double worst = 0.0;
    auto check = [&](const std::vector<double>& v) {
      const double s = mscale(v, cfg);
      worst = std::max(worst, std::abs(mscale_equation(v, s, cfg) - cfg.delta));
      return s;
    };
    std::normal_distribution<double> z(0.0, 1.0);
    std::cauchy_distribution<double> cauchy(0.0, 1.0);
    std::vector<double> big(100000);
    for (double& v : big) v = std::abs(z(gen));
    const double sigma = check(big);
    for (int rep = 0; rep < 300; ++rep) {
      const auto n = std::uniform_int_distribution<std::size_t>(5, 2000)(gen);
      const double scale = std::pow(10.0, std::uniform_real_distribution<double>(-4, 4)(gen));
      std::vector<double> v(n);
      for (double& x : v) x = scale * (rep % 3 == 0 ? cauchy(gen) : rep % 3 == 1 ? z(gen) : z(gen) * z(gen));
      for (std::size_t k = 0; k < n / 5; ++k) v[k] += rep % 2 ? 50 * scale : 0.0;
      check(v);
    }
    const bool ok = cfg.delta == 0.5 && std::abs(cfg.tuning - 1.548) < 1e-12;
    return Outcome{ok && worst < 1e-8 && sigma >= 0.95 && sigma <= 1.05,
                   fmt("sigma(|N(0,1)|, n=1e5) = %.4f, largest equation residual over 301 calls %.1e", sigma, worst)};
  });

  criterion(5, "reduction to least squares", [] {
    std::mt19937_64 gen(5);
    const LossPair abs{LossSpec::absolute(), LossSpec::absolute()};
    double worst = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
      // a 6 x 8 trajectory matrix: one series of length 13 or two of length 9
      const std::size_t p = rep % 2 ? 2 : 1, N = p == 1 ? 13 : 9;
      const EmbeddingSpec spec(6, N, p);
      const Matrix x = normal(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(p), gen, 3.0);
      const Eigen::Index q = 1 + rep % 4;
      const LowRankFit fit{normal(6, q, gen), normal(8, q, gen)};
      const double frob = (embed(x, spec).data - fit.U * fit.V.transpose()).squaredNorm();
      const double obj = objective(x, fit, spec, Scales::unit(p), abs);
      worst = std::max(worst, std::abs(obj - frob) / frob);
    }
    return Outcome{worst < 1e-10, fmt("largest relative gap over 20 instances %.1e", worst)};
  });

  criterion(6, "clean-data rank", [] {
    const Scenario s3 = standard_scenario(3);
    const Matrix s = scenario_signal(s3, 1, 70);
    Eigen::JacobiSVD<Matrix> svd(embed(s, EmbeddingSpec(35, 70, 4)).data);
    const Vector sv = svd.singularValues();
    const double ratio3 = sv(2) / sv(0);
    const auto curve = rank_curve(MultivariateSeries(s), 35, config70(), 3);
    const double ratio2 = curve[1].objective / curve[0].objective;
    return Outcome{ratio3 < 1e-8 && ratio2 < 0.01,
                   fmt("sigma3/sigma1 = %.1e, objective(r=2)/objective(r=1) = %.1e", ratio3, ratio2)};
  });

  StudyReport study;
  double study_secs = 0.0;
  {
    const auto t0 = std::chrono::steady_clock::now();
    StudyGrid grid;
    grid.modes = {ContaminationMode::Cellwise, ContaminationMode::Casewise};
    grid.gammas = {0, 8};
    try {
      study = run_study(grid, 50, 2024, default_jobs());
    } catch (const std::exception& e) {
      std::printf("study failed: %s\n", e.what());
    }
    study_secs = seconds_since(t0);
  }
  auto cell = [&](ContaminationMode m, double g, Method method) { return study.at(3, m, 0.2, g, method); };

  criterion(7, "cellwise trend", [&] {
    const auto cw = ContaminationMode::Cellwise;
    const double c0 = cell(cw, 0, Method::Cmssa).mean_re, c8 = cell(cw, 8, Method::Cmssa).mean_re;
    const double r0 = cell(cw, 0, Method::Rodessa).mean_re, r8 = cell(cw, 8, Method::Rodessa).mean_re;
    const double cs8 = cell(cw, 8, Method::Cs).mean_re;
    std::string d = fmt("CMSSA RE %.1f -> %.1f, RODESSA RE %.1f -> %.1f", c0, c8, r0, r8) +
                    fmt(", CS RE at 8: %.1f (study %.0f s)", cs8, study_secs);
    return Outcome{c8 > 10 * c0 && r8 <= 3 * r0 && r8 < cs8 && study_secs < 900, d};
  });

  criterion(8, "casewise trend", [&] {
    const auto cw = ContaminationMode::Casewise;
    const auto rod = cell(cw, 8, Method::Rodessa);
    bool ok = true;
    std::string d = fmt("RODESSA RE %.1f FE %.1f;", rod.mean_re, rod.mean_fe);
    for (Method m : {Method::Cmssa, Method::Rlm, Method::Cheng, Method::Cs}) {
      const auto o = cell(cw, 8, m);
      ok = ok && rod.mean_re < o.mean_re && rod.mean_fe < o.mean_fe;
      d += std::string(" ") + to_string(m) + fmt(" %.1f/%.1f", o.mean_re, o.mean_fe);
    }
    return Outcome{ok, d};
  });

  criterion(9, "calibration self-consistency", [] {
    const auto& t = table70();
    const auto w = reference_weights(70, 4, 35, t.tuning, 200, 0xfeed, default_jobs());
    const double mc = mean(w.cell), mr = mean(w.casewise);
    return Outcome{std::abs(mc - 0.9) <= 0.01 && std::abs(mr - 0.9) <= 0.01,
                   fmt("c1 = %.3f, c2 = %.3f, fresh mean weights %.4f (cell) %.4f (case)", t.tuning.cell,
                       t.tuning.casewise, mc, mr)};
  });

  criterion(10, "forecast exactness", [] {
    const Scenario s3 = standard_scenario(3);
    const Matrix s = scenario_signal(s3, 1, 70);
    const EmbeddingSpec spec(35, 70, 4);
    const LowRankFit fit = svd_lowrank(embed(s, spec).data, 2);
    const Matrix rec = diagonal_average(fit.product(), spec);
    const Matrix f = forecast(recurrence_coefficients(fit), rec, 20);
    const double err = (f - scenario_signal(s3, 71, 20)).cwiseAbs().maxCoeff();
    return Outcome{err < 1e-6, fmt("max |forecast - continuation| over 20 steps = %.1e", err)};
  });

  criterion(11, "false-flag rate", [] {
    const Scenario s3 = standard_scenario(3);
    const RodessaConfig cfg = config70();
    std::vector<std::size_t> cells(100), cases(100);
    parallel_for(100, default_jobs(), [&](std::size_t rep) {
      std::mt19937_64 gen(derive_seed(11, {rep}));
      const auto d = generate(s3, gen, 0);
      const MultivariateSeries x(d.observed);
      const auto r = irls_fit(x, 35, cfg);
      const auto flags = flag_outliers(r, x, table70());
      cells[rep] = flags.cell_count();
      cases[rep] = flags.case_count();
    });
    double nc = 0, nr = 0;
    for (std::size_t rep = 0; rep < 100; ++rep) {
      nc += static_cast<double>(cells[rep]);
      nr += static_cast<double>(cases[rep]);
    }
    const double rc = nc / (100.0 * 280.0), rr = nr / (100.0 * 70.0);
    return Outcome{std::abs(rc - 0.01) <= 0.005 && std::abs(rr - 0.01) <= 0.005,
                   fmt("cells %.2f%%, cases %.2f%% flagged on clean data", 100 * rc, 100 * rr)};
  });

  criterion(12, "determinism", [] {
    const fs::path root = fs::temp_directory_path() / ("rodessa-acceptance-" + std::to_string(::getpid()));
    fs::remove_all(root);
    fs::create_directories(root);
    const std::string cache = (root / "cache").string();
    const std::string data = (root / "data").string();
    std::ostringstream sink;
    std::vector<std::string> problems;
    auto cli = [&](std::vector<std::string> args, const std::string& out) {
      args.push_back("--out");
      args.push_back(out);
      const int code = cli::run(args, sink, sink);
      if (code != 0) problems.push_back(args[0] + " exited " + std::to_string(code));
    };
    cli({"generate", "--scenario", "3", "--mode", "cellwise", "--fraction", "0.1", "--gamma", "6", "--seed", "12"},
        data);
    const std::string input = (fs::path(data) / "series.csv").string();
    const std::string demo = (fs::path(data) / "demo.csv").string();
    cli({"generate", "--scenario", "demo", "--seed", "3", "--file", "demo.csv"}, data);
    const std::string report = (fs::path(data) / "fit" / "report.json").string();
    cli({"forecast", input, "--seed", "5", "--cache", cache}, (fs::path(data) / "fit").string());
    for (const char* run : {"a", "b"}) {
      const fs::path dir = root / run;
      // run a fills the calibration cache, run b reads it back
      cli({"fit", input, "--seed", "5", "--cache", cache}, (dir / "fit").string());
      cli({"detect", input, "--seed", "5", "--cache", cache}, (dir / "detect").string());
      cli({"forecast", input, "-q", "2", "--horizon", "10", "--seed", "5", "--cache", cache},
          (dir / "forecast").string());
      cli({"fit", demo, "-L", "151", "-q", "7", "--seed", "5", "--cache", cache}, (dir / "demo").string());
      cli({"rank-scan", input, "--max-rank", "4", "--seed", "5", "--cache", cache}, (dir / "scan").string());
      cli({"calibrate", "--input", input, "--calibration-reps", "50", "--seed", "5", "--jobs", "2", "--cache", "none"},
          (dir / "calibrate").string());
      cli({"simulate", "-r", "2", "--gamma", "0,8", "--mode", "cellwise,casewise", "--calibration-reps", "40",
           "--seed", "5", "--jobs", "2"},
          (dir / "simulate").string());
      cli({"plot", input, "--report", report}, (dir / "plot").string());
      cli({"generate", "--scenario", "2", "--seed", "9"}, (dir / "generate").string());
    }
    std::size_t compared = 0;
    for (const auto& e : fs::recursive_directory_iterator(root / "a")) {
      if (!e.is_regular_file()) continue;
      const fs::path rel = fs::relative(e.path(), root / "a");
      const fs::path other = root / "b" / rel;
      ++compared;
      if (!fs::exists(other) || slurp(e.path()) != slurp(other)) problems.push_back(rel.string() + " differs");
    }
    std::size_t in_b = 0;
    for (const auto& e : fs::recursive_directory_iterator(root / "b")) in_b += e.is_regular_file();
    if (in_b != compared) problems.push_back("file sets differ");
    if (compared < 20) problems.push_back("too few artifacts");
    if (problems.empty()) fs::remove_all(root);
    std::string d = std::to_string(compared) + " artifacts from 9 commands compared byte for byte";
    for (const auto& p : problems) d += "; " + p;
    return Outcome{problems.empty(), d};
  });

  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
