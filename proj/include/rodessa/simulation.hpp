#pragma once

#include "rodessa/csv.hpp"
#include "rodessa/irls.hpp"

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

namespace rodessa {

struct Scenario {
  int id = 3;
  Vector amplitudes;
  Vector phases;
  double sigma = 20.0;
  std::size_t length = 70;
  double period = 10.0;

  std::size_t series_count() const { return static_cast<std::size_t>(amplitudes.size()); }
};

/// Scenarios 1-3 of the study (p = 4, N = 70, sigma = 20).
Scenario standard_scenario(int id);

/// s^(j)(i) = A_j cos(2 pi i / period + C_j) for i = first..first+count-1.
Matrix scenario_signal(const Scenario& s, std::size_t first, std::size_t count);

struct SimulatedSeries {
  Matrix observed;   // N x p
  Matrix signal;     // N x p
  Matrix extension;  // horizon x p, the signal at N+1..N+horizon
};

/// Signal plus N(0, sigma^2) noise, independent per (i, j) unless shared_noise
/// draws one value per time point for all series.
SimulatedSeries generate(const Scenario& s, std::mt19937_64& gen, int horizon = 20,
                         bool shared_noise = false);

enum class ContaminationMode { None, Cellwise, Casewise };

struct Contamination {
  ContaminationMode mode = ContaminationMode::None;
  double fraction = 0.0;
  double gamma = 0.0;
};

struct ContaminatedCells {
  std::vector<std::pair<std::size_t, std::size_t>> cells;  // 0-based (i, j)
};

/// Adds gamma*sigma to floor(eps p N) distinct cells (cellwise) or to every
/// component of floor(eps N) distinct time points (casewise).
ContaminatedCells contaminate(Matrix& series, double sigma, const Contamination& c,
                              std::mt19937_64& gen);

const char* to_string(ContaminationMode m);
ContaminationMode parse_contamination_mode(const std::string& text);

enum class Method { Cmssa, Rlm, Cs, Cheng, Rodessa };

const char* to_string(Method m);
Method parse_method(const std::string& text);
std::vector<Method> all_methods();

struct MethodConfig {
  std::size_t window = 35;
  Eigen::Index rank = 2;
  int horizon = 20;
  RodessaConfig rodessa;     // tuning constants must be set
  double cs_tuning = 4.685;  // entrywise biweight constant
};

struct MethodOutput {
  Matrix reconstruction;  // N x p
  Matrix forecasts;       // horizon x p
  bool converged = true;
  Warnings warnings;
};

MethodOutput run_method(Method method, const Matrix& series, const MethodConfig& config);

struct Metrics {
  double re = 0.0;
  double fe = 0.0;
};

Metrics metrics(const Matrix& reconstruction, const Matrix& forecasts, const Matrix& signal,
                const Matrix& extension);

struct StudyGrid {
  std::vector<int> scenarios{3};
  std::vector<ContaminationMode> modes{ContaminationMode::Cellwise};
  std::vector<double> fractions{0.2};
  std::vector<double> gammas{0, 1, 2, 3, 4, 5, 6, 7, 8};
  std::vector<Method> methods = all_methods();
  std::size_t window = 35;
  Eigen::Index rank = 2;
  int horizon = 20;
  double delta_c = 0.9;
  double delta_r = 0.9;
  int calibration_replications = 200;
  bool shared_noise = false;
};

struct StudyCell {
  int scenario = 0;
  ContaminationMode mode = ContaminationMode::None;
  double fraction = 0.0;
  double gamma = 0.0;
  Method method = Method::Cmssa;
  double mean_re = 0.0;
  double mean_fe = 0.0;
  int replications = 0;
  int failures = 0;       // replications whose fit or forecast threw
  int nonconverged = 0;
};

struct StudyReport {
  StudyGrid grid;
  int replications = 0;
  std::uint64_t base_seed = 0;
  double rodessa_cell_tuning = 0.0;
  double rodessa_case_tuning = 0.0;
  double cs_tuning = 0.0;
  std::vector<StudyCell> cells;  // grid order: scenario, mode, fraction, gamma, method

  const StudyCell& at(int scenario, ContaminationMode mode, double fraction, double gamma,
                      Method method) const;
};

/// Seed of one replication of one grid cell; methods share it.
std::uint64_t replication_seed(std::uint64_t base, int scenario, ContaminationMode mode,
                               double fraction, double gamma, int replication);

StudyReport run_study(const StudyGrid& grid, int replications, std::uint64_t base_seed,
                      unsigned jobs = 1);

void write_study_table(std::ostream& out, const StudyReport& report, const Provenance& provenance);

/// Mean RE and FE against gamma, one line per method, for one
/// (scenario, mode, fraction).
std::string emit_study_svg(const StudyReport& report, int scenario, ContaminationMode mode,
                           double fraction);

}  // namespace rodessa
