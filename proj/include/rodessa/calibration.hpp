#pragma once

#include "rodessa/irls.hpp"
#include "rodessa/robust_loss.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace rodessa {

enum class WindowPolicy { Auto, Multivariate, Half };

/// round(pN/(p+1)) for a small number of series, round(N/2) otherwise,
/// clamped to [2, N-1]. Auto picks the first rule for p <= kSmallSeriesCount.
constexpr std::size_t kSmallSeriesCount = 10;
std::size_t default_window(std::size_t length, std::size_t series_count,
                           WindowPolicy policy = WindowPolicy::Auto);

struct CalibrationSetup {
  std::size_t length = 0;
  std::size_t series_count = 0;
  std::size_t window = 0;
  double delta_c = 0.9;
  double delta_r = 0.9;
  double alpha = 0.01;
  int replications = 200;
  std::uint64_t seed = 1;
  unsigned jobs = 1;  // not part of the result
};

struct TuningConstants {
  double cell = 0.0;
  double casewise = 0.0;
};

struct FlagQuantiles {
  double cell = 0.0;
  double casewise = 0.0;
};

struct CalibrationTable {
  CalibrationSetup setup;
  TuningConstants tuning;
  FlagQuantiles quantiles;

  bool matches(std::size_t length, std::size_t series_count, std::size_t window) const;
};

/// rho'(t) / rho'(0); 1 at zero residual, 0 beyond the rejection point.
double standardized_weight(const LossSpec& loss, double t);

/// Type-7 empirical quantile (linear interpolation between order statistics).
double empirical_quantile(std::vector<double> values, double alpha);

/// Standardized weights of every cell and case over `replications` draws of
/// the reference model: N(0,1) errors around an exact fit, scales estimated
/// by M-scale as in the IRLS.
struct ReferenceWeights {
  std::vector<double> cell;
  std::vector<double> casewise;
};
ReferenceWeights reference_weights(std::size_t length, std::size_t series_count,
                                   std::size_t window, const TuningConstants& tuning,
                                   int replications, std::uint64_t seed, unsigned jobs = 1);

TuningConstants calibrate_tuning(std::size_t length, std::size_t series_count, std::size_t window,
                                 double delta_c, double delta_r, int replications,
                                 std::uint64_t seed, unsigned jobs = 1);

FlagQuantiles flagging_quantiles(std::size_t length, std::size_t series_count, std::size_t window,
                                 const TuningConstants& tuning, double alpha, int replications,
                                 std::uint64_t seed, unsigned jobs = 1);

/// Tuning constant of the entrywise biweight fit: the mean standardized
/// weight (1 - z^2/c^2)_+^2 of the reference trajectory matrix entries,
/// scaled by their MAD, equals delta.
double calibrate_entrywise_tuning(std::size_t length, std::size_t series_count, std::size_t window,
                                  double delta, int replications, std::uint64_t seed,
                                  unsigned jobs = 1);

/// Tuning constants, then quantiles from an independent stream of the same seed.
CalibrationTable calibrate(const CalibrationSetup& setup);

void write_calibration(std::ostream& out, const CalibrationTable& table);
CalibrationTable read_calibration(std::istream& in);

/// Reads the table for `setup` from cache_dir if present, otherwise
/// calibrates and writes it there.
CalibrationTable cached_calibration(const CalibrationSetup& setup,
                                    const std::filesystem::path& cache_dir);
std::filesystem::path calibration_cache_path(const CalibrationSetup& setup,
                                             const std::filesystem::path& cache_dir);

struct RankPoint {
  Eigen::Index rank = 0;
  double objective = 0.0;
  bool converged = false;
};

/// Final RODESSA objective for r = 1..max_rank under common scales taken from
/// the rank-1 initial fit. Each rank keeps the better of a fresh start and
/// the previous rank's fit padded with a null component.
std::vector<RankPoint> rank_curve(const MultivariateSeries& series, std::size_t window,
                                  const RodessaConfig& config, Eigen::Index max_rank);

}  // namespace rodessa
