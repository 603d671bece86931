#pragma once

#include "rodessa/series.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace rodessa::cli {

enum ExitCode { kSuccess = 0, kUsage = 1, kData = 2, kNonConvergence = 3 };

/// Runs one command line (without the program name). Artifacts go to --out,
/// the resolved configuration to out and diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Packaged demo panel: 176 monthly observations of 6 series sharing a
/// rank-7 signal, with a few spikes and one level-shifted month.
MultivariateSeries demo_series(std::uint64_t seed);

}  // namespace rodessa::cli
