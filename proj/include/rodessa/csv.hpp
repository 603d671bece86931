#pragma once

#include "rodessa/series.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace rodessa {

/// Key/value provenance lines written as '# key=value' comments ahead of the
/// header. The reader skips them.
using Provenance = std::vector<std::pair<std::string, std::string>>;

/// Header row with series names, one row per time point. A first column
/// named "time" (any case) is taken as timestamps.
MultivariateSeries read_series_csv(std::istream& in);
MultivariateSeries read_series_csv(const std::filesystem::path& path);

void write_series_csv(std::ostream& out, const MultivariateSeries& series,
                      const Provenance& provenance = {});
void write_matrix_csv(std::ostream& out, const Matrix& values,
                      const std::vector<std::string>& header, const Provenance& provenance = {},
                      std::size_t first_index = 1);

/// Shortest round-trip decimal representation of a double.
std::string format_double(double value);

}  // namespace rodessa
