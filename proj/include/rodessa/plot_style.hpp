#pragma once

#include <array>

namespace rodessa::style {

using Rgb = std::array<int, 3>;

// Weight ramps go linearly from white at weight 1 to these at weight 0.
constexpr Rgb kPositive{204, 0, 0};
constexpr Rgb kNegative{0, 64, 204};
constexpr Rgb kCase{48, 48, 48};
constexpr Rgb kWhite{255, 255, 255};

constexpr const char* kReconstruction = "#000000";
constexpr const char* kRaw = "#9a9a9a";
constexpr const char* kForecast = "#1a9641";
constexpr const char* kCaseLine = "#8c8c8c";
constexpr const char* kAxis = "#333333";

constexpr double kCellRadius = 3.2;
constexpr double kFlagSize = 6.4;
constexpr double kCaseRadius = 5.0;

Rgb ramp(const Rgb& target, double weight);

}  // namespace rodessa::style
