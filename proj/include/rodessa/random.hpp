#pragma once

#include "rodessa/series.hpp"

#include <cstdint>
#include <initializer_list>
#include <random>

namespace rodessa {

std::uint64_t splitmix64(std::uint64_t x);

/// Counter-based seed derivation: folds the parts into base one at a time.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> parts);

/// Bit pattern of a double, for hashing real-valued grid coordinates.
std::uint64_t double_bits(double v);

/// rows x cols matrix of N(0, sd^2) draws, filled column by column.
Matrix normal_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& gen, double sd = 1.0);

}  // namespace rodessa
