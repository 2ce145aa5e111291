#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "mtdt/dataset.hpp"

namespace tourkit::mtdt {

// Shannon entropy in bits, with 0 log 0 = 0.
double entropy(std::span<const double> distribution);

// Class entropy and numeric sum of squares of the rows at a node.
double node_entropy(const TrainingSet& data, std::span<const std::size_t> rows);
double node_sum_of_squares(const TrainingSet& data, std::span<const std::size_t> rows);

struct SplitObjectives {
  double ssr = 0.0;  // sum of squared residuals around per-level means
  double ig = 0.0;   // information gain in bits
  std::size_t levels_present = 0;
  std::size_t smallest_child = 0;
};

// Objectives of a multiway split on `attribute`. Empty levels are skipped;
// returns nullopt when fewer than two levels are present.
std::optional<SplitObjectives> split_objectives(const TrainingSet& data,
                                                std::span<const std::size_t> rows,
                                                std::size_t attribute);

}  // namespace tourkit::mtdt
