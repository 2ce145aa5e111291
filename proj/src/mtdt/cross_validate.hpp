#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mtdt/dataset.hpp"
#include "mtdt/tree.hpp"

namespace tourkit::mtdt {

// Deterministic stratified assignment of rows to folds by class.
std::vector<std::vector<std::size_t>> stratified_folds(const std::vector<int>& classes,
                                                       int folds, std::uint64_t seed);

// Resamples minority classes with replacement up to the majority count.
// Single-class input is returned unchanged with a warning.
TrainingSet oversample_minority(const TrainingSet& data, std::uint64_t seed,
                                std::vector<std::string>* warnings = nullptr);

struct DepthScore {
  int depth = 0;
  double mean_rho = 0.0;
  std::optional<double> mean_r2;
  double score = 0.0;
};

struct CrossValidationResult {
  int best_depth = 0;
  std::vector<DepthScore> table;
};

// k-fold grid search over params.max_depth_grid; score is
// rho_weight * mean validation rho + r2_weight * mean validation R^2.
// Ties go to the shallower depth.
CrossValidationResult cross_validate(const TrainingSet& data, const Hyperparams& params);

}  // namespace tourkit::mtdt
