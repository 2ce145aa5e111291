#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mtdt/dataset.hpp"
#include "mtdt/tree.hpp"

namespace tourkit::eval {

// table[level][alternative] of predicted frequencies.
using FrequencyTable = std::vector<std::vector<double>>;

struct ChiSquare {
  std::vector<double> per_alternative;  // MI_vi
  double total = 0.0;                   // MI_v
  std::size_t skipped_cells = 0;        // cells with zero expected frequency
};

// Chi-square distance between a table and its independence expectation
// (row total x column total / grand total), split by alternative.
ChiSquare chi_square_by_alternative(const FrequencyTable& table);

// Predicted-class frequency table of a covariate over the rows.
FrequencyTable predicted_frequency_table(const mtdt::MultiTaskTree& tree,
                                         const mtdt::TrainingSet& data, std::size_t covariate);

// Normalized signed sum of consecutive differences over ordered levels;
// undefined when all differences are zero. Throws for fewer than two values.
std::optional<double> direction_of_impact(std::span<const double> frequencies);

struct CovariateImpact {
  std::string covariate;
  bool ordered = true;
  double mi = 0.0;
  double mi_share = 0.0;
  std::vector<double> mi_alternative;
  std::vector<double> mi_alternative_share;
  std::vector<std::optional<double>> di;  // per alternative; empty optional = undefined
};

struct ImpactReport {
  std::vector<std::string> alternatives;
  std::vector<CovariateImpact> covariates;  // sorted by mi_share descending
  std::vector<std::string> warnings;
};

ImpactReport impact_report(const mtdt::MultiTaskTree& tree, const mtdt::TrainingSet& data,
                           const std::vector<std::string>& covariates = {});

std::string impact_report_json(const ImpactReport& report);

}  // namespace tourkit::eval
