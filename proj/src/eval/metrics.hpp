#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mtdt/dataset.hpp"
#include "mtdt/tree.hpp"

namespace tourkit::eval {

// counts[observed][predicted]
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t classes);
  ConfusionMatrix(std::vector<std::vector<long long>> counts);

  static ConfusionMatrix from_labels(std::span<const int> observed, std::span<const int> predicted,
                                     std::size_t classes);

  std::size_t classes() const { return counts_.size(); }
  long long at(std::size_t observed, std::size_t predicted) const {
    return counts_[observed][predicted];
  }
  void add(std::size_t observed, std::size_t predicted, long long n = 1);
  long long total() const;
  long long row_total(std::size_t observed) const;
  long long column_total(std::size_t predicted) const;

 private:
  std::vector<std::vector<long long>> counts_;
};

// One-vs-all statistics for one class; empty optionals are undefined.
struct ClassMetrics {
  long long tp = 0, fp = 0, fn = 0, tn = 0;
  std::optional<double> sensitivity;
  std::optional<double> specificity;
  std::optional<double> precision;
  std::optional<double> balanced_accuracy;
  std::optional<double> f1;
  std::optional<double> accuracy;
};

struct ClassificationReport {
  std::vector<ClassMetrics> per_class;
  std::optional<double> macro_f1;
  std::optional<double> micro_f1;
  std::optional<double> one_vs_all;  // mean one-vs-all balanced accuracy
  std::optional<double> accuracy;
  std::optional<double> kappa;
  double wrg = 0.0;  // sum of squared class frequencies
};

// `class_priors` feeds the weighted random guess; observed row frequencies
// are used when it is empty.
ClassificationReport classification_metrics(const ConfusionMatrix& cm,
                                            std::span<const double> class_priors = {});

struct RhoMetrics {
  double rho = 0.0;
  double rho0 = 0.0;
  std::optional<double> rho_incr;  // undefined when rho0 == 1
};

// Leaf-weighted probability-matching score of the tree on `data`.
RhoMetrics rho_metrics(const mtdt::MultiTaskTree& tree, const mtdt::TrainingSet& data);

// 1 - SS_res / SS_tot; throws when the observations have zero variance.
double regression_r2(std::span<const double> predictions, std::span<const double> observations);

struct EvalReport {
  ClassificationReport classification;
  RhoMetrics rho;
  std::optional<double> r2;
  std::size_t rows = 0;
  std::vector<std::string> classes;
};

EvalReport evaluate(const mtdt::MultiTaskTree& tree, const mtdt::TrainingSet& data);

std::string eval_report_json(const EvalReport& report);

}  // namespace tourkit::eval
