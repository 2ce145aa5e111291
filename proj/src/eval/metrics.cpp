#include "eval/metrics.hpp"

#include <cmath>
#include <numeric>

#include <json.hpp>

#include "core/error.hpp"

namespace tourkit::eval {

namespace {

std::optional<double> ratio(double num, double den) {
  if (den == 0.0) return std::nullopt;
  return num / den;
}

nlohmann::ordered_json opt(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

ConfusionMatrix::ConfusionMatrix(std::size_t classes)
    : counts_(classes, std::vector<long long>(classes, 0)) {}

ConfusionMatrix::ConfusionMatrix(std::vector<std::vector<long long>> counts)
    : counts_(std::move(counts)) {
  for (const auto& row : counts_) {
    if (row.size() != counts_.size()) fail(ErrorCode::invalid_argument, "confusion matrix must be square");
    for (const auto c : row) {
      if (c < 0) fail(ErrorCode::invalid_argument, "confusion matrix counts must be >= 0");
    }
  }
}

ConfusionMatrix ConfusionMatrix::from_labels(std::span<const int> observed,
                                             std::span<const int> predicted,
                                             std::size_t classes) {
  if (observed.size() != predicted.size()) {
    fail(ErrorCode::invalid_argument, "observed and predicted lengths differ");
  }
  ConfusionMatrix cm(classes);
  for (std::size_t i = 0; i < observed.size(); ++i) {
    cm.add(static_cast<std::size_t>(observed[i]), static_cast<std::size_t>(predicted[i]));
  }
  return cm;
}

void ConfusionMatrix::add(std::size_t observed, std::size_t predicted, long long n) {
  counts_.at(observed).at(predicted) += n;
}

long long ConfusionMatrix::total() const {
  long long t = 0;
  for (const auto& row : counts_) t += std::accumulate(row.begin(), row.end(), 0LL);
  return t;
}

long long ConfusionMatrix::row_total(std::size_t observed) const {
  return std::accumulate(counts_[observed].begin(), counts_[observed].end(), 0LL);
}

long long ConfusionMatrix::column_total(std::size_t predicted) const {
  long long t = 0;
  for (const auto& row : counts_) t += row[predicted];
  return t;
}

ClassificationReport classification_metrics(const ConfusionMatrix& cm,
                                            std::span<const double> class_priors) {
  const long long total = cm.total();
  if (total <= 0) fail(ErrorCode::domain, "classification metrics need a non-empty confusion matrix");
  const std::size_t k = cm.classes();
  const double n = static_cast<double>(total);

  ClassificationReport out;
  long long trace = 0, sum_tp = 0, sum_fp = 0, sum_fn = 0;
  double f1_sum = 0.0, bacc_sum = 0.0;
  std::size_t f1_n = 0, bacc_n = 0;
  for (std::size_t c = 0; c < k; ++c) {
    ClassMetrics m;
    m.tp = cm.at(c, c);
    m.fn = cm.row_total(c) - m.tp;
    m.fp = cm.column_total(c) - m.tp;
    m.tn = total - m.tp - m.fn - m.fp;
    trace += m.tp;
    sum_tp += m.tp;
    sum_fp += m.fp;
    sum_fn += m.fn;
    const bool defined = cm.row_total(c) + cm.column_total(c) > 0;
    if (defined) {
      m.sensitivity = ratio(static_cast<double>(m.tp), static_cast<double>(m.tp + m.fn));
      m.specificity = ratio(static_cast<double>(m.tn), static_cast<double>(m.tn + m.fp));
      m.precision = ratio(static_cast<double>(m.tp), static_cast<double>(m.tp + m.fp));
      m.accuracy = static_cast<double>(m.tp + m.tn) / n;
      if (m.sensitivity && m.specificity) {
        m.balanced_accuracy = 0.5 * (*m.sensitivity + *m.specificity);
      }
      if (m.sensitivity && m.precision) {
        const double s = *m.sensitivity, p = *m.precision;
        m.f1 = (s + p) > 0 ? 2.0 * s * p / (s + p) : 0.0;
      }
    }
    if (m.f1) {
      f1_sum += *m.f1;
      ++f1_n;
    }
    if (m.balanced_accuracy) {
      bacc_sum += *m.balanced_accuracy;
      ++bacc_n;
    }
    out.per_class.push_back(m);
  }
  if (f1_n) out.macro_f1 = f1_sum / static_cast<double>(f1_n);
  if (bacc_n) out.one_vs_all = bacc_sum / static_cast<double>(bacc_n);
  const double micro_p = static_cast<double>(sum_tp) / static_cast<double>(sum_tp + sum_fp);
  const double micro_r = static_cast<double>(sum_tp) / static_cast<double>(sum_tp + sum_fn);
  out.micro_f1 = (micro_p + micro_r) > 0 ? 2 * micro_p * micro_r / (micro_p + micro_r) : 0.0;
  out.accuracy = static_cast<double>(trace) / n;

  const double p_o = static_cast<double>(trace) / n;
  double p_e = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    p_e += static_cast<double>(cm.row_total(c)) * static_cast<double>(cm.column_total(c)) / (n * n);
  }
  if (p_e < 1.0) out.kappa = (p_o - p_e) / (1.0 - p_e);

  if (!class_priors.empty()) {
    if (class_priors.size() != k) fail(ErrorCode::invalid_argument, "class prior count mismatch");
    for (const double p : class_priors) out.wrg += p * p;
  } else {
    for (std::size_t c = 0; c < k; ++c) {
      const double p = static_cast<double>(cm.row_total(c)) / n;
      out.wrg += p * p;
    }
  }
  return out;
}

RhoMetrics rho_metrics(const mtdt::MultiTaskTree& tree, const mtdt::TrainingSet& data) {
  if (data.size() == 0) fail(ErrorCode::domain, "rho: no rows");
  const std::size_t k = tree.classes.size();
  const auto leaves = mtdt::assign_leaves(tree, data);
  // observed class counts per leaf
  std::vector<std::vector<double>> observed(tree.nodes.size());
  std::vector<double> marginal(k, 0.0);
  for (std::size_t r = 0; r < data.size(); ++r) {
    auto& row = observed[leaves[r]];
    if (row.empty()) row.assign(k, 0.0);
    row[static_cast<std::size_t>(data.y_class[r])] += 1.0;
    marginal[static_cast<std::size_t>(data.y_class[r])] += 1.0;
  }
  const double n = static_cast<double>(data.size());
  RhoMetrics out;
  for (std::size_t l = 0; l < tree.nodes.size(); ++l) {
    const auto& counts = observed[l];
    if (counts.empty()) continue;
    const double n_leaf = std::accumulate(counts.begin(), counts.end(), 0.0);
    double inner = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      inner += counts[i] / n_leaf * tree.nodes[l].distribution[i];
    }
    out.rho += n_leaf / n * inner;
  }
  const auto& root = tree.nodes.front().distribution;
  for (std::size_t i = 0; i < k; ++i) out.rho0 += marginal[i] / n * root[i];
  if (out.rho0 < 1.0) out.rho_incr = (out.rho - out.rho0) / (1.0 - out.rho0);
  return out;
}

double regression_r2(std::span<const double> predictions, std::span<const double> observations) {
  if (predictions.size() != observations.size()) {
    fail(ErrorCode::invalid_argument, "r2: length mismatch");
  }
  if (observations.size() < 2) fail(ErrorCode::domain, "r2: need at least two observations");
  const double mean = std::accumulate(observations.begin(), observations.end(), 0.0) /
                      static_cast<double>(observations.size());
  double ss_tot = 0.0, ss_res = 0.0;
  for (std::size_t i = 0; i < observations.size(); ++i) {
    ss_tot += (observations[i] - mean) * (observations[i] - mean);
    ss_res += (observations[i] - predictions[i]) * (observations[i] - predictions[i]);
  }
  if (ss_tot == 0.0) fail(ErrorCode::domain, "r2: observations have zero variance");
  return 1.0 - ss_res / ss_tot;
}

EvalReport evaluate(const mtdt::MultiTaskTree& tree, const mtdt::TrainingSet& data) {
  EvalReport report;
  report.rows = data.size();
  report.classes = tree.classes;
  std::vector<int> predicted(data.size());
  std::vector<double> numeric(data.size());
  for (std::size_t r = 0; r < data.size(); ++r) {
    const auto p = mtdt::predict(tree, data.x[r]);
    predicted[r] = p.predicted_class;
    numeric[r] = p.numeric;
  }
  report.classification = classification_metrics(
      ConfusionMatrix::from_labels(data.y_class, predicted, tree.classes.size()));
  report.rho = rho_metrics(tree, data);
  if (tree.has_numeric && data.has_numeric) {
    try {
      report.r2 = regression_r2(numeric, data.y_numeric);
    } catch (const Error&) {
      report.r2.reset();
    }
  }
  return report;
}

std::string eval_report_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  const auto& c = report.classification;
  j["Macro-F1"] = opt(c.macro_f1);
  j["Micro-F1"] = opt(c.micro_f1);
  j["One-vs-all"] = opt(c.one_vs_all);
  j["kappa"] = opt(c.kappa);
  j["WRG"] = c.wrg;
  j["ρ"] = report.rho.rho;
  j["ρ_root"] = report.rho.rho0;
  j["ρ_incr"] = opt(report.rho.rho_incr);
  j["R²"] = opt(report.r2);
  j["accuracy"] = opt(c.accuracy);
  j["rows"] = report.rows;
  nlohmann::ordered_json per = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < c.per_class.size(); ++i) {
    const auto& m = c.per_class[i];
    nlohmann::ordered_json e;
    e["class"] = i < report.classes.size() ? report.classes[i] : std::to_string(i);
    e["TP"] = m.tp;
    e["FP"] = m.fp;
    e["FN"] = m.fn;
    e["TN"] = m.tn;
    e["sensitivity"] = opt(m.sensitivity);
    e["specificity"] = opt(m.specificity);
    e["precision"] = opt(m.precision);
    e["balanced_accuracy"] = opt(m.balanced_accuracy);
    e["F1"] = opt(m.f1);
    per.push_back(e);
  }
  j["per_class"] = per;
  return j.dump(2);
}

}  // namespace tourkit::eval
