#include "mtdt/objectives.hpp"

#include <cmath>

#include "core/error.hpp"

namespace tourkit::mtdt {

double entropy(std::span<const double> distribution) {
  double h = 0.0;
  double total = 0.0;
  for (const double p : distribution) {
    if (p < 0.0) fail(ErrorCode::domain, "entropy: negative probability");
    total += p;
    if (p > 0.0) h -= p * std::log2(p);
  }
  if (std::abs(total - 1.0) > 1e-9) fail(ErrorCode::domain, "entropy: probabilities must sum to 1");
  return h;
}

namespace {

double entropy_of_counts(std::span<const std::size_t> counts, std::size_t n) {
  if (n == 0) return 0.0;
  double h = 0.0;
  const double inv = 1.0 / static_cast<double>(n);
  for (const auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) * inv;
    h -= p * std::log2(p);
  }
  return h;
}

}  // namespace

double node_entropy(const TrainingSet& data, std::span<const std::size_t> rows) {
  std::vector<std::size_t> counts(data.classes.size(), 0);
  for (const auto r : rows) ++counts[static_cast<std::size_t>(data.y_class[r])];
  return entropy_of_counts(counts, rows.size());
}

double node_sum_of_squares(const TrainingSet& data, std::span<const std::size_t> rows) {
  if (!data.has_numeric || rows.empty()) return 0.0;
  double mean = 0.0;
  for (const auto r : rows) mean += data.y_numeric[r];
  mean /= static_cast<double>(rows.size());
  double ss = 0.0;
  for (const auto r : rows) {
    const double d = data.y_numeric[r] - mean;
    ss += d * d;
  }
  return ss;
}

std::optional<SplitObjectives> split_objectives(const TrainingSet& data,
                                                std::span<const std::size_t> rows,
                                                std::size_t attribute) {
  const std::size_t levels = data.attributes.at(attribute).levels.size();
  const std::size_t k = data.classes.size();
  std::vector<std::size_t> n(levels, 0);
  std::vector<std::size_t> class_counts(levels * k, 0);
  std::vector<double> sums(levels, 0.0);
  for (const auto r : rows) {
    const auto l = static_cast<std::size_t>(data.x[r][attribute]);
    ++n[l];
    ++class_counts[l * k + static_cast<std::size_t>(data.y_class[r])];
    if (data.has_numeric) sums[l] += data.y_numeric[r];
  }

  SplitObjectives out;
  out.smallest_child = rows.size();
  double conditional = 0.0;
  const double total = static_cast<double>(rows.size());
  for (std::size_t l = 0; l < levels; ++l) {
    if (n[l] == 0) continue;
    ++out.levels_present;
    out.smallest_child = std::min(out.smallest_child, n[l]);
    conditional += static_cast<double>(n[l]) / total *
                   entropy_of_counts(std::span(class_counts).subspan(l * k, k), n[l]);
  }
  if (out.levels_present < 2) return std::nullopt;

  if (data.has_numeric) {
    std::vector<double> means(levels, 0.0);
    for (std::size_t l = 0; l < levels; ++l) {
      if (n[l]) means[l] = sums[l] / static_cast<double>(n[l]);
    }
    for (const auto r : rows) {
      const double d = data.y_numeric[r] - means[static_cast<std::size_t>(data.x[r][attribute])];
      out.ssr += d * d;
    }
  }
  out.ig = std::max(0.0, node_entropy(data, rows) - conditional);
  return out;
}

}  // namespace tourkit::mtdt
