#include "eval/impact.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "core/error.hpp"

namespace tourkit::eval {

ChiSquare chi_square_by_alternative(const FrequencyTable& table) {
  ChiSquare out;
  if (table.empty()) return out;
  const std::size_t alts = table.front().size();
  out.per_alternative.assign(alts, 0.0);
  std::vector<double> row_totals(table.size(), 0.0), col_totals(alts, 0.0);
  double grand = 0.0;
  for (std::size_t j = 0; j < table.size(); ++j) {
    if (table[j].size() != alts) fail(ErrorCode::invalid_argument, "ragged frequency table");
    for (std::size_t i = 0; i < alts; ++i) {
      row_totals[j] += table[j][i];
      col_totals[i] += table[j][i];
      grand += table[j][i];
    }
  }
  if (grand <= 0.0) return out;
  for (std::size_t j = 0; j < table.size(); ++j) {
    for (std::size_t i = 0; i < alts; ++i) {
      const double expected = row_totals[j] * col_totals[i] / grand;
      if (expected <= 0.0) {
        ++out.skipped_cells;
        continue;
      }
      const double d = table[j][i] - expected;
      out.per_alternative[i] += d * d / expected;
    }
  }
  for (const double v : out.per_alternative) out.total += v;
  return out;
}

FrequencyTable predicted_frequency_table(const mtdt::MultiTaskTree& tree,
                                         const mtdt::TrainingSet& data, std::size_t covariate) {
  const std::size_t levels = data.attributes.at(covariate).levels.size();
  FrequencyTable table(levels, std::vector<double>(tree.classes.size(), 0.0));
  for (std::size_t r = 0; r < data.size(); ++r) {
    const auto p = mtdt::predict(tree, data.x[r]);
    table[static_cast<std::size_t>(data.x[r][covariate])]
         [static_cast<std::size_t>(p.predicted_class)] += 1.0;
  }
  return table;
}

std::optional<double> direction_of_impact(std::span<const double> f) {
  if (f.size() < 2) fail(ErrorCode::domain, "direction of impact needs at least two levels");
  double signed_sum = 0.0, abs_sum = 0.0;
  for (std::size_t j = 1; j < f.size(); ++j) {
    signed_sum += f[j] - f[j - 1];
    abs_sum += std::abs(f[j] - f[j - 1]);
  }
  if (abs_sum == 0.0) return std::nullopt;
  return signed_sum / abs_sum;
}

ImpactReport impact_report(const mtdt::MultiTaskTree& tree, const mtdt::TrainingSet& data,
                           const std::vector<std::string>& covariates) {
  ImpactReport report;
  report.alternatives = tree.classes;
  std::vector<std::size_t> indices;
  if (covariates.empty()) {
    for (std::size_t a = 0; a < data.attributes.size(); ++a) indices.push_back(a);
  } else {
    for (const auto& name : covariates) indices.push_back(data.attribute_index(name));
  }
  const std::size_t alts = tree.classes.size();

  for (const auto a : indices) {
    const auto& attr = data.attributes[a];
    CovariateImpact ci;
    ci.covariate = attr.name;
    ci.ordered = attr.ordered;
    const auto table = predicted_frequency_table(tree, data, a);
    const auto chi = chi_square_by_alternative(table);
    if (chi.skipped_cells) {
      report.warnings.push_back(attr.name + ": skipped " + std::to_string(chi.skipped_cells) +
                                " cells with zero expected frequency");
    }
    ci.mi = chi.total;
    ci.mi_alternative = chi.per_alternative;
    if (ci.mi_alternative.empty()) ci.mi_alternative.assign(alts, 0.0);

    // Direction uses the share of each alternative within each observed level.
    for (std::size_t i = 0; i < alts; ++i) {
      if (!attr.ordered) {
        ci.di.emplace_back(std::nullopt);
        continue;
      }
      std::vector<double> f;
      for (const auto& row : table) {
        double total = 0.0;
        for (const double v : row) total += v;
        if (total > 0.0) f.push_back(row[i] / total);
      }
      ci.di.push_back(f.size() >= 2 ? direction_of_impact(f) : std::nullopt);
    }
    report.covariates.push_back(std::move(ci));
  }

  double mi_total = 0.0;
  std::vector<double> alt_totals(alts, 0.0);
  for (const auto& c : report.covariates) {
    mi_total += c.mi;
    for (std::size_t i = 0; i < alts; ++i) alt_totals[i] += c.mi_alternative[i];
  }
  for (auto& c : report.covariates) {
    c.mi_share = mi_total > 0.0 ? c.mi / mi_total : 0.0;
    c.mi_alternative_share.resize(alts);
    for (std::size_t i = 0; i < alts; ++i) {
      c.mi_alternative_share[i] = alt_totals[i] > 0.0 ? c.mi_alternative[i] / alt_totals[i] : 0.0;
    }
  }
  std::stable_sort(report.covariates.begin(), report.covariates.end(),
                   [](const CovariateImpact& a, const CovariateImpact& b) {
                     return a.mi_share > b.mi_share;
                   });
  return report;
}

std::string impact_report_json(const ImpactReport& report) {
  nlohmann::ordered_json j;
  j["alternatives"] = report.alternatives;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& c : report.covariates) {
    nlohmann::ordered_json r;
    r["covariate"] = c.covariate;
    r["ordered"] = c.ordered;
    r["MI"] = c.mi_share;
    r["MI_raw"] = c.mi;
    for (std::size_t i = 0; i < c.mi_alternative_share.size(); ++i) {
      r["MI" + std::to_string(i + 1)] = c.mi_alternative_share[i];
    }
    for (std::size_t i = 0; i < c.di.size(); ++i) {
      r["DI" + std::to_string(i + 1)] =
          c.di[i] ? nlohmann::ordered_json(*c.di[i]) : nlohmann::ordered_json("undefined");
    }
    rows.push_back(r);
  }
  j["covariates"] = rows;
  j["warnings"] = report.warnings;
  return j.dump(2);
}

}  // namespace tourkit::eval
