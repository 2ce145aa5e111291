#include "rulemine/apriori.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

#include <json.hpp>

#include "core/csv.hpp"
#include "core/error.hpp"

namespace tourkit::rulemine {

namespace {

using Ids = std::vector<int>;

bool contains_ids(const Ids& transaction, const Ids& items) {
  return std::includes(transaction.begin(), transaction.end(), items.begin(), items.end());
}

std::string join(const ItemSet& items) {
  std::string out = "{";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ",";
    out += items[i];
  }
  return out + "}";
}

}  // namespace

ItemSet make_item_set(std::vector<std::string> items) {
  std::sort(items.begin(), items.end());
  items.erase(std::unique(items.begin(), items.end()), items.end());
  return items;
}

bool contains_all(const ItemSet& transaction, const ItemSet& items) {
  return std::includes(transaction.begin(), transaction.end(), items.begin(), items.end());
}

RuleStats rule_stats(const ItemSet& a, const ItemSet& b,
                     const std::vector<Transaction>& transactions) {
  if (a.empty() || b.empty()) fail(ErrorCode::invalid_argument, "rule sides must be non-empty");
  if (transactions.empty()) fail(ErrorCode::invalid_argument, "no transactions");
  const auto sa = make_item_set(a), sb = make_item_set(b);
  ItemSet both;
  std::set_union(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(both));
  if (both.size() != sa.size() + sb.size()) {
    fail(ErrorCode::invalid_argument, "rule sides must be disjoint");
  }
  long long na = 0, nb = 0, nab = 0;
  for (const auto& t : transactions) {
    const auto items = make_item_set(t.items);
    na += contains_all(items, sa);
    nb += contains_all(items, sb);
    nab += contains_all(items, both);
  }
  if (na == 0) fail(ErrorCode::domain, "confidence undefined: " + join(sa) + " never occurs");
  if (nb == 0) fail(ErrorCode::domain, "lift undefined: " + join(sb) + " never occurs");
  const double n = static_cast<double>(transactions.size());
  RuleStats s;
  s.support = static_cast<double>(nab) / n;
  s.confidence = static_cast<double>(nab) / static_cast<double>(na);
  s.lift = static_cast<double>(nab) * n / (static_cast<double>(na) * static_cast<double>(nb));
  return s;
}

RuleSet apriori(const std::vector<Transaction>& transactions, const MiningParams& params) {
  if (transactions.empty()) fail(ErrorCode::invalid_argument, "apriori needs transactions");
  if (!(params.min_support > 0.0 && params.min_support <= 1.0) ||
      !(params.min_confidence > 0.0 && params.min_confidence <= 1.0)) {
    fail(ErrorCode::config, "min_support and min_confidence must be in (0,1]");
  }
  if (params.min_rule_size < 2) fail(ErrorCode::config, "min_rule_size must be >= 2");

  std::set<std::string> universe;
  for (const auto& t : transactions) universe.insert(t.items.begin(), t.items.end());
  const std::vector<std::string> names(universe.begin(), universe.end());
  std::map<std::string, int> id_of;
  for (std::size_t i = 0; i < names.size(); ++i) id_of[names[i]] = static_cast<int>(i);

  std::vector<Ids> db;
  db.reserve(transactions.size());
  for (const auto& t : transactions) {
    Ids ids;
    for (const auto& item : t.items) ids.push_back(id_of.at(item));
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    db.push_back(std::move(ids));
  }
  const double n = static_cast<double>(db.size());
  auto frequent_enough = [&](long long count) {
    return static_cast<double>(count) / n >= params.min_support;
  };

  std::map<Ids, long long> counts;  // every frequent itemset
  std::vector<Ids> level;
  {
    std::vector<long long> single(names.size(), 0);
    for (const auto& t : db) {
      for (int i : t) ++single[static_cast<std::size_t>(i)];
    }
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (frequent_enough(single[i])) {
        level.push_back({static_cast<int>(i)});
        counts[level.back()] = single[i];
      }
    }
  }
  RuleSet out;
  out.transactions = db.size();
  out.params = params;
  while (!level.empty()) {
    for (const auto& s : level) out.frequent.push_back({{}, counts.at(s)});
    for (std::size_t i = out.frequent.size() - level.size(), j = 0; j < level.size(); ++i, ++j) {
      for (int id : level[j]) out.frequent[i].items.push_back(names[static_cast<std::size_t>(id)]);
    }
    // Join itemsets sharing all but their last item, then prune by downward closure.
    std::vector<Ids> candidates;
    for (std::size_t a = 0; a < level.size(); ++a) {
      for (std::size_t b = a + 1; b < level.size(); ++b) {
        const auto& x = level[a];
        const auto& y = level[b];
        if (!std::equal(x.begin(), x.end() - 1, y.begin(), y.end() - 1)) break;
        Ids c = x;
        c.push_back(y.back());
        bool keep = true;
        for (std::size_t drop = 0; keep && drop + 2 < c.size(); ++drop) {
          Ids sub;
          for (std::size_t k = 0; k < c.size(); ++k) {
            if (k != drop) sub.push_back(c[k]);
          }
          keep = counts.count(sub) > 0;
        }
        if (keep) candidates.push_back(std::move(c));
      }
    }
    std::vector<long long> cc(candidates.size(), 0);
    for (const auto& t : db) {
      for (std::size_t c = 0; c < candidates.size(); ++c) cc[c] += contains_ids(t, candidates[c]);
    }
    level.clear();
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      if (frequent_enough(cc[c])) {
        counts[candidates[c]] = cc[c];
        level.push_back(candidates[c]);
      }
    }
  }

  auto to_names = [&](const Ids& ids) {
    ItemSet s;
    for (int id : ids) s.push_back(names[static_cast<std::size_t>(id)]);
    return s;
  };
  for (const auto& [items, count] : counts) {
    if (items.size() < 2 || items.size() < params.min_rule_size) continue;
    const auto m = items.size();
    for (std::uint64_t mask = 1; mask + 1 < (std::uint64_t{1} << m); ++mask) {
      Ids a, b;
      for (std::size_t k = 0; k < m; ++k) ((mask >> k) & 1 ? a : b).push_back(items[k]);
      const long long na = counts.at(a);
      const long long nb = counts.at(b);
      const double confidence = static_cast<double>(count) / static_cast<double>(na);
      if (confidence < params.min_confidence) continue;
      Rule r;
      r.antecedent = to_names(a);
      r.consequent = to_names(b);
      r.count = count;
      r.stats.support = static_cast<double>(count) / n;
      r.stats.confidence = confidence;
      r.stats.lift = static_cast<double>(count) * n /
                     (static_cast<double>(na) * static_cast<double>(nb));
      out.rules.push_back(std::move(r));
    }
  }
  std::sort(out.rules.begin(), out.rules.end(), [](const Rule& x, const Rule& y) {
    if (x.stats.lift != y.stats.lift) return x.stats.lift > y.stats.lift;
    if (x.stats.support != y.stats.support) return x.stats.support > y.stats.support;
    if (x.antecedent != y.antecedent) return x.antecedent < y.antecedent;
    return x.consequent < y.consequent;
  });
  return out;
}

std::vector<MarketSegment> segment_markets(const RuleSet& rules,
                                           const std::vector<Transaction>& transactions,
                                           double confidence_floor) {
  std::set<std::string> universe;
  for (const auto& t : transactions) universe.insert(t.items.begin(), t.items.end());
  for (const auto& r : rules.rules) {
    universe.insert(r.antecedent.begin(), r.antecedent.end());
    universe.insert(r.consequent.begin(), r.consequent.end());
  }
  const std::vector<std::string> names(universe.begin(), universe.end());
  std::map<std::string, std::size_t> id_of;
  for (std::size_t i = 0; i < names.size(); ++i) id_of[names[i]] = i;

  std::vector<std::size_t> parent(names.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& r : rules.rules) {
    if (r.stats.confidence < confidence_floor) continue;
    const auto first = id_of.at(r.antecedent.front());
    for (const auto* side : {&r.antecedent, &r.consequent}) {
      for (const auto& item : *side) {
        const auto a = find(first), b = find(id_of.at(item));
        parent[std::max(a, b)] = std::min(a, b);
      }
    }
  }
  std::map<std::size_t, ItemSet> groups;
  for (std::size_t i = 0; i < names.size(); ++i) groups[find(i)].push_back(names[i]);
  std::vector<MarketSegment> out;
  for (auto& [root, items] : groups) {
    out.push_back({"S" + std::to_string(out.size() + 1), std::move(items)});
  }
  return out;
}

std::vector<Transaction> tour_transactions(const Dataset& dataset) {
  std::vector<Transaction> out;
  for (const auto& tour : dataset.tours) {
    std::vector<std::string> items;
    for (const auto* s : dataset.shipments_of(tour)) {
      if (s->commodity_code) items.push_back(*s->commodity_code);
    }
    if (items.empty()) continue;
    out.push_back({tour.tour_id, make_item_set(std::move(items))});
  }
  return out;
}

std::vector<Transaction> load_transactions(const std::filesystem::path& path) {
  const auto table = csv::read_file(path);
  table.require_columns({"tour_id", "item"});
  const auto c_tour = table.column("tour_id"), c_item = table.column("item");
  std::vector<Transaction> out;
  std::map<std::string, std::size_t> index;
  for (const auto& row : table.rows()) {
    const auto& tour = table.at(row, c_tour);
    const auto& item = table.at(row, c_item);
    if (item.empty()) {
      fail(ErrorCode::validation, table.source() + ":" + std::to_string(row.line) + ": empty item");
    }
    auto [it, fresh] = index.emplace(tour, out.size());
    if (fresh) out.push_back({tour, {}});
    out[it->second].items.push_back(item);
  }
  for (auto& t : out) t.items = make_item_set(std::move(t.items));
  return out;
}

void write_transactions(const std::vector<Transaction>& transactions,
                        const std::filesystem::path& path) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& t : transactions) {
    for (const auto& item : t.items) rows.push_back({t.tour_id, item});
  }
  csv::write_file(path, {"tour_id", "item"}, rows);
}

namespace {

void write_json(const nlohmann::ordered_json& j, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::io, "cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

}  // namespace

void write_rules_json(const RuleSet& rules, const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["transactions"] = rules.transactions;
  j["min_support"] = rules.params.min_support;
  j["min_confidence"] = rules.params.min_confidence;
  j["min_rule_size"] = rules.params.min_rule_size;
  j["frequent_itemsets"] = rules.frequent.size();
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : rules.rules) {
    arr.push_back({{"A", r.antecedent},
                   {"B", r.consequent},
                   {"support", r.stats.support},
                   {"confidence", r.stats.confidence},
                   {"lift", r.stats.lift},
                   {"count", r.count}});
  }
  j["rules"] = arr;
  write_json(j, path);
}

void write_segments_json(const std::vector<MarketSegment>& segments, double confidence_floor,
                         const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["confidence_floor"] = confidence_floor;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& s : segments) arr.push_back({{"label", s.label}, {"items", s.items}});
  j["segments"] = arr;
  write_json(j, path);
}

}  // namespace tourkit::rulemine
