#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "core/model.hpp"

namespace tourkit::rulemine {

using ItemSet = std::vector<std::string>;  // sorted, no duplicates

struct Transaction {
  std::string tour_id;
  ItemSet items;
};

struct RuleStats {
  double support = 0.0;
  double confidence = 0.0;
  double lift = 0.0;
};

struct Rule {
  ItemSet antecedent;
  ItemSet consequent;
  RuleStats stats;
  long long count = 0;  // transactions containing A and B
};

struct MiningParams {
  double min_support = 0.0;
  double min_confidence = 0.0;
  std::size_t min_rule_size = 2;
};

struct FrequentItemSet {
  ItemSet items;
  long long count = 0;
};

struct RuleSet {
  std::vector<Rule> rules;  // lift desc, support desc, antecedent, consequent
  std::vector<FrequentItemSet> frequent;  // level-wise, lexicographic within a level
  std::size_t transactions = 0;
  MiningParams params;
};

struct MarketSegment {
  std::string label;
  ItemSet items;
};

ItemSet make_item_set(std::vector<std::string> items);
bool contains_all(const ItemSet& transaction, const ItemSet& items);

// Throws a domain error when confidence or lift would be undefined.
RuleStats rule_stats(const ItemSet& a, const ItemSet& b,
                     const std::vector<Transaction>& transactions);

RuleSet apriori(const std::vector<Transaction>& transactions, const MiningParams& params);

// Connected components of the graph linking the items of every rule with
// confidence >= floor; items in no such rule form their own segment.
std::vector<MarketSegment> segment_markets(const RuleSet& rules,
                                           const std::vector<Transaction>& transactions,
                                           double confidence_floor = 0.7);

// Commodities picked up per tour; tours without any code are skipped.
std::vector<Transaction> tour_transactions(const Dataset& dataset);

std::vector<Transaction> load_transactions(const std::filesystem::path& path);
void write_transactions(const std::vector<Transaction>& transactions,
                        const std::filesystem::path& path);
void write_rules_json(const RuleSet& rules, const std::filesystem::path& path);
void write_segments_json(const std::vector<MarketSegment>& segments, double confidence_floor,
                         const std::filesystem::path& path);

}  // namespace tourkit::rulemine
