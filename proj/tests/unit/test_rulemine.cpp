#include <doctest.h>

#include <algorithm>
#include <random>

#include "core/error.hpp"
#include "rulemine/apriori.hpp"
#include "../support/fixture.hpp"
#include "../support/oracles.hpp"

using namespace tourkit;
using namespace tourkit::rulemine;

namespace {

std::vector<Transaction> tx(const std::vector<std::vector<std::string>>& items) {
  std::vector<Transaction> out;
  for (std::size_t i = 0; i < items.size(); ++i)
    out.push_back({"T" + std::to_string(i), make_item_set(items[i])});
  return out;
}

const std::vector<std::vector<std::string>> kFive{{"a", "b"}, {"a", "b"}, {"a"}, {"b"}, {"c"}};

const Rule* find(const RuleSet& rs, const ItemSet& a, const ItemSet& b) {
  for (const auto& r : rs.rules)
    if (r.antecedent == a && r.consequent == b) return &r;
  return nullptr;
}

}  // namespace

TEST_CASE("rule statistics") {
  const auto t = tx(kFive);
  const auto s = rule_stats({"a"}, {"b"}, t);
  CHECK(s.support == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(s.confidence == doctest::Approx(2.0 / 3).epsilon(1e-15));
  CHECK(s.lift == doctest::Approx(0.4 / 0.36).epsilon(1e-12));

  const auto all = tx({{"x", "y"}, {"x", "y", "z"}});
  const auto one = rule_stats({"x"}, {"y"}, all);
  CHECK(one.support == 1.0);
  CHECK(one.confidence == 1.0);
  CHECK(one.lift == 1.0);

  const auto ind = tx({{"a", "b"}, {"a"}, {"b"}, {}});
  CHECK(rule_stats({"a"}, {"b"}, ind).lift == doctest::Approx(1.0));

  CHECK_THROWS_AS(rule_stats({"a"}, {"a"}, t), Error);
  CHECK_THROWS_AS(rule_stats({"q"}, {"a"}, t), Error);
  CHECK_THROWS_AS(rule_stats({"a"}, {"q"}, t), Error);
}

TEST_CASE("five transaction fixture") {
  const auto t = tx(kFive);
  const auto rs = apriori(t, {0.3, 0.5, 2});
  const auto* ab = find(rs, {"a"}, {"b"});
  const auto* ba = find(rs, {"b"}, {"a"});
  REQUIRE(ab);
  REQUIRE(ba);
  const auto s = rule_stats({"a"}, {"b"}, t);
  CHECK(ab->stats.support == s.support);
  CHECK(ab->stats.confidence == s.confidence);
  CHECK(ab->stats.lift == s.lift);
  CHECK(ab->stats.lift == ba->stats.lift);
  CHECK(rs.rules.size() == 2);
  CHECK(ab->count == 2);
}

TEST_CASE("full support keeps only items in every transaction") {
  const auto t = tx({{"a", "b", "c"}, {"a", "b"}, {"a", "b", "d"}});
  const auto rs = apriori(t, {1.0, 0.1, 2});
  REQUIRE(rs.rules.size() == 2);
  for (const auto& r : rs.rules) {
    for (const auto& i : r.antecedent) CHECK((i == "a" || i == "b"));
    for (const auto& i : r.consequent) CHECK((i == "a" || i == "b"));
  }
}

TEST_CASE("threshold validation") {
  const auto t = tx(kFive);
  CHECK_THROWS_AS(apriori(t, {0.0, 0.5, 2}), Error);
  CHECK_THROWS_AS(apriori(t, {0.5, 1.5, 2}), Error);
  CHECK_THROWS_AS(apriori(t, {0.5, 0.5, 1}), Error);
  CHECK_THROWS_AS(apriori({}, {0.5, 0.5, 2}), Error);
}

TEST_CASE("matches exhaustive enumeration on random databases") {
  std::mt19937 g(23);
  for (int trial = 0; trial < 25; ++trial) {
    const int m = 2 + static_cast<int>(g() % 9);
    const int n = 1 + static_cast<int>(g() % 120);
    std::vector<std::vector<std::string>> raw;
    for (int i = 0; i < n; ++i) {
      std::vector<std::string> row;
      for (int k = 0; k < m; ++k)
        if (g() % 3 == 0) row.push_back(std::string(1, static_cast<char>('a' + k)));
      raw.push_back(row);
    }
    const double ms = 0.02 + (g() % 1000) / 1000.0 * 0.4;
    const double mc = 0.05 + (g() % 1000) / 1000.0 * 0.9;
    const std::size_t size = 2 + g() % 2;
    const auto rs = apriori(tx(raw), {ms, mc, size});
    const auto ref = oracle::brute_rules(raw, ms, mc, size);
    CHECK(rs.rules.size() == ref.size());
    for (const auto& r : ref) {
      const auto* got = find(rs, r.a, r.b);
      REQUIRE(got);
      CHECK(std::abs(got->stats.support - r.support) <= 1e-12);
      CHECK(std::abs(got->stats.confidence - r.confidence) <= 1e-12);
      CHECK(std::abs(got->stats.lift - r.lift) <= 1e-12);
      CHECK(got->count == r.count);
    }
  }
}

TEST_CASE("invariants") {
  std::mt19937 g(8);
  std::vector<std::vector<std::string>> raw;
  for (int i = 0; i < 150; ++i) {
    std::vector<std::string> row;
    for (int k = 0; k < 7; ++k)
      if (g() % 2) row.push_back(std::string(1, static_cast<char>('a' + k)));
    raw.push_back(row);
  }
  const auto t = tx(raw);
  const auto rs = apriori(t, {0.1, 0.3, 2});
  REQUIRE_FALSE(rs.rules.empty());

  // downward closure
  std::set<ItemSet> frequent;
  for (const auto& f : rs.frequent) frequent.insert(f.items);
  for (const auto& f : rs.frequent) {
    for (std::size_t drop = 0; drop < f.items.size() && f.items.size() > 1; ++drop) {
      auto sub = f.items;
      sub.erase(sub.begin() + static_cast<long>(drop));
      CHECK(frequent.count(sub));
    }
  }
  for (const auto& r : rs.rules) {
    CHECK(r.stats.support <= r.stats.confidence);
    CHECK(r.stats.confidence <= 1.0);
    const auto* rev = find(rs, r.consequent, r.antecedent);
    if (rev) CHECK(rev->stats.lift == doctest::Approx(r.stats.lift).epsilon(1e-14));
  }
  // ordering
  for (std::size_t i = 1; i < rs.rules.size(); ++i) {
    const auto& p = rs.rules[i - 1];
    const auto& q = rs.rules[i];
    CHECK((p.stats.lift > q.stats.lift ||
           (p.stats.lift == q.stats.lift && p.stats.support >= q.stats.support)));
  }
  // transaction order does not matter
  auto shuffled = t;
  std::shuffle(shuffled.begin(), shuffled.end(), g);
  const auto rs2 = apriori(shuffled, {0.1, 0.3, 2});
  REQUIRE(rs2.rules.size() == rs.rules.size());
  for (std::size_t i = 0; i < rs.rules.size(); ++i) {
    CHECK(rs2.rules[i].antecedent == rs.rules[i].antecedent);
    CHECK(rs2.rules[i].consequent == rs.rules[i].consequent);
    CHECK(rs2.rules[i].stats.lift == doctest::Approx(rs.rules[i].stats.lift).epsilon(1e-14));
  }
}

TEST_CASE("market segments") {
  SUBCASE("no rule above the floor") {
    const auto t = tx(kFive);
    const auto rs = apriori(t, {0.3, 0.5, 2});
    const auto seg = segment_markets(rs, t, 0.7);
    REQUIRE(seg.size() == 3);
    CHECK(seg[0].label == "S1");
    CHECK(seg[0].items == ItemSet{"a"});
    CHECK(seg[2].items == ItemSet{"c"});
  }
  SUBCASE("chain a-b-c") {
    RuleSet rs;
    rs.rules.push_back({{"a"}, {"b"}, {0.5, 0.9, 1.2}, 5});
    rs.rules.push_back({{"b"}, {"c"}, {0.5, 0.8, 1.2}, 5});
    const auto seg = segment_markets(rs, {}, 0.7);
    REQUIRE(seg.size() == 1);
    CHECK(seg[0].items == ItemSet{"a", "b", "c"});
  }
  SUBCASE("two cliques and loose items match a component search") {
    RuleSet rs;
    rs.rules.push_back({{"a"}, {"b"}, {0.5, 0.9, 1.2}, 5});
    rs.rules.push_back({{"b", "c"}, {"a"}, {0.5, 0.75, 1.2}, 5});
    rs.rules.push_back({{"x"}, {"y"}, {0.5, 0.71, 1.2}, 5});
    rs.rules.push_back({{"y"}, {"q"}, {0.5, 0.2, 1.2}, 5});
    const auto t = tx({{"a", "z"}, {"q"}});
    const auto seg = segment_markets(rs, t, 0.7);
    const auto ref = oracle::components({"a", "b", "c", "x", "y", "q", "z"},
                                        {{"a", "b"}, {"a", "b", "c"}, {"x", "y"}});
    REQUIRE(seg.size() == ref.size());
    std::set<std::set<std::string>> got;
    for (const auto& s : seg) got.insert({s.items.begin(), s.items.end()});
    CHECK(got == std::set<std::set<std::string>>(ref.begin(), ref.end()));
  }
}

TEST_CASE("tour transactions and files") {
  Dataset ds;
  ds.tours.push_back({"T1", "C", VehicleType::truck, 0, 0, {}, {"s1", "s2", "s3"}});
  ds.tours.push_back({"T2", "C", VehicleType::truck, 0, 0, {}, {"s4"}});
  ds.shipments.push_back({"s1", "T1", "02", 1, "Z", "Y", false});
  ds.shipments.push_back({"s2", "T1", "01", 1, "Z", "Y", false});
  ds.shipments.push_back({"s3", "T1", "02", 1, "Z", "Y", false});
  ds.shipments.push_back({"s4", "T2", std::nullopt, 1, "Z", "Y", false});
  ds.reindex();
  const auto t = tour_transactions(ds);
  REQUIRE(t.size() == 1);
  CHECK(t[0].items == ItemSet{"01", "02"});

  TempDir dir("rules");
  write_transactions(t, dir / "transactions.csv");
  const auto back = load_transactions(dir / "transactions.csv");
  REQUIRE(back.size() == 1);
  CHECK(back[0].items == t[0].items);
  CHECK(back[0].tour_id == "T1");
}
