#include <doctest.h>

#include <random>

#include "congestion/congestion.hpp"
#include "core/error.hpp"
#include "../support/fixture.hpp"
#include "../support/oracles.hpp"

using namespace tourkit;
using namespace tourkit::congestion;

namespace {

SpeedSeries series(std::vector<double> v, int step = 1, int start = 0, double length = 1000) {
  SpeedSeries s;
  s.segment_id = "s";
  s.zone_id = "Z";
  s.length_m = length;
  s.step_minutes = step;
  s.start_minute = start;
  s.speeds_kmh = std::move(v);
  return s;
}

Period whole_day() { return Period{"all", {{0, 1440}}}; }

}  // namespace

TEST_CASE("forward moving average") {
  CHECK(smooth_speeds(series({100, 80, 60}), 2).speeds_kmh == std::vector<double>{90, 70, 60});
  CHECK(smooth_speeds(series({50, 50, 50, 50}), 3).speeds_kmh ==
        std::vector<double>{50, 50, 50, 50});
  CHECK(smooth_speeds(series({1, 7, 3}), 1).speeds_kmh == std::vector<double>{1, 7, 3});
  CHECK_THROWS_AS(smooth_speeds(series({}), 2), Error);
  CHECK_THROWS_AS(smooth_speeds(series({1}), 0), Error);
}

TEST_CASE("segment delay") {
  CHECK(segment_delay(series({120, 60, 120}), whole_day()) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(segment_delay(series({100, 100}), whole_day()) == 0.0);
  // period minimum taken only inside the window; free flow over the whole series
  const auto s = series({120, 60, 100}, 10, 0);
  CHECK(segment_delay(s, Period{"late", {{20, 30}}}) == doctest::Approx(60 * (1.0 / 100 - 1.0 / 120)));
  CHECK_THROWS_AS(segment_delay(s, Period{"none", {{500, 600}}}), Error);
}

TEST_CASE("delay is never negative") {
  std::mt19937 g(3);
  std::uniform_real_distribution<double> u(20, 130);
  for (int k = 0; k < 200; ++k) {
    std::vector<double> v(24);
    for (auto& x : v) x = u(g);
    const auto sm = smooth_speeds(series(v, 60), 3);
    for (const auto& p : default_periods()) CHECK(segment_delay(sm, p) >= 0.0);
  }
}

TEST_CASE("zone level is length weighted") {
  CHECK(zone_congestion_level({{1000, 0.2}, {3000, 0.6}}) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(zone_congestion_level({{500, 0.3}}) == 0.3);
  CHECK(zone_congestion_level({{500, 0}, {700, 0}}) == 0.0);
  CHECK_THROWS_AS(zone_congestion_level({}), Error);
}

TEST_CASE("indicator threshold is strict") {
  CHECK(congestion_indicator(0.5));
  CHECK_FALSE(congestion_indicator(0.0));
  CHECK_FALSE(congestion_indicator(10.0 / 60.0));
  CHECK(congestion_indicator(std::nextafter(10.0 / 60.0, 1.0)));
}

TEST_CASE("default periods partition the day") {
  const auto p = default_periods();
  for (int m = 0; m < 1440; ++m) {
    int hits = 0;
    for (const auto& x : p) hits += x.contains(m);
    CHECK(hits == 1);
  }
  CHECK(period_of(p, 400).name == "morning");
  CHECK(period_of(p, 700).name == "midday");
  CHECK(period_of(p, 900).name == "afternoon");
  CHECK(period_of(p, 100).name == "rest");
  CHECK(period_of(p, 1440 + 400).name == "morning");
}

TEST_CASE("jenks") {
  CHECK(jenks_breaks({1, 2, 3, 100, 101, 102}, 2) == std::vector<double>{3});
  CHECK(jenks_breaks({5, 1, 9}, 1).empty());
  CHECK_THROWS_AS(jenks_breaks({4, 4, 4}, 2), Error);
  CHECK_THROWS_AS(jenks_breaks({}, 2), Error);
}

TEST_CASE("jenks matches exhaustive search") {
  std::mt19937 g(17);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 3 + static_cast<int>(g() % 9);
    std::vector<double> v(static_cast<std::size_t>(n));
    for (auto& x : v) x = static_cast<double>(g() % 50);
    std::set<double> distinct(v.begin(), v.end());
    const int k = 1 + static_cast<int>(g() % std::min<std::size_t>(4, distinct.size()));
    const auto b = jenks_breaks(v, k);
    CHECK(b.size() == static_cast<std::size_t>(k - 1));
    CHECK(std::is_sorted(b.begin(), b.end()));
    CHECK(oracle::partition_ssd(v, b) ==
          doctest::Approx(oracle::best_partition_ssd(v, k)).epsilon(1e-9));
  }
}

TEST_CASE("proximity expansion") {
  const std::vector<Zone> zones{{"A", "1000", {0, 0}, {}},
                                {"B", "1001", {5000, 0}, {}},
                                {"C", "1002", {0, 7000}, {}},
                                {"D", "1003", {6423, 0}, {}}};
  const auto out = expand_by_proximity(zones, {"A"}, kDefaultRadiusM);
  CHECK(out == std::set<std::string>{"A", "B"});  // D sits exactly on the radius
  CHECK(expand_by_proximity(zones, {"A"}, 0) == std::set<std::string>{"A"});
  CHECK(expand_by_proximity(zones, {}, 1e9).empty());
  const auto d = proximity_distances(zones, {"A"});
  CHECK(d == std::vector<double>{5000, 7000, 6423});
}

TEST_CASE("end to end over a small layout") {
  std::vector<Zone> zones;
  for (int i = 0; i < 6; ++i) zones.push_back({"Z" + std::to_string(i), std::to_string(1000 + i), {i * 5000.0, 0}, {}});
  std::vector<SpeedSeries> s;
  // Z0 dips to 60 in the morning, every other zone is flat
  std::vector<double> dip(96, 100.0);
  for (int k = 28; k < 36; ++k) dip[static_cast<std::size_t>(k)] = 60;
  auto a = series(dip, 15, 0, 2000);
  a.zone_id = "Z0";
  s.push_back(a);
  for (int i = 1; i < 5; ++i) {
    auto b = series(std::vector<double>(96, 100.0), 15, 0, 1000);
    b.zone_id = "Z" + std::to_string(i);
    s.push_back(b);
  }
  const auto r = compute_congestion(s, zones, default_periods(), 1, {2, 6423});
  const auto* cell = r.map.find("Z0", "morning");
  REQUIRE(cell);
  CHECK(*cell->level == doctest::Approx(0.4));
  CHECK(cell->indicator);
  CHECK(r.map.congested("Z1", "morning"));
  CHECK_FALSE(r.map.congested("Z2", "morning"));
  CHECK_FALSE(r.map.congested("Z0", "midday"));
  CHECK(r.no_data_zones == std::vector<std::string>{"Z5"});
  CHECK_FALSE(r.map.find("Z5", "morning")->level.has_value());
  CHECK(r.breaks.count("morning"));
  CHECK(r.break_notes.at("midday") == "no congested zones");
}

TEST_CASE("speed and congestion files round trip") {
  TempDir dir("congestion");
  std::vector<SpeedSeries> s{series({100, 90.5, 80}, 15, 360, 1200)};
  save_speeds_long(s, dir / "speeds.csv");
  const auto back = load_speeds(dir / "speeds.csv");
  REQUIRE(back.size() == 1);
  CHECK(back[0].speeds_kmh == s[0].speeds_kmh);
  CHECK(back[0].start_minute == 360);
  CHECK(back[0].step_minutes == 15);

  write_text(dir / "wide.csv", "segment_id,zone_id,length_m,step_minutes,t0,v0,v1\nq,Z,10,5,0,70,80\n");
  const auto wide = load_speeds(dir / "wide.csv");
  CHECK(wide[0].speeds_kmh == std::vector<double>{70, 80});

  CongestionMap m;
  m.set("Z", "morning", {0.25, true, true});
  m.set("Y", "morning", {std::nullopt, false, true});
  write_congestion_csv(m, dir / "c.csv");
  const auto m2 = load_congestion_csv(dir / "c.csv");
  CHECK(m2.congested("Z", "morning"));
  CHECK(m2.congested("Y", "morning"));
  CHECK(*m2.find("Z", "morning")->level == 0.25);
  CHECK_FALSE(m2.find("Y", "morning")->level);
  CHECK_FALSE(m2.congested("Q", "morning"));
}
