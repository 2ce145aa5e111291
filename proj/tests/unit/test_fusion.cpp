#include <doctest.h>

#include <cmath>
#include <numeric>

#include "core/error.hpp"
#include "fusion/fusion.hpp"
#include "../support/fixture.hpp"

using namespace tourkit;
using namespace tourkit::fusion;

namespace {

constexpr std::size_t DC = 0, TT = 1, PC = 2;

// One pc4 zone "Z" with pc6 children A and B, one tour per stop, each
// carrying commodity "01" from Z to a sink zone.
Dataset many_stops(std::size_t n, Resolution res) {
  Dataset ds;
  ds.zones.push_back({"Z", "1000", {0, 0}, {"1000AA", "1000AB"}});
  ds.zones.push_back({"K", "1001", {1000, 0}, {"1001AA"}});
  for (std::size_t i = 0; i < n; ++i) {
    TourRecord t;
    t.tour_id = "T" + std::to_string(i);
    t.carrier_id = "C";
    StopRecord s;
    s.zone_id = "Z";
    s.kind = StopKind::pickup;
    s.resolution = res;
    s.postcode = res == Resolution::pc4 ? "1000" : "1000AA";
    t.stops.push_back(s);
    StopRecord d;
    d.zone_id = "K";
    d.postcode = "1001AA";
    d.kind = StopKind::delivery;
    t.stops.push_back(d);
    ShipmentRecord sh;
    sh.shipment_id = "S" + std::to_string(i);
    sh.tour_id = t.tour_id;
    sh.commodity_code = "01";
    sh.weight_kg = 100;
    sh.load_zone = "Z";
    sh.unload_zone = "K";
    t.shipment_ids.push_back(sh.shipment_id);
    ds.tours.push_back(t);
    ds.shipments.push_back(sh);
  }
  ds.reindex();
  return ds;
}

}  // namespace

TEST_CASE("activity probability from firm counts and make probabilities") {
  FirmCensus c;
  c.counts[{"1000AA", ActivityType::dc}] = 2;
  c.counts[{"1000AA", ActivityType::tt}] = 1;
  c.make_use[{ActivityType::dc, "01", MakeUse::make}] = 0.5;
  c.make_use[{ActivityType::tt, "01", MakeUse::make}] = 1.0;
  const auto p = activity_probability("1000AA", std::string("01"), MakeUse::make, c);
  CHECK(p[DC] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(p[TT] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(p[PC] == 0.0);
  CHECK(std::abs(p[0] + p[1] + p[2] - 1.0) < 1e-12);
}

TEST_CASE("without a commodity the counts alone decide") {
  FirmCensus c;
  c.counts[{"1000AA", ActivityType::dc}] = 3;
  c.counts[{"1000AA", ActivityType::tt}] = 1;
  const auto p = activity_probability("1000AA", std::nullopt, MakeUse::use, c);
  CHECK(p[DC] == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(p[TT] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("single firm type gives certainty") {
  FirmCensus c;
  c.counts[{"1000AA", ActivityType::producer_consumer}] = 7;
  c.make_use[{ActivityType::producer_consumer, "02", MakeUse::use}] = 0.3;
  const auto p = activity_probability("1000AA", std::string("02"), MakeUse::use, c);
  CHECK(p[PC] == 1.0);
}

TEST_CASE("zones without information are errors") {
  FirmCensus c;
  CHECK_THROWS_AS(activity_probability("nowhere", std::nullopt, MakeUse::make, c), Error);
  c.counts[{"1000AA", ActivityType::dc}] = 1;
  // firms exist but none makes the commodity
  CHECK_THROWS_AS(activity_probability("1000AA", std::string("09"), MakeUse::make, c), Error);
}

TEST_CASE("pc6 weights follow flows") {
  const Zone z{"Z", "1000", {0, 0}, {"1000AA", "1000AB"}};
  ShipmentFlowCounts f;
  f.counts[{"01", "1000AA", FlowDirection::out}] = 3;
  f.counts[{"01", "1000AB", FlowDirection::out}] = 1;
  auto w = pc6_weights(z, std::string("01"), FlowDirection::out, f);
  CHECK(w[0] == doctest::Approx(0.75));
  CHECK(w[1] == doctest::Approx(0.25));

  // all zero: uniform
  w = pc6_weights(z, std::string("01"), FlowDirection::in, f);
  CHECK(w[0] == 0.5);
  CHECK(w[1] == 0.5);

  const Zone one{"Y", "1001", {0, 0}, {"1001AA"}};
  CHECK(pc6_weights(one, std::nullopt, FlowDirection::in, f) == std::vector<double>{1.0});

  const Zone none{"X", "1002", {0, 0}, {}};
  CHECK_THROWS_AS(pc6_weights(none, std::nullopt, FlowDirection::in, f), Error);

  // no commodity: totals over all commodities
  f.counts[{"02", "1000AB", FlowDirection::out}] = 4;
  w = pc6_weights(z, std::nullopt, FlowDirection::out, f);
  CHECK(w[0] == doctest::Approx(3.0 / 8));
}

TEST_CASE("sample_index inverts the cumulative distribution") {
  const std::vector<double> w{0.2, 0.0, 0.8};
  CHECK(sample_index(w, 0.0) == 0);
  CHECK(sample_index(w, 0.1999) == 0);
  CHECK(sample_index(w, 0.2) == 2);
  CHECK(sample_index(w, 0.9999999) == 2);
  CHECK(sample_index({0.5, 0.5, 0.0}, 1.0) == 1);  // rounding overflow stays on a positive weight
}

TEST_CASE("single type zones impute deterministically for any seed") {
  auto ds = many_stops(20, Resolution::pc6);
  FirmCensus c;
  c.counts[{"1000AA", ActivityType::tt}] = 4;
  c.counts[{"1001AA", ActivityType::dc}] = 1;
  c.make_use[{ActivityType::tt, "01", MakeUse::make}] = 0.4;
  c.make_use[{ActivityType::dc, "01", MakeUse::use}] = 0.4;
  ShipmentFlowCounts f;
  for (std::uint64_t seed : {1u, 2u, 99u}) {
    const auto r = impute_activities(ds, c, f, seed);
    for (const auto& t : r.dataset.tours) {
      CHECK(t.stops[0].activity_type == ActivityType::tt);
      CHECK(t.stops[1].activity_type == ActivityType::dc);
      CHECK_FALSE(t.stops[0].low_confidence);
    }
    CHECK(r.log.size() == 40);
  }
}

TEST_CASE("pc4 stops sample children at the flow ratio") {
  const auto ds = many_stops(10000, Resolution::pc4);
  FirmCensus c;
  c.counts[{"1000AA", ActivityType::dc}] = 1;
  c.counts[{"1000AB", ActivityType::tt}] = 1;
  c.counts[{"1001AA", ActivityType::dc}] = 1;
  c.make_use[{ActivityType::dc, "01", MakeUse::make}] = 1;
  c.make_use[{ActivityType::tt, "01", MakeUse::make}] = 1;
  c.make_use[{ActivityType::dc, "01", MakeUse::use}] = 1;
  ShipmentFlowCounts f;
  f.counts[{"01", "1000AA", FlowDirection::out}] = 3;
  f.counts[{"01", "1000AB", FlowDirection::out}] = 1;
  const auto r = impute_activities(ds, c, f, 5);
  std::size_t a = 0;
  for (const auto& e : r.log)
    if (e.stop_index == 0 && e.pc6_zone == "1000AA") ++a;
  CHECK(std::abs(static_cast<double>(a) / 10000 - 0.75) <= 0.02);
}

TEST_CASE("imputation is a function of the seed") {
  const auto ds = many_stops(200, Resolution::pc6);
  FirmCensus c;
  c.counts[{"1000AA", ActivityType::dc}] = 1;
  c.counts[{"1000AA", ActivityType::producer_consumer}] = 1;
  c.counts[{"1001AA", ActivityType::dc}] = 1;
  ShipmentFlowCounts f;
  c.make_use[{ActivityType::dc, "01", MakeUse::make}] = 0.5;
  c.make_use[{ActivityType::producer_consumer, "01", MakeUse::make}] = 0.5;
  c.make_use[{ActivityType::dc, "01", MakeUse::use}] = 1;
  const auto a = impute_activities(ds, c, f, 11);
  const auto b = impute_activities(ds, c, f, 11);
  CHECK(a.dataset == b.dataset);
  const auto other = impute_activities(ds, c, f, 12);
  CHECK_FALSE(other.dataset == a.dataset);

  // processing order does not matter: a reversed tour list gives the same stops
  auto rev = ds;
  std::reverse(rev.tours.begin(), rev.tours.end());
  rev.reindex();
  const auto r = impute_activities(rev, c, f, 11);
  for (const auto& t : r.dataset.tours) {
    CHECK(a.dataset.find_tour(t.tour_id)->stops == t.stops);
  }
  // every sampled type had positive probability
  for (const auto& e : a.log) {
    std::size_t k = 0;
    while (kActivities[k] != e.assigned) ++k;
    CHECK(e.probabilities[k] > 0);
  }
}

TEST_CASE("stops without a commodity are imputed from counts and flagged") {
  auto ds = many_stops(3, Resolution::pc6);
  ds.shipments[1].commodity_code.reset();
  FirmCensus c;
  c.counts[{"1000AA", ActivityType::dc}] = 1;
  c.counts[{"1001AA", ActivityType::dc}] = 1;
  c.make_use[{ActivityType::dc, "01", MakeUse::make}] = 1;
  c.make_use[{ActivityType::dc, "01", MakeUse::use}] = 1;
  const auto r = impute_activities(ds, c, ShipmentFlowCounts{}, 1);
  CHECK(r.dataset.tours[1].stops[0].low_confidence);
  CHECK_FALSE(r.dataset.tours[0].stops[0].low_confidence);
}

TEST_CASE("errors are tagged with the stop") {
  const auto ds = many_stops(2, Resolution::pc6);
  FirmCensus c;
  try {
    impute_activities(ds, c, ShipmentFlowCounts{}, 1);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("tour 'T0' stop 1") != std::string::npos);
  }
}

TEST_CASE("census and flow files round trip") {
  TempDir dir("fusion");
  FirmCensus c;
  c.counts[{"1000AA", ActivityType::dc}] = 2;
  c.counts[{"1000AB", ActivityType::producer_consumer}] = 5;
  c.make_use[{ActivityType::dc, "01", MakeUse::make}] = 0.25;
  ShipmentFlowCounts f;
  f.counts[{"01", "1000AA", FlowDirection::in}] = 9;
  save_census(c, dir / "firms.csv", dir / "make_use.csv");
  save_flows(f, dir / "flows.csv");
  const auto c2 = load_census(dir / "firms.csv", dir / "make_use.csv");
  CHECK(c2.counts == c.counts);
  CHECK(c2.make_use == c.make_use);
  CHECK(load_flows(dir / "flows.csv").counts == f.counts);

  write_text(dir / "firms.csv", "zone_id,activity_type,count\n1000AA,warehouse,1\n");
  CHECK_THROWS_AS(load_census(dir / "firms.csv", dir / "make_use.csv"), Error);
}
