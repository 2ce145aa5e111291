#include <doctest.h>

#include <random>

#include "core/error.hpp"
#include "features/features.hpp"
#include "../support/fixture.hpp"
#include "../support/oracles.hpp"

using namespace tourkit;
using namespace tourkit::features;

namespace {

StopRecord stop(const std::string& zone, StopKind kind, ActivityType a) {
  StopRecord s;
  s.zone_id = zone;
  s.postcode = zone == "D" ? "1000AA" : zone == "A" ? "1001AA" : zone == "B" ? "1002AA" : "1003AA";
  s.kind = kind;
  s.activity_type = a;
  return s;
}

void add_shipment(Dataset& ds, TourRecord& t, const std::string& id, const std::string& code,
                  double kg, const std::string& from, const std::string& to, bool empty = false) {
  ShipmentRecord s;
  s.shipment_id = id;
  s.tour_id = t.tour_id;
  s.commodity_code = code;
  s.weight_kg = kg;
  s.load_zone = from;
  s.unload_zone = to;
  s.empty_flag = empty;
  t.shipment_ids.push_back(id);
  ds.shipments.push_back(s);
}

// D(0,0) dc, A(3000,4000) producer, B(6000,8000) terminal, E(9000,12000) producer.
Dataset matrix_fixture() {
  using K = StopKind;
  using T = ActivityType;
  Dataset ds;
  ds.zones = {{"D", "1000", {0, 0}, {"1000AA"}},
              {"A", "1001", {3000, 4000}, {"1001AA"}},
              {"B", "1002", {6000, 8000}, {"1002AA"}},
              {"E", "1003", {9000, 12000}, {"1003AA"}}};
  for (const auto& a : ds.zones)
    for (const auto& b : ds.zones)
      if (a.zone_id != b.zone_id) ds.travel_times.set(a.zone_id, b.zone_id, 10);

  TourRecord x{"X", "C1", VehicleType::truck, 2, 370, {}, {}};
  x.stops = {stop("D", K::pickup, T::dc), stop("A", K::delivery, T::producer_consumer),
             stop("B", K::delivery, T::tt), stop("A", K::delivery, T::producer_consumer)};
  add_shipment(ds, x, "x1", "01", 600, "D", "A");
  add_shipment(ds, x, "x2", "01", 400, "D", "B");
  add_shipment(ds, x, "x3", "05", 300, "D", "A");

  TourRecord y{"Y", "C2", VehicleType::trailer, 5, 1200, {}, {}};
  y.stops = {stop("A", K::pickup, T::producer_consumer), stop("B", K::pickup, T::tt),
             stop("B", K::pickup, T::tt), stop("E", K::delivery, T::producer_consumer)};
  add_shipment(ds, y, "y1", "02", 2000, "A", "E", true);
  add_shipment(ds, y, "y2", "03", 100, "B", "E");
  add_shipment(ds, y, "y3", "03", 150, "B", "E");

  TourRecord z{"Z", "C1", VehicleType::truck, 1, 700, {}, {}};
  z.stops = {stop("D", K::pickup, T::dc), stop("A", K::delivery, T::producer_consumer)};
  add_shipment(ds, z, "z1", "01", 650, "D", "A");

  ds.tours = {x, y, z};
  ds.reindex();
  return ds;
}

congestion::CongestionMap morning_at(const std::string& zone) {
  congestion::CongestionMap m;
  m.set(zone, "morning", {0.5, true, true});
  return m;
}

}  // namespace

TEST_CASE("weight factor") {
  CHECK(weight_factor(1000, 1000) == 0.0);
  CHECK(weight_factor(500, 1000) == 0.5);
  CHECK(weight_factor(100, 1000) == doctest::Approx(0.9).epsilon(1e-15));
  CHECK_THROWS_AS(weight_factor(1, 0), Error);
  CHECK_THROWS_AS(weight_factor(0, 10), Error);
  CHECK_THROWS_AS(weight_factor(11, 10), Error);
  double prev = 2;
  for (double w = 1; w <= 1000; w += 37) {
    const double f = weight_factor(w, 1000);
    CHECK(f < prev);
    prev = f;
  }
}

TEST_CASE("geometric median fixtures") {
  const std::vector<Point> same{{2, 3}, {2, 3}, {2, 3}};
  auto c = geometric_median(same, 1e-6);
  CHECK(c.x == doctest::Approx(2));
  CHECK(c.y == doctest::Approx(3));

  const std::vector<Point> square{{0, 0}, {10, 0}, {10, 10}, {0, 10}};
  c = geometric_median(square, 1e-6);
  CHECK(std::abs(c.x - 5) < 1e-6);
  CHECK(std::abs(c.y - 5) < 1e-6);

  const std::vector<Point> heavy{{0, 0}, {0, 0}, {10, 0}};
  c = geometric_median(heavy, 1e-3);
  CHECK(distance(c, {0, 0}) <= 1e-3);

  CHECK_THROWS_AS(geometric_median(std::vector<Point>{}, 1e-3), Error);
  CHECK_THROWS_AS(geometric_median(square, 0), Error);
}

TEST_CASE("geometric median agrees with a grid search and never climbs") {
  std::mt19937 g(5);
  std::uniform_real_distribution<double> u(0, 2000);
  const double tol = 1e-3;
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + static_cast<int>(g() % 15);
    std::vector<Point> p;
    std::vector<std::pair<double, double>> q;
    for (int i = 0; i < n; ++i) {
      p.push_back({u(g), u(g)});
      q.push_back({p.back().x, p.back().y});
    }
    std::vector<double> trace;
    const auto c = geometric_median(p, tol, &trace);
    const auto o = oracle::grid_median(q, tol / 20);
    INFO("n = " << n);
    if (n == 2) {
      // every point of the segment is a median
      CHECK(median_objective(p, c) <= oracle::sum_dist(q, o.first, o.second) + tol);
    } else {
      CHECK(std::hypot(c.x - o.first, c.y - o.second) <= 2 * tol);
    }
    for (std::size_t k = 1; k < trace.size(); ++k) CHECK(trace[k] <= trace[k - 1]);
    for (const auto& pt : p) CHECK(median_objective(p, c) <= median_objective(p, pt) + tol);
  }
}

TEST_CASE("average tour length") {
  const std::vector<Point> one{{3000, 4000}};
  CHECK(average_tour_length({0, 0}, one) == doctest::Approx(5.0).epsilon(1e-9));
  const std::vector<Point> sym{{1000, 0}, {-1000, 0}, {0, 1000}, {0, -1000}};
  CHECK(average_tour_length({0, 0}, sym) < 1e-6);
  // two clusters of three; the median sits on the heavier one
  const std::vector<Point> clusters{{5000, 0}, {5010, 0}, {5000, 10}, {5005, 5},
                                    {-5000, 0}, {-5010, 0}, {-5000, 10}};
  std::vector<std::pair<double, double>> q;
  for (const auto& pt : clusters) q.push_back({pt.x, pt.y});
  const auto o = oracle::grid_median(q, 1e-5);
  CHECK(std::abs(average_tour_length({100, 100}, clusters) * 1000 -
                 std::hypot(o.first - 100, o.second - 100)) <= 2e-3);
}

TEST_CASE("departure classes") {
  CHECK(discretize_departure(400) == "morning");
  CHECK(discretize_departure(100) == "night");
  CHECK(discretize_departure(1200) == "night");
  CHECK(discretize_departure(373) == "morning");
  CHECK(discretize_departure(372) == "night");
  CHECK(discretize_departure(638) == "midday");
  CHECK(discretize_departure(893) == "afternoon");
  CHECK(discretize_departure(1172) == "night");
  CHECK_THROWS_AS(discretize_departure(1440), Error);
  CHECK_THROWS_AS(discretize_departure(-1), Error);
  std::map<std::string, int> seen;
  for (int m = 0; m < 1440; ++m) ++seen[discretize_departure(m)];
  int total = 0;
  for (const auto& [k, v] : seen) total += v;
  CHECK(total == 1440);
  CHECK(seen.size() == 4);
}

TEST_CASE("equal frequency departure rebinning") {
  std::vector<int> minutes;
  for (int i = 0; i < 100; ++i) minutes.push_back(i * 10);
  const auto b = rebin_departure(minutes);
  CHECK(b.edges == std::array<int, 4>{200, 400, 600, 800});
  CHECK_THROWS_AS(rebin_departure({1, 2, 3}), Error);
  CHECK_THROWS_AS(rebin_departure(std::vector<int>(50, 480)), Error);
}

TEST_CASE("tour types") {
  using K = StopKind;
  auto make = [](std::vector<K> kinds) {
    std::vector<StopRecord> s;
    for (auto k : kinds) {
      StopRecord r;
      r.kind = k;
      r.zone_id = "Z" + std::to_string(s.size());
      s.push_back(r);
    }
    return s;
  };
  CHECK(classify_tour_type(make({K::pickup, K::delivery})).type == TourType::direct);
  CHECK(classify_tour_type(make({K::pickup, K::delivery, K::delivery, K::delivery})).type ==
        TourType::distribution);
  CHECK(classify_tour_type(make({K::pickup, K::pickup, K::pickup, K::delivery})).type ==
        TourType::collection);
  const auto mixed = classify_tour_type(make({K::pickup, K::pickup, K::pickup, K::delivery, K::delivery}));
  CHECK(mixed.mixed);
  CHECK(mixed.type == TourType::collection);
  CHECK(classify_tour_type(make({K::pickup, K::pickup, K::delivery, K::delivery})).type ==
        TourType::distribution);
  CHECK_THROWS_AS(classify_tour_type(make({K::pickup})), Error);

  // zone ids do not matter
  auto s = make({K::pickup, K::delivery, K::delivery});
  auto t = s;
  for (auto& r : t) r.zone_id += "x";
  CHECK(classify_tour_type(s).type == classify_tour_type(t).type);
  for (const auto& n : tour_type_names()) CHECK(to_string(*parse_tour_type(n)) == n);
}

TEST_CASE("arrival congestion flags") {
  const auto ds = matrix_fixture();
  const auto periods = congestion::default_periods();
  const auto& x = ds.tours[0];

  auto f = arrival_congestion_flags(x, congestion::CongestionMap{}, ds.travel_times, periods);
  CHECK_FALSE(f.first_stop_congested);
  CHECK_FALSE(f.later_stop_congested);
  CHECK(f.arrival_minutes == std::vector<int>{370, 380, 390, 400});

  // departure 370 is night, but the first arrival at 380 is in the morning
  f = arrival_congestion_flags(x, morning_at("A"), ds.travel_times, periods);
  CHECK(f.first_stop_congested);
  CHECK(f.later_stop_congested);

  f = arrival_congestion_flags(x, morning_at("B"), ds.travel_times, periods);
  CHECK_FALSE(f.first_stop_congested);
  CHECK(f.later_stop_congested);

  // the origin never counts
  f = arrival_congestion_flags(x, morning_at("D"), ds.travel_times, periods);
  CHECK_FALSE(f.first_stop_congested);
  CHECK_FALSE(f.later_stop_congested);

  TravelTimes none;
  CHECK_THROWS_AS(arrival_congestion_flags(x, morning_at("A"), none, periods), Error);
}

TEST_CASE("bins") {
  const std::vector<double> b{0.25, 0.5, 0.75};
  CHECK(bin_index(0.0, b) == 0);
  CHECK(bin_index(0.25, b) == 1);
  CHECK(bin_index(0.7499, b) == 2);
  CHECK(bin_index(0.75, b) == 3);
  CHECK(bin_labels(b, 0) ==
        std::vector<std::string>{"[0,0.25)", "[0.25,0.5)", "[0.5,0.75)", "[0.75,inf)"});
  const std::vector<double> nc{2, 7};
  CHECK(bin_labels(nc, 1) == std::vector<std::string>{"[1,2)", "[2,7)", "[7,inf)"});
}

TEST_CASE("hand computed feature matrix") {
  const auto ds = matrix_fixture();
  FeatureConfig cfg;
  cfg.test_fraction = 0.0;
  const auto m = build_matrix(ds, morning_at("A"), cfg);
  REQUIRE(m.rows.size() == 3);
  CHECK(m.excluded == 0);
  CHECK(m.w_max.at("01") == 1300);
  CHECK(m.w_max.at("02") == 2000);

  const auto& x = m.rows[0];
  CHECK(x.tour_id == "X");
  CHECK(x.market == "01");
  CHECK(x.day_of_week == 2);
  CHECK(x.visit_dc == 1);
  CHECK(x.visit_tt == 1);
  CHECK(x.first_stop_congested == 1);
  CHECK(x.later_stop_congested == 1);
  CHECK(x.initial_load_kg == 1300);
  CHECK(x.weight_factor == 0.0);
  CHECK(x.n_commodities == 2);
  CHECK(x.empty_flag == 0);
  CHECK(x.vehicle_type == 0);
  CHECK(x.avg_tour_length_km == doctest::Approx(5.0).epsilon(1e-6));
  CHECK(x.departure_class == "night");
  CHECK(x.tour_type == "distribution");
  CHECK(x.n_stops == 3);

  const auto& y = m.rows[1];
  CHECK(y.market == "02");
  CHECK(y.visit_dc == 0);
  CHECK(y.visit_tt == 1);
  CHECK(y.first_stop_congested == 0);
  CHECK(y.later_stop_congested == 0);
  CHECK(y.initial_load_kg == 2000);
  CHECK(y.n_commodities == 2);
  CHECK(y.empty_flag == 1);
  CHECK(y.vehicle_type == 1);
  CHECK(y.avg_tour_length_km == doctest::Approx(5.0).epsilon(1e-6));
  CHECK(y.departure_class == "night");
  CHECK(y.tour_type == "collection");
  CHECK(y.n_stops == 3);

  const auto& z = m.rows[2];
  CHECK(z.market == "01");
  CHECK(z.visit_dc == 1);
  CHECK(z.visit_tt == 0);
  CHECK(z.first_stop_congested == 0);
  CHECK(z.weight_factor == 0.5);
  CHECK(z.n_commodities == 1);
  CHECK(z.departure_class == "midday");
  CHECK(z.tour_type == "direct");
  CHECK(z.n_stops == 1);
  CHECK(z.avg_tour_length_km == doctest::Approx(5.0).epsilon(1e-9));

  const auto ts = encode(m, {}, SplitSelect::all);
  CHECK(ts.size() == 3);
  CHECK(ts.classes == tour_type_names());
  CHECK(ts.y_class == std::vector<int>{2, 1, 0});
  CHECK(ts.y_numeric == std::vector<double>{3, 3, 1});
  CHECK(ts.row_ids == std::vector<std::string>{"X", "Y", "Z"});
  const auto wf = ts.attribute_index("weight_factor");
  CHECK(ts.attributes[wf].levels[static_cast<std::size_t>(ts.x[2][wf])] == "[0.5,0.75)");
  const auto nc = ts.attribute_index("n_commodities");
  CHECK(ts.attributes[nc].levels[static_cast<std::size_t>(ts.x[0][nc])] == "[2,7)");
  const auto len = ts.attribute_index("avg_tour_length");
  CHECK(ts.attributes[len].levels[static_cast<std::size_t>(ts.x[0][len])] == "[0,22)");
  CHECK_THROWS_AS(ts.attribute_index("market"), Error);
  CHECK_THROWS_AS(ts.attribute_index("tour_type"), Error);
}

TEST_CASE("encode options") {
  const auto ds = matrix_fixture();
  FeatureConfig cfg;
  cfg.test_fraction = 0.0;
  const auto m = build_matrix(ds, morning_at("A"), cfg);
  EncodeOptions o;
  o.class_target = "departure_class";
  o.numeric_target.reset();
  o.attributes = {"vehicle_type", "market"};
  const auto ts = encode(m, o, SplitSelect::all);
  CHECK_FALSE(ts.has_numeric);
  CHECK(ts.attributes.size() == 2);
  CHECK(ts.attributes[1].levels == std::vector<std::string>{"01", "02"});
  CHECK(ts.classes == departure_classes());
  CHECK(encode(m, o, SplitSelect::test).size() == 0);

  o.attributes = {"departure_class"};
  CHECK_THROWS_AS(encode(m, o, SplitSelect::all), Error);
  o.attributes = {"colour"};
  CHECK_THROWS_AS(encode(m, o, SplitSelect::all), Error);
  o.class_target = "n_stops";
  o.attributes = {};
  CHECK_THROWS_AS(encode(m, o, SplitSelect::all), Error);
}

TEST_CASE("exclusions and errors") {
  auto ds = matrix_fixture();
  FeatureConfig cfg;
  cfg.test_fraction = 0.0;

  SUBCASE("low confidence stop") {
    ds.tours[1].stops[1].low_confidence = true;
    const auto m = build_matrix(ds, {}, cfg);
    CHECK(m.rows.size() == 2);
    CHECK(m.excluded == 1);
  }
  SUBCASE("shipment without commodity") {
    ds.shipments[0].commodity_code.reset();
    const auto m = build_matrix(ds, {}, cfg);
    CHECK(m.excluded == 1);
    CHECK(m.rows[0].tour_id == "Y");
  }
  SUBCASE("nothing loaded at the origin") {
    ds.shipments[6].load_zone = "A";
    const auto m = build_matrix(ds, {}, cfg);
    CHECK(m.excluded == 1);
  }
  SUBCASE("unimputed stop") {
    ds.tours[0].stops[2].activity_type = ActivityType::unknown;
    CHECK_THROWS_AS(build_matrix(ds, {}, cfg), Error);
  }
  SUBCASE("bad breaks") {
    cfg.weight_factor_breaks = {0.5, 0.25};
    CHECK_THROWS_AS(build_matrix(ds, {}, cfg), Error);
  }
}

TEST_CASE("split depends only on seed and tour id") {
  const auto ds = matrix_fixture();
  FeatureConfig cfg;
  cfg.test_fraction = 0.5;
  cfg.seed = 9;
  const auto a = build_matrix(ds, {}, cfg);
  const auto b = build_matrix(ds, {}, cfg);
  for (std::size_t i = 0; i < a.rows.size(); ++i) CHECK(a.rows[i].test == b.rows[i].test);
  // loads above the training maximum clamp to zero
  for (const auto& r : a.rows) {
    CHECK(r.weight_factor >= 0.0);
    CHECK(r.weight_factor < 1.0);
  }
}

TEST_CASE("matrix files round trip") {
  TempDir dir("features");
  const auto ds = matrix_fixture();
  FeatureConfig cfg;
  cfg.test_fraction = 0.3;
  cfg.seed = 4;
  const auto m = build_matrix(ds, morning_at("A"), cfg);
  write_matrix_csv(m, dir / "matrix.csv");
  write_feature_config(m, dir / "feature_config.json");
  const auto back = load_matrix(dir.path());
  REQUIRE(back.rows.size() == m.rows.size());
  for (std::size_t i = 0; i < m.rows.size(); ++i) {
    CHECK(back.rows[i].tour_id == m.rows[i].tour_id);
    CHECK(back.rows[i].test == m.rows[i].test);
    CHECK(back.rows[i].weight_factor == doctest::Approx(m.rows[i].weight_factor));
    CHECK(back.rows[i].tour_type == m.rows[i].tour_type);
    CHECK(back.rows[i].n_stops == m.rows[i].n_stops);
  }
  const auto e1 = encode(m, {}, SplitSelect::all);
  const auto e2 = encode(back, {}, SplitSelect::all);
  CHECK(e1.x == e2.x);
  CHECK(e1.attributes == e2.attributes);
}
