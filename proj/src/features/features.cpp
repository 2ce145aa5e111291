#include "features/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <set>

#include <json.hpp>

#include "core/csv.hpp"
#include "core/error.hpp"
#include "core/rng.hpp"

namespace tourkit::features {

double weight_factor(double w, double w_max) {
  if (!(w_max > 0.0)) fail(ErrorCode::domain, "w_max must be positive");
  if (!(w > 0.0)) fail(ErrorCode::domain, "initial load must be positive");
  if (w > w_max) fail(ErrorCode::domain, "initial load exceeds w_max");
  return (w_max - w) / w_max;
}

double median_objective(std::span<const Point> points, const Point& c) {
  double sum = 0.0;
  for (const auto& p : points) sum += distance(p, c);
  return sum;
}

namespace {

struct WeiszfeldStep {
  Point next;
  bool optimal = false;  // y is an input point satisfying the optimality condition
};

WeiszfeldStep weiszfeld_step(std::span<const Point> points, const Point& y, double eps) {
  double nx = 0.0, ny = 0.0, den = 0.0, rx = 0.0, ry = 0.0;
  int eta = 0;
  for (const auto& p : points) {
    const double d = distance(p, y);
    if (d <= eps) {
      ++eta;
      continue;
    }
    nx += p.x / d;
    ny += p.y / d;
    den += 1.0 / d;
    rx += (p.x - y.x) / d;
    ry += (p.y - y.y) / d;
  }
  if (den == 0.0) return {y, true};
  const Point t{nx / den, ny / den};
  if (eta == 0) return {t, false};
  const double r = std::hypot(rx, ry);
  if (r <= eta) return {y, true};
  const double g = eta / r;
  return {{(1.0 - g) * t.x + g * y.x, (1.0 - g) * t.y + g * y.y}, false};
}

}  // namespace

Point geometric_median(std::span<const Point> points, double tol, std::vector<double>* trace) {
  if (points.empty()) fail(ErrorCode::invalid_argument, "geometric median of no points");
  if (!(tol > 0.0)) fail(ErrorCode::invalid_argument, "tolerance must be positive");
  if (trace) trace->clear();
  if (points.size() == 1) {
    if (trace) trace->push_back(0.0);
    return points[0];
  }
  double lo_x = points[0].x, hi_x = lo_x, lo_y = points[0].y, hi_y = lo_y;
  Point y{0.0, 0.0};
  for (const auto& p : points) {
    lo_x = std::min(lo_x, p.x);
    hi_x = std::max(hi_x, p.x);
    lo_y = std::min(lo_y, p.y);
    hi_y = std::max(hi_y, p.y);
    y.x += p.x;
    y.y += p.y;
  }
  y.x /= static_cast<double>(points.size());
  y.y /= static_cast<double>(points.size());
  const double scale = std::hypot(hi_x - lo_x, hi_y - lo_y);
  if (scale == 0.0) {
    if (trace) trace->push_back(0.0);
    return points[0];
  }
  const double eps = 1e-12 * std::max(scale, 1.0);
  const double stop = tol * 1e-4;

  double f = median_objective(points, y);
  if (trace) trace->push_back(f);
  for (int it = 0; it < 200000; ++it) {
    const auto step = weiszfeld_step(points, y, eps);
    if (step.optimal) break;
    const double moved = distance(step.next, y);
    const double f_next = median_objective(points, step.next);
    // Round-off can only make the objective wobble at machine precision.
    if (f_next > f) break;
    y = step.next;
    f = f_next;
    if (trace) trace->push_back(f);
    if (moved < stop) break;
  }
  // The iteration approaches an optimal input point slowly; test them directly.
  for (const auto& p : points) {
    if (weiszfeld_step(points, p, eps).optimal) {
      const double fp = median_objective(points, p);
      if (fp <= f) {
        y = p;
        f = fp;
        if (trace) trace->push_back(f);
      }
      break;
    }
  }
  return y;
}

double average_tour_length(const Point& depot, std::span<const Point> customers, double tol) {
  if (customers.empty()) fail(ErrorCode::invalid_argument, "tour has no customers");
  return distance(depot, geometric_median(customers, tol)) / 1000.0;
}

std::string DepartureBins::classify(int minute) const {
  if (minute < 0 || minute >= 1440) {
    fail(ErrorCode::domain, "departure minute out of range: " + std::to_string(minute));
  }
  if (minute < edges[0]) return "night";
  if (minute < edges[1]) return "morning";
  if (minute < edges[2]) return "midday";
  if (minute < edges[3]) return "afternoon";
  return "night";
}

std::string discretize_departure(int minute) { return DepartureBins{}.classify(minute); }

DepartureBins rebin_departure(std::vector<int> minutes) {
  if (minutes.size() < 5) fail(ErrorCode::domain, "rebinning needs at least 5 departures");
  std::sort(minutes.begin(), minutes.end());
  DepartureBins bins;
  const auto n = minutes.size();
  for (std::size_t q = 1; q <= 4; ++q) {
    bins.edges[q - 1] = minutes[std::min(n - 1, q * n / 5)];
  }
  for (std::size_t i = 1; i < 4; ++i) {
    if (bins.edges[i] <= bins.edges[i - 1]) {
      fail(ErrorCode::domain, "departure minutes too concentrated to rebin into 5 classes");
    }
  }
  return bins;
}

std::string_view to_string(TourType t) {
  switch (t) {
    case TourType::direct: return "direct";
    case TourType::collection: return "collection";
    case TourType::distribution: return "distribution";
  }
  return "direct";
}

std::optional<TourType> parse_tour_type(std::string_view text) {
  if (text == "direct") return TourType::direct;
  if (text == "collection") return TourType::collection;
  if (text == "distribution") return TourType::distribution;
  return std::nullopt;
}

TourTypeResult classify_tour_type(std::span<const StopRecord> stops) {
  if (stops.size() < 2) fail(ErrorCode::domain, "tour type needs at least 2 stops");
  std::size_t pickups = 0;
  for (const auto& s : stops) pickups += s.kind == StopKind::pickup;
  const std::size_t deliveries = stops.size() - pickups;
  if (pickups == 1 && deliveries == 1) return {TourType::direct, false};
  if (pickups == 1 && deliveries >= 2) return {TourType::distribution, false};
  if (pickups >= 2 && deliveries == 1) return {TourType::collection, false};
  return {pickups > deliveries ? TourType::collection : TourType::distribution, true};
}

ArrivalFlags arrival_congestion_flags(const TourRecord& tour,
                                      const congestion::CongestionMap& cmap,
                                      const TravelTimes& travel_times,
                                      const std::vector<congestion::Period>& periods) {
  ArrivalFlags out;
  double clock = tour.departure_minute;
  for (std::size_t k = 0; k < tour.stops.size(); ++k) {
    if (k > 0) {
      const auto& from = tour.stops[k - 1].zone_id;
      const auto& to = tour.stops[k].zone_id;
      const auto tt = travel_times.get(from, to);
      if (!tt) {
        fail(ErrorCode::validation, "tour '" + tour.tour_id + "': no travel time " + from +
                                        " -> " + to);
      }
      clock += *tt;
    }
    const int minute = static_cast<int>(std::floor(clock));
    out.arrival_minutes.push_back(minute);
    if (k == 0) continue;
    const auto& period = congestion::period_of(periods, minute);
    if (cmap.congested(tour.stops[k].zone_id, period.name)) {
      (k == 1 ? out.first_stop_congested : out.later_stop_congested) = true;
    }
  }
  return out;
}

std::size_t bin_index(double value, std::span<const double> breaks) {
  return static_cast<std::size_t>(std::upper_bound(breaks.begin(), breaks.end(), value) -
                                  breaks.begin());
}

std::vector<std::string> bin_labels(std::span<const double> breaks, double lower) {
  std::vector<std::string> out;
  double lo = lower;
  for (double b : breaks) {
    out.push_back("[" + csv::format_double(lo) + "," + csv::format_double(b) + ")");
    lo = b;
  }
  out.push_back("[" + csv::format_double(lo) + ",inf)");
  return out;
}

namespace {

void check_breaks(const std::vector<double>& breaks, const char* what) {
  for (std::size_t i = 1; i < breaks.size(); ++i) {
    if (!(breaks[i] > breaks[i - 1])) {
      fail(ErrorCode::config, std::string(what) + " breaks must be strictly increasing");
    }
  }
}

std::string market_of(const std::vector<const ShipmentRecord*>& shipments) {
  std::map<std::string, double> weight;
  for (const auto* s : shipments) {
    if (s->commodity_code) weight[*s->commodity_code] += s->weight_kg;
  }
  std::string best = "all";
  double best_w = -1.0;
  for (const auto& [code, w] : weight) {
    if (w > best_w) {
      best = code;
      best_w = w;
    }
  }
  return best;
}

}  // namespace

Matrix build_matrix(const Dataset& dataset, const congestion::CongestionMap& cmap,
                    const FeatureConfig& config) {
  check_breaks(config.tour_length_breaks_km, "tour length");
  check_breaks(config.n_commodities_breaks, "n_commodities");
  check_breaks(config.weight_factor_breaks, "weight factor");
  if (config.test_fraction < 0.0 || config.test_fraction >= 1.0) {
    fail(ErrorCode::config, "test_fraction must be in [0,1)");
  }
  Matrix m;
  m.config = config;
  if (config.rebin_departure) {
    std::vector<int> minutes;
    for (const auto& t : dataset.tours) minutes.push_back(t.departure_minute);
    m.config.departure = rebin_departure(std::move(minutes));
  }

  for (const auto& tour : dataset.tours) {
    const auto shipments = dataset.shipments_of(tour);
    auto exclude = [&](const std::string& why) {
      m.warnings.push_back("tour '" + tour.tour_id + "' excluded: " + why);
      ++m.excluded;
    };
    for (const auto& s : tour.stops) {
      if (s.activity_type == ActivityType::unknown) {
        fail(ErrorCode::validation,
             "tour '" + tour.tour_id + "' has a stop with unknown activity type; run fuse first");
      }
    }
    if (tour.stops.size() < 2) {
      exclude("fewer than 2 stops");
      continue;
    }
    if (shipments.empty()) {
      exclude("no shipments");
      continue;
    }
    if (std::any_of(tour.stops.begin(), tour.stops.end(),
                    [](const StopRecord& s) { return s.low_confidence; })) {
      exclude("low-confidence activity imputation");
      continue;
    }
    if (std::any_of(shipments.begin(), shipments.end(),
                    [](const ShipmentRecord* s) { return !s->commodity_code; })) {
      exclude("shipment without commodity code");
      continue;
    }

    FeatureRow r;
    r.tour_id = tour.tour_id;
    r.carrier_id = tour.carrier_id;
    r.market = market_of(shipments);
    r.day_of_week = tour.day_of_week;
    r.vehicle_type = static_cast<int>(tour.vehicle_type);
    r.departure_minute = tour.departure_minute;
    for (const auto& s : tour.stops) {
      r.visit_dc |= s.activity_type == ActivityType::dc;
      r.visit_tt |= s.activity_type == ActivityType::tt;
    }
    const auto flags = arrival_congestion_flags(tour, cmap, dataset.travel_times, config.periods);
    r.first_stop_congested = flags.first_stop_congested;
    r.later_stop_congested = flags.later_stop_congested;

    std::set<std::string> codes;
    const auto& origin = tour.stops.front().zone_id;
    for (const auto* s : shipments) {
      codes.insert(*s->commodity_code);
      r.empty_flag |= s->empty_flag;
      if (s->load_zone == origin) r.initial_load_kg += s->weight_kg;
    }
    r.n_commodities = static_cast<int>(codes.size());
    if (!(r.initial_load_kg > 0.0)) {
      exclude("no load at the departure zone");
      continue;
    }

    const Zone* depot = dataset.find_zone(origin);
    std::vector<Point> customers;
    for (std::size_t k = 1; k < tour.stops.size(); ++k) {
      const Zone* z = dataset.find_zone(tour.stops[k].zone_id);
      if (!depot || !z) fail(ErrorCode::validation, "tour '" + tour.tour_id + "': unknown zone");
      customers.push_back(z->centroid);
    }
    r.avg_tour_length_km = average_tour_length(depot->centroid, customers, config.median_tol_m);

    r.departure_class = m.config.departure.classify(tour.departure_minute);
    const auto tt = classify_tour_type(tour.stops);
    r.tour_type = std::string(to_string(tt.type));
    r.tour_type_mixed = tt.mixed;
    if (tt.mixed) m.warnings.push_back("tour '" + tour.tour_id + "' is mixed; typed by majority");
    r.n_stops = static_cast<int>(tour.stops.size()) - 1;
    if (r.n_stops > 33) {
      m.warnings.push_back("tour '" + tour.tour_id + "' has " + std::to_string(r.n_stops) +
                           " stops");
    }
    Rng rng(derive_seed(config.seed, "split:" + tour.tour_id));
    r.test = rng.uniform() < config.test_fraction;
    m.rows.push_back(std::move(r));
  }

  for (const auto& r : m.rows) {
    if (r.test) continue;
    auto& w = m.w_max[r.market];
    w = std::max(w, r.initial_load_kg);
  }
  double global_max = 0.0;
  for (const auto& [market, w] : m.w_max) global_max = std::max(global_max, w);
  for (auto& r : m.rows) {
    double w_max = 0.0;
    if (const auto it = m.w_max.find(r.market); it != m.w_max.end()) {
      w_max = it->second;
    } else {
      w_max = global_max;
      m.warnings.push_back("market '" + r.market + "' has no training rows; global w_max used");
    }
    if (!(w_max > 0.0)) {
      r.weight_factor = 0.0;
      m.warnings.push_back("tour '" + r.tour_id + "': no training w_max; WF set to 0");
    } else if (r.initial_load_kg > w_max) {
      r.weight_factor = 0.0;
      m.warnings.push_back("tour '" + r.tour_id + "': load above training w_max; WF clamped to 0");
    } else {
      r.weight_factor = weight_factor(r.initial_load_kg, w_max);
    }
  }
  return m;
}

namespace {

struct ColumnSpec {
  mtdt::Attribute attribute;
  std::function<std::string(const FeatureRow&)> level;
};

const std::vector<std::string> kBinary{"0", "1"};

std::string label_of(double v, const std::vector<double>& breaks,
                     const std::vector<std::string>& labels) {
  return labels[bin_index(v, breaks)];
}

ColumnSpec column_spec(const std::string& name, const Matrix& m) {
  const auto& c = m.config;
  auto binary = [&](int FeatureRow::*field) {
    return ColumnSpec{{name, kBinary, true},
                      [field](const FeatureRow& r) { return std::to_string(r.*field); }};
  };
  if (name == "day_of_week") {
    return {{name, {"0", "1", "2", "3", "4", "5", "6"}, false},
            [](const FeatureRow& r) { return std::to_string(r.day_of_week); }};
  }
  if (name == "visit_DC") return binary(&FeatureRow::visit_dc);
  if (name == "visit_TT") return binary(&FeatureRow::visit_tt);
  if (name == "first_stop_congested") return binary(&FeatureRow::first_stop_congested);
  if (name == "later_stop_congested") return binary(&FeatureRow::later_stop_congested);
  if (name == "empty_flag") return binary(&FeatureRow::empty_flag);
  if (name == "vehicle_type") return binary(&FeatureRow::vehicle_type);
  if (name == "weight_factor") {
    auto labels = bin_labels(c.weight_factor_breaks, 0.0);
    return {{name, labels, true}, [labels, b = c.weight_factor_breaks](const FeatureRow& r) {
              return label_of(r.weight_factor, b, labels);
            }};
  }
  if (name == "n_commodities") {
    auto labels = bin_labels(c.n_commodities_breaks, 1.0);
    return {{name, labels, true}, [labels, b = c.n_commodities_breaks](const FeatureRow& r) {
              return label_of(r.n_commodities, b, labels);
            }};
  }
  if (name == "avg_tour_length") {
    auto labels = bin_labels(c.tour_length_breaks_km, 0.0);
    return {{name, labels, true}, [labels, b = c.tour_length_breaks_km](const FeatureRow& r) {
              return label_of(r.avg_tour_length_km, b, labels);
            }};
  }
  if (name == "departure_class") {
    return {{name, departure_classes(), true},
            [](const FeatureRow& r) { return r.departure_class; }};
  }
  if (name == "tour_type") {
    return {{name, tour_type_names(), false}, [](const FeatureRow& r) { return r.tour_type; }};
  }
  if (name == "market") {
    std::set<std::string> markets;
    for (const auto& r : m.rows) markets.insert(r.market);
    return {{name, {markets.begin(), markets.end()}, false},
            [](const FeatureRow& r) { return r.market; }};
  }
  fail(ErrorCode::config, "unknown attribute '" + name + "'");
}

int level_index(const mtdt::Attribute& a, const std::string& level) {
  const auto it = std::find(a.levels.begin(), a.levels.end(), level);
  if (it == a.levels.end()) {
    fail(ErrorCode::validation, "value '" + level + "' is not a level of '" + a.name + "'");
  }
  return static_cast<int>(it - a.levels.begin());
}

}  // namespace

mtdt::TrainingSet encode(const Matrix& matrix, const EncodeOptions& options, SplitSelect which) {
  if (options.class_target != "tour_type" && options.class_target != "departure_class") {
    fail(ErrorCode::config, "class target must be tour_type or departure_class, got '" +
                                options.class_target + "'");
  }
  if (options.numeric_target && *options.numeric_target != "n_stops") {
    fail(ErrorCode::config, "numeric target must be n_stops, got '" + *options.numeric_target + "'");
  }
  std::vector<std::string> names = options.attributes;
  if (names.empty()) {
    for (const auto& n : matrix_attribute_names()) {
      if (n != options.class_target && n != "market") names.push_back(n);
    }
  }
  std::vector<ColumnSpec> specs;
  std::set<std::string> seen;
  for (const auto& n : names) {
    if (n == options.class_target) {
      fail(ErrorCode::config, "attribute '" + n + "' is also the class target");
    }
    if (!seen.insert(n).second) fail(ErrorCode::config, "attribute '" + n + "' listed twice");
    specs.push_back(column_spec(n, matrix));
  }
  const auto target = column_spec(options.class_target, matrix);

  mtdt::TrainingSet ts;
  for (const auto& s : specs) ts.attributes.push_back(s.attribute);
  ts.classes = target.attribute.levels;
  ts.class_target = options.class_target;
  ts.has_numeric = options.numeric_target.has_value();
  ts.numeric_target = options.numeric_target.value_or("");
  for (const auto& r : matrix.rows) {
    if ((which == SplitSelect::train && r.test) || (which == SplitSelect::test && !r.test)) {
      continue;
    }
    std::vector<int> x;
    x.reserve(specs.size());
    for (const auto& s : specs) x.push_back(level_index(s.attribute, s.level(r)));
    ts.x.push_back(std::move(x));
    ts.y_class.push_back(level_index(target.attribute, target.level(r)));
    ts.y_numeric.push_back(ts.has_numeric ? r.n_stops : 0.0);
    ts.row_ids.push_back(r.tour_id);
  }
  ts.validate();
  return ts;
}

namespace {

const std::vector<std::string> kMatrixHeader{
    "tour_id",          "carrier_id",      "market",          "split",
    "day_of_week",      "visit_DC",        "visit_TT",        "first_stop_congested",
    "later_stop_congested", "initial_load_kg", "weight_factor", "n_commodities",
    "empty_flag",       "vehicle_type",    "avg_tour_length_km", "departure_minute",
    "departure_class",  "tour_type",       "tour_type_mixed", "n_stops"};

}  // namespace

void write_matrix_csv(const Matrix& m, const std::filesystem::path& path) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(m.rows.size());
  for (const auto& r : m.rows) {
    rows.push_back({r.tour_id,
                    r.carrier_id,
                    r.market,
                    r.test ? "test" : "train",
                    std::to_string(r.day_of_week),
                    std::to_string(r.visit_dc),
                    std::to_string(r.visit_tt),
                    std::to_string(r.first_stop_congested),
                    std::to_string(r.later_stop_congested),
                    csv::format_double(r.initial_load_kg),
                    csv::format_double(r.weight_factor),
                    std::to_string(r.n_commodities),
                    std::to_string(r.empty_flag),
                    std::to_string(r.vehicle_type),
                    csv::format_double(r.avg_tour_length_km),
                    std::to_string(r.departure_minute),
                    r.departure_class,
                    r.tour_type,
                    std::to_string(r.tour_type_mixed),
                    std::to_string(r.n_stops)});
  }
  csv::write_file(path, kMatrixHeader, rows);
}

void write_feature_config(const Matrix& m, const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["tour_length_breaks_km"] = m.config.tour_length_breaks_km;
  j["n_commodities_breaks"] = m.config.n_commodities_breaks;
  j["weight_factor_breaks"] = m.config.weight_factor_breaks;
  j["departure_edges"] = m.config.departure.edges;
  j["departure_rebinned"] = m.config.rebin_departure;
  j["median_tol_m"] = m.config.median_tol_m;
  j["test_fraction"] = m.config.test_fraction;
  j["seed"] = m.config.seed;
  nlohmann::ordered_json periods = nlohmann::ordered_json::array();
  for (const auto& p : m.config.periods) {
    periods.push_back({{"name", p.name}, {"windows", p.windows}});
  }
  j["periods"] = periods;
  j["w_max_kg"] = m.w_max;
  j["rows"] = m.rows.size();
  j["excluded"] = m.excluded;
  j["warnings"] = m.warnings;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::io, "cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

Matrix load_matrix(const std::filesystem::path& dir) {
  Matrix m;
  {
    const auto path = dir / "feature_config.json";
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::io, "cannot open '" + path.string() + "'");
    try {
      const auto j = nlohmann::json::parse(in);
      m.config.tour_length_breaks_km = j.at("tour_length_breaks_km").get<std::vector<double>>();
      m.config.n_commodities_breaks = j.at("n_commodities_breaks").get<std::vector<double>>();
      m.config.weight_factor_breaks = j.at("weight_factor_breaks").get<std::vector<double>>();
      m.config.departure.edges = j.at("departure_edges").get<std::array<int, 4>>();
      m.config.rebin_departure = j.at("departure_rebinned").get<bool>();
      m.config.median_tol_m = j.at("median_tol_m").get<double>();
      m.config.test_fraction = j.at("test_fraction").get<double>();
      m.config.seed = j.at("seed").get<std::uint64_t>();
      m.config.periods.clear();
      for (const auto& p : j.at("periods")) {
        m.config.periods.push_back(
            {p.at("name").get<std::string>(),
             p.at("windows").get<std::vector<std::pair<int, int>>>()});
      }
      m.w_max = j.at("w_max_kg").get<std::map<std::string, double>>();
      m.excluded = j.at("excluded").get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::parse, path.string() + ": " + e.what());
    }
  }
  const auto table = csv::read_file(dir / "matrix.csv");
  table.require_columns(kMatrixHeader);
  std::vector<std::size_t> col;
  for (const auto& h : kMatrixHeader) col.push_back(table.column(h));
  auto flag = [&](const csv::Row& row, std::size_t c) {
    const auto v = csv::to_int(table, row, col[c]);
    if (v != 0 && v != 1) {
      fail(ErrorCode::validation, table.source() + ":" + std::to_string(row.line) + ": column '" +
                                      kMatrixHeader[c] + "' is not 0/1");
    }
    return static_cast<int>(v);
  };
  for (const auto& row : table.rows()) {
    FeatureRow r;
    r.tour_id = table.at(row, col[0]);
    r.carrier_id = table.at(row, col[1]);
    r.market = table.at(row, col[2]);
    const auto& split = table.at(row, col[3]);
    if (split != "train" && split != "test") {
      fail(ErrorCode::validation, table.source() + ":" + std::to_string(row.line) +
                                      ": split must be train or test");
    }
    r.test = split == "test";
    r.day_of_week = static_cast<int>(csv::to_int(table, row, col[4]));
    r.visit_dc = flag(row, 5);
    r.visit_tt = flag(row, 6);
    r.first_stop_congested = flag(row, 7);
    r.later_stop_congested = flag(row, 8);
    r.initial_load_kg = csv::to_double(table, row, col[9]);
    r.weight_factor = csv::to_double(table, row, col[10]);
    r.n_commodities = static_cast<int>(csv::to_int(table, row, col[11]));
    r.empty_flag = flag(row, 12);
    r.vehicle_type = flag(row, 13);
    r.avg_tour_length_km = csv::to_double(table, row, col[14]);
    r.departure_minute = static_cast<int>(csv::to_int(table, row, col[15]));
    r.departure_class = table.at(row, col[16]);
    r.tour_type = table.at(row, col[17]);
    r.tour_type_mixed = flag(row, 18);
    r.n_stops = static_cast<int>(csv::to_int(table, row, col[19]));
    if (r.day_of_week < 0 || r.day_of_week > 6 || r.n_commodities < 1 || r.n_stops < 1 ||
        r.weight_factor < 0.0 || r.weight_factor >= 1.0 || !parse_tour_type(r.tour_type)) {
      fail(ErrorCode::validation,
           table.source() + ":" + std::to_string(row.line) + ": value out of range");
    }
    m.rows.push_back(std::move(r));
  }
  return m;
}

}  // namespace tourkit::features
