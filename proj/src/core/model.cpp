#include "core/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

#include "core/csv.hpp"
#include "core/error.hpp"

namespace tourkit {

namespace {

std::string at_line(const csv::Table& table, const csv::Row& row) {
  return table.source() + ":" + std::to_string(row.line);
}

[[noreturn]] void row_error(const csv::Table& table, const csv::Row& row,
                            const std::string& message) {
  fail(ErrorCode::validation, at_line(table, row) + ": " + message);
}

bool parse_flag(const csv::Table& table, const csv::Row& row, std::size_t col) {
  const std::string& text = table.at(row, col);
  if (text == "1" || text == "true") return true;
  if (text == "0" || text == "false" || text.empty()) return false;
  row_error(table, row, "column '" + table.header()[col] + "' is not a flag: '" + text + "'");
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  if (text.empty()) return out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = text.find(sep, start);
    out.push_back(text.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

std::string_view to_string(VehicleType v) {
  return v == VehicleType::truck ? "truck" : "trailer";
}

std::string_view to_string(StopKind k) { return k == StopKind::pickup ? "pickup" : "delivery"; }

std::string_view to_string(Resolution r) { return r == Resolution::pc4 ? "pc4" : "pc6"; }

std::string_view to_string(ActivityType a) {
  switch (a) {
    case ActivityType::dc: return "DC";
    case ActivityType::tt: return "TT";
    case ActivityType::producer_consumer: return "producer_consumer";
    case ActivityType::unknown: return "unknown";
  }
  return "unknown";
}

std::optional<VehicleType> parse_vehicle_type(std::string_view text) {
  if (text == "truck" || text == "0") return VehicleType::truck;
  if (text == "trailer" || text == "1") return VehicleType::trailer;
  return std::nullopt;
}

std::optional<StopKind> parse_stop_kind(std::string_view text) {
  if (text == "pickup") return StopKind::pickup;
  if (text == "delivery") return StopKind::delivery;
  return std::nullopt;
}

std::optional<ActivityType> parse_activity_type(std::string_view text) {
  if (text == "DC" || text == "dc") return ActivityType::dc;
  if (text == "TT" || text == "tt") return ActivityType::tt;
  if (text == "producer_consumer") return ActivityType::producer_consumer;
  if (text == "unknown" || text.empty()) return ActivityType::unknown;
  return std::nullopt;
}

double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

void TravelTimes::set(const std::string& from, const std::string& to, double minutes) {
  minutes_[{from, to}] = minutes;
}

std::optional<double> TravelTimes::get(const std::string& from, const std::string& to) const {
  const auto it = minutes_.find({from, to});
  if (it != minutes_.end()) return it->second;
  if (from == to) return 0.0;
  return std::nullopt;
}

const Zone* Dataset::find_zone(std::string_view zone_id) const {
  const auto it = zone_index_.find(std::string(zone_id));
  return it == zone_index_.end() ? nullptr : &zones[it->second];
}

const TourRecord* Dataset::find_tour(std::string_view tour_id) const {
  const auto it = tour_index_.find(std::string(tour_id));
  return it == tour_index_.end() ? nullptr : &tours[it->second];
}

std::vector<const ShipmentRecord*> Dataset::shipments_of(const TourRecord& tour) const {
  std::vector<const ShipmentRecord*> out;
  out.reserve(tour.shipment_ids.size());
  for (const auto& id : tour.shipment_ids) {
    const auto it = shipment_index_.find(id);
    if (it != shipment_index_.end()) out.push_back(&shipments[it->second]);
  }
  return out;
}

void Dataset::reindex() {
  zone_index_.clear();
  tour_index_.clear();
  shipment_index_.clear();
  for (std::size_t i = 0; i < zones.size(); ++i) zone_index_.emplace(zones[i].zone_id, i);
  for (std::size_t i = 0; i < tours.size(); ++i) tour_index_.emplace(tours[i].tour_id, i);
  for (std::size_t i = 0; i < shipments.size(); ++i) {
    shipment_index_.emplace(shipments[i].shipment_id, i);
  }
}

DatasetPaths DatasetPaths::in_directory(const std::filesystem::path& dir) {
  DatasetPaths p;
  p.tours = dir / "tours.csv";
  p.stops = dir / "stops.csv";
  p.shipments = dir / "shipments.csv";
  p.zones = dir / "zones.csv";
  p.travel_times = dir / "travel_times.csv";
  if (std::filesystem::exists(dir / "commodities.csv")) p.commodity_codes = dir / "commodities.csv";
  return p;
}

Dataset load_dataset(const DatasetPaths& paths) {
  Dataset ds;

  // zones
  {
    const auto table = csv::read_file(paths.zones);
    table.require_columns({"zone_id", "pc4", "x_m", "y_m", "pc6_children"});
    const auto c_id = table.column("zone_id"), c_pc4 = table.column("pc4"),
               c_x = table.column("x_m"), c_y = table.column("y_m"),
               c_children = table.column("pc6_children");
    std::unordered_set<std::string> seen_children;
    std::unordered_set<std::string> seen_zones;
    for (const auto& row : table.rows()) {
      Zone z;
      z.zone_id = table.at(row, c_id);
      z.pc4 = table.at(row, c_pc4);
      z.centroid = {csv::to_double(table, row, c_x), csv::to_double(table, row, c_y)};
      z.pc6_children = split(table.at(row, c_children), ';');
      if (z.zone_id.empty()) row_error(table, row, "empty zone_id");
      if (!seen_zones.insert(z.zone_id).second) {
        row_error(table, row, "duplicate zone_id '" + z.zone_id + "'");
      }
      for (const auto& child : z.pc6_children) {
        if (!seen_children.insert(child).second) {
          row_error(table, row, "pc6 child '" + child + "' appears in more than one zone");
        }
      }
      ds.zones.push_back(std::move(z));
    }
  }
  std::unordered_map<std::string, const Zone*> zone_by_id;
  for (const auto& z : ds.zones) zone_by_id.emplace(z.zone_id, &z);

  // tours
  std::unordered_map<std::string, std::size_t> tour_pos;
  {
    const auto table = csv::read_file(paths.tours);
    table.require_columns({"tour_id", "carrier_id", "vehicle_type", "day_of_week",
                           "departure_minute"});
    const auto c_id = table.column("tour_id"), c_carrier = table.column("carrier_id"),
               c_vehicle = table.column("vehicle_type"), c_day = table.column("day_of_week"),
               c_dep = table.column("departure_minute");
    for (const auto& row : table.rows()) {
      TourRecord t;
      t.tour_id = table.at(row, c_id);
      t.carrier_id = table.at(row, c_carrier);
      const auto vehicle = parse_vehicle_type(table.at(row, c_vehicle));
      if (!vehicle) row_error(table, row, "unknown vehicle_type '" + table.at(row, c_vehicle) + "'");
      t.vehicle_type = *vehicle;
      const auto day = csv::to_int(table, row, c_day);
      if (day < 0 || day > 6) row_error(table, row, "day_of_week out of range: " + std::to_string(day));
      t.day_of_week = static_cast<int>(day);
      const auto dep = csv::to_int(table, row, c_dep);
      if (dep < 0 || dep >= 1440) {
        row_error(table, row, "departure_minute out of range [0,1440): " + std::to_string(dep));
      }
      t.departure_minute = static_cast<int>(dep);
      if (!tour_pos.emplace(t.tour_id, ds.tours.size()).second) {
        row_error(table, row, "duplicate tour_id '" + t.tour_id + "'");
      }
      ds.tours.push_back(std::move(t));
    }
  }

  // stops
  {
    const auto table = csv::read_file(paths.stops);
    table.require_columns({"tour_id", "seq", "zone_id", "postcode", "kind"},
                          {"activity_type", "low_confidence"});
    const auto c_tour = table.column("tour_id"), c_seq = table.column("seq"),
               c_zone = table.column("zone_id"), c_post = table.column("postcode"),
               c_kind = table.column("kind");
    const auto c_act = table.find_column("activity_type");
    const auto c_low = table.find_column("low_confidence");
    std::vector<std::vector<std::pair<long long, StopRecord>>> staged(ds.tours.size());
    std::vector<std::vector<std::size_t>> staged_lines(ds.tours.size());
    for (const auto& row : table.rows()) {
      const auto& tour_id = table.at(row, c_tour);
      const auto it = tour_pos.find(tour_id);
      if (it == tour_pos.end()) row_error(table, row, "dangling tour_id '" + tour_id + "'");
      StopRecord s;
      s.zone_id = table.at(row, c_zone);
      const auto zit = zone_by_id.find(s.zone_id);
      if (zit == zone_by_id.end()) row_error(table, row, "dangling zone_id '" + s.zone_id + "'");
      s.postcode = table.at(row, c_post);
      if (s.postcode.size() == 4) {
        s.resolution = Resolution::pc4;
        if (s.postcode != zit->second->pc4) {
          row_error(table, row, "pc4 postcode '" + s.postcode + "' does not match zone '" +
                                    s.zone_id + "'");
        }
      } else if (s.postcode.size() == 6) {
        s.resolution = Resolution::pc6;
        const auto& kids = zit->second->pc6_children;
        if (std::find(kids.begin(), kids.end(), s.postcode) == kids.end()) {
          row_error(table, row, "pc6 postcode '" + s.postcode + "' is not a child of zone '" +
                                    s.zone_id + "'");
        }
      } else {
        row_error(table, row, "postcode must have 4 or 6 characters: '" + s.postcode + "'");
      }
      const auto kind = parse_stop_kind(table.at(row, c_kind));
      if (!kind) row_error(table, row, "unknown stop kind '" + table.at(row, c_kind) + "'");
      s.kind = *kind;
      if (c_act) {
        const auto act = parse_activity_type(table.at(row, *c_act));
        if (!act) row_error(table, row, "unknown activity_type '" + table.at(row, *c_act) + "'");
        s.activity_type = *act;
      }
      if (c_low) s.low_confidence = parse_flag(table, row, *c_low);
      staged[it->second].emplace_back(csv::to_int(table, row, c_seq), std::move(s));
      staged_lines[it->second].push_back(row.line);
    }
    for (std::size_t t = 0; t < ds.tours.size(); ++t) {
      auto& list = staged[t];
      std::stable_sort(list.begin(), list.end(),
                       [](const auto& a, const auto& b) { return a.first < b.first; });
      for (std::size_t i = 1; i < list.size(); ++i) {
        if (list[i].first == list[i - 1].first) {
          fail(ErrorCode::validation, table.source() + ": tour '" + ds.tours[t].tour_id +
                                          "' has duplicate stop seq " +
                                          std::to_string(list[i].first));
        }
      }
      if (list.empty()) {
        fail(ErrorCode::validation,
             paths.tours.string() + ": tour '" + ds.tours[t].tour_id + "' has no stops");
      }
      for (auto& [seq, stop] : list) ds.tours[t].stops.push_back(std::move(stop));
    }
  }

  // commodity code list
  std::optional<std::unordered_set<std::string>> known_codes;
  if (paths.commodity_codes) {
    const auto table = csv::read_file(*paths.commodity_codes);
    table.require_columns({"code"}, {"label"});
    known_codes.emplace();
    for (const auto& row : table.rows()) known_codes->insert(table.at(row, table.column("code")));
  }

  // shipments
  {
    const auto table = csv::read_file(paths.shipments);
    table.require_columns({"shipment_id", "tour_id", "commodity_code", "weight_kg", "load_zone",
                           "unload_zone", "empty_flag"});
    const auto c_id = table.column("shipment_id"), c_tour = table.column("tour_id"),
               c_code = table.column("commodity_code"), c_w = table.column("weight_kg"),
               c_load = table.column("load_zone"), c_unload = table.column("unload_zone"),
               c_empty = table.column("empty_flag");
    std::unordered_set<std::string> seen;
    for (const auto& row : table.rows()) {
      ShipmentRecord s;
      s.shipment_id = table.at(row, c_id);
      if (!seen.insert(s.shipment_id).second) {
        row_error(table, row, "duplicate shipment_id '" + s.shipment_id + "'");
      }
      s.tour_id = table.at(row, c_tour);
      const auto it = tour_pos.find(s.tour_id);
      if (it == tour_pos.end()) row_error(table, row, "dangling tour_id '" + s.tour_id + "'");
      if (const auto& code = table.at(row, c_code); !code.empty()) {
        s.commodity_code = code;
        if (known_codes && !known_codes->count(code)) {
          ds.warnings.push_back(table.source() + ":" + std::to_string(row.line) +
                                ": unknown commodity code '" + code + "'");
        }
      }
      s.weight_kg = csv::to_double(table, row, c_w);
      if (s.weight_kg < 0) row_error(table, row, "negative weight_kg");
      s.load_zone = table.at(row, c_load);
      s.unload_zone = table.at(row, c_unload);
      if (!zone_by_id.count(s.load_zone)) {
        row_error(table, row, "dangling load_zone '" + s.load_zone + "'");
      }
      if (!zone_by_id.count(s.unload_zone)) {
        row_error(table, row, "dangling unload_zone '" + s.unload_zone + "'");
      }
      s.empty_flag = parse_flag(table, row, c_empty);
      ds.tours[it->second].shipment_ids.push_back(s.shipment_id);
      ds.shipments.push_back(std::move(s));
    }
  }

  // travel times
  {
    const auto table = csv::read_file(paths.travel_times);
    table.require_columns({"from_zone", "to_zone", "minutes"});
    const auto c_from = table.column("from_zone"), c_to = table.column("to_zone"),
               c_min = table.column("minutes");
    for (const auto& row : table.rows()) {
      const auto& from = table.at(row, c_from);
      const auto& to = table.at(row, c_to);
      if (!zone_by_id.count(from)) row_error(table, row, "dangling from_zone '" + from + "'");
      if (!zone_by_id.count(to)) row_error(table, row, "dangling to_zone '" + to + "'");
      const double minutes = csv::to_double(table, row, c_min);
      if (minutes < 0) row_error(table, row, "negative travel time");
      if (from == to && minutes != 0.0) row_error(table, row, "non-zero diagonal travel time");
      ds.travel_times.set(from, to, minutes);
    }
  }

  ds.reindex();
  return ds;
}

void validate_dataset(const Dataset& ds) {
  std::unordered_map<std::string, const Zone*> zones;
  std::unordered_set<std::string> children;
  for (const auto& z : ds.zones) {
    if (!zones.emplace(z.zone_id, &z).second) {
      fail(ErrorCode::validation, "duplicate zone_id '" + z.zone_id + "'");
    }
    if (!std::isfinite(z.centroid.x) || !std::isfinite(z.centroid.y)) {
      fail(ErrorCode::validation, "zone '" + z.zone_id + "' has a non-finite centroid");
    }
    for (const auto& c : z.pc6_children) {
      if (!children.insert(c).second) {
        fail(ErrorCode::validation, "pc6 child '" + c + "' appears in more than one zone");
      }
    }
  }
  std::unordered_set<std::string> tours;
  for (const auto& t : ds.tours) {
    if (!tours.insert(t.tour_id).second) {
      fail(ErrorCode::validation, "duplicate tour_id '" + t.tour_id + "'");
    }
    if (t.stops.empty()) fail(ErrorCode::validation, "tour '" + t.tour_id + "' has no stops");
    if (t.departure_minute < 0 || t.departure_minute >= 1440) {
      fail(ErrorCode::validation, "tour '" + t.tour_id + "' departure_minute out of range");
    }
    if (t.day_of_week < 0 || t.day_of_week > 6) {
      fail(ErrorCode::validation, "tour '" + t.tour_id + "' day_of_week out of range");
    }
    for (const auto& s : t.stops) {
      const auto it = zones.find(s.zone_id);
      if (it == zones.end()) {
        fail(ErrorCode::validation,
             "tour '" + t.tour_id + "' references unknown zone '" + s.zone_id + "'");
      }
      const bool pc4 = s.postcode.size() == 4;
      if (pc4 != (s.resolution == Resolution::pc4) || (!pc4 && s.postcode.size() != 6)) {
        fail(ErrorCode::validation, "tour '" + t.tour_id + "' stop postcode/resolution mismatch");
      }
    }
  }
  for (const auto& s : ds.shipments) {
    if (!tours.count(s.tour_id)) {
      fail(ErrorCode::validation, "shipment '" + s.shipment_id + "' has dangling tour_id");
    }
    if (!(s.weight_kg >= 0)) {
      fail(ErrorCode::validation, "shipment '" + s.shipment_id + "' has negative weight");
    }
    if (!zones.count(s.load_zone) || !zones.count(s.unload_zone)) {
      fail(ErrorCode::validation, "shipment '" + s.shipment_id + "' has a dangling zone");
    }
  }
  for (const auto& [key, minutes] : ds.travel_times.entries()) {
    if (minutes < 0 || (key.first == key.second && minutes != 0.0)) {
      fail(ErrorCode::validation, "invalid travel time " + key.first + "->" + key.second);
    }
  }
}

void write_stops_csv(const Dataset& ds, const std::filesystem::path& path) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& t : ds.tours) {
    for (std::size_t i = 0; i < t.stops.size(); ++i) {
      const auto& s = t.stops[i];
      rows.push_back({t.tour_id, std::to_string(i + 1), s.zone_id, s.postcode,
                      std::string(to_string(s.kind)), std::string(to_string(s.activity_type)),
                      s.low_confidence ? "1" : "0"});
    }
  }
  csv::write_file(path, {"tour_id", "seq", "zone_id", "postcode", "kind", "activity_type",
                         "low_confidence"},
                  rows);
}

void save_dataset(const Dataset& ds, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::vector<std::vector<std::string>> rows;
    for (const auto& t : ds.tours) {
      rows.push_back({t.tour_id, t.carrier_id, std::string(to_string(t.vehicle_type)),
                      std::to_string(t.day_of_week), std::to_string(t.departure_minute)});
    }
    csv::write_file(dir / "tours.csv",
                    {"tour_id", "carrier_id", "vehicle_type", "day_of_week", "departure_minute"},
                    rows);
  }
  write_stops_csv(ds, dir / "stops.csv");
  {
    std::vector<std::vector<std::string>> rows;
    for (const auto& s : ds.shipments) {
      rows.push_back({s.shipment_id, s.tour_id, s.commodity_code.value_or(""),
                      csv::format_double(s.weight_kg), s.load_zone, s.unload_zone,
                      s.empty_flag ? "1" : "0"});
    }
    csv::write_file(dir / "shipments.csv",
                    {"shipment_id", "tour_id", "commodity_code", "weight_kg", "load_zone",
                     "unload_zone", "empty_flag"},
                    rows);
  }
  {
    std::vector<std::vector<std::string>> rows;
    for (const auto& z : ds.zones) {
      std::string kids;
      for (std::size_t i = 0; i < z.pc6_children.size(); ++i) {
        if (i) kids.push_back(';');
        kids += z.pc6_children[i];
      }
      rows.push_back({z.zone_id, z.pc4, csv::format_double(z.centroid.x),
                      csv::format_double(z.centroid.y), kids});
    }
    csv::write_file(dir / "zones.csv", {"zone_id", "pc4", "x_m", "y_m", "pc6_children"}, rows);
  }
  {
    std::vector<std::vector<std::string>> rows;
    for (const auto& [key, minutes] : ds.travel_times.entries()) {
      rows.push_back({key.first, key.second, csv::format_double(minutes)});
    }
    csv::write_file(dir / "travel_times.csv", {"from_zone", "to_zone", "minutes"}, rows);
  }
}

}  // namespace tourkit
