#include "congestion/congestion.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>

#include <json.hpp>

#include "core/csv.hpp"
#include "core/error.hpp"

namespace tourkit::congestion {

bool Period::contains(int minute_of_day) const {
  for (const auto& [begin, end] : windows) {
    if (minute_of_day >= begin && minute_of_day < end) return true;
  }
  return false;
}

std::vector<Period> default_periods() {
  return {
      {"morning", {{373, 638}}},
      {"midday", {{638, 893}}},
      {"afternoon", {{893, 1172}}},
      {"rest", {{0, 373}, {1172, 1440}}},
  };
}

const Period& period_of(const std::vector<Period>& periods, int minute) {
  const int m = ((minute % 1440) + 1440) % 1440;
  for (const auto& p : periods) {
    if (p.contains(m)) return p;
  }
  fail(ErrorCode::config, "no period covers minute " + std::to_string(m));
}

void CongestionMap::set(const std::string& zone, const std::string& period,
                        ZonePeriodLevel value) {
  cells_[{zone, period}] = value;
}

const ZonePeriodLevel* CongestionMap::find(const std::string& zone,
                                           const std::string& period) const {
  const auto it = cells_.find({zone, period});
  return it == cells_.end() ? nullptr : &it->second;
}

bool CongestionMap::congested(const std::string& zone, const std::string& period) const {
  const auto* cell = find(zone, period);
  return cell && cell->congested;
}

SpeedSeries smooth_speeds(const SpeedSeries& series, int window) {
  if (window < 1) fail(ErrorCode::invalid_argument, "smoothing window must be >= 1");
  if (series.speeds_kmh.empty()) {
    fail(ErrorCode::domain, "segment '" + series.segment_id + "' has an empty speed series");
  }
  SpeedSeries out = series;
  const auto& v = series.speeds_kmh;
  const std::size_t n = v.size();
  const auto w = static_cast<std::size_t>(window);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t end = std::min(n, i + w);
    double sum = 0.0;
    for (std::size_t j = i; j < end; ++j) sum += v[j];
    out.speeds_kmh[i] = sum / static_cast<double>(end - i);
  }
  return out;
}

double segment_delay(const SpeedSeries& smoothed, const Period& period) {
  if (smoothed.speeds_kmh.empty()) {
    fail(ErrorCode::domain, "segment '" + smoothed.segment_id + "' has an empty speed series");
  }
  const double v_free =
      *std::max_element(smoothed.speeds_kmh.begin(), smoothed.speeds_kmh.end());
  double v_min = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < smoothed.speeds_kmh.size(); ++j) {
    const int m = ((smoothed.minute_of(j) % 1440) + 1440) % 1440;
    if (period.contains(m)) v_min = std::min(v_min, smoothed.speeds_kmh[j]);
  }
  if (!std::isfinite(v_min)) {
    fail(ErrorCode::domain, "segment '" + smoothed.segment_id + "' has no samples in period '" +
                                period.name + "'");
  }
  return std::max(0.0, 60.0 * (1.0 / v_min - 1.0 / v_free));
}

double zone_congestion_level(const std::vector<SegmentDelay>& segments) {
  if (segments.empty()) fail(ErrorCode::domain, "zone has no road segments");
  double weighted = 0.0, length = 0.0;
  for (const auto& s : segments) {
    weighted += s.length_m * s.delay;
    length += s.length_m;
  }
  if (!(length > 0.0)) fail(ErrorCode::domain, "zone segments have zero total length");
  return weighted / length;
}

bool congestion_indicator(double level) { return level > kCongestionThresholdMinPerKm; }

std::vector<double> jenks_breaks(std::vector<double> values, int classes) {
  if (classes < 1) fail(ErrorCode::invalid_argument, "jenks: class count must be >= 1");
  if (values.empty()) fail(ErrorCode::domain, "jenks: no values");
  std::sort(values.begin(), values.end());
  std::size_t n_distinct = 1;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] != values[i - 1]) ++n_distinct;
  }
  const auto k = static_cast<std::size_t>(classes);
  if (k == 1) return {};
  if (n_distinct < k) {
    fail(ErrorCode::domain, "jenks: " + std::to_string(n_distinct) +
                                " distinct values cannot form " + std::to_string(k) + " classes");
  }

  const std::size_t n = values.size();
  std::vector<double> s1(n + 1, 0.0), s2(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    s1[i + 1] = s1[i] + values[i];
    s2[i + 1] = s2[i] + values[i] * values[i];
  }
  // Sum of squared deviations of values[i..j] inclusive.
  auto ssd = [&](std::size_t i, std::size_t j) {
    const double m = static_cast<double>(j - i + 1);
    const double s = s1[j + 1] - s1[i];
    return std::max(0.0, (s2[j + 1] - s2[i]) - s * s / m);
  };

  constexpr double inf = std::numeric_limits<double>::infinity();
  // cost[c][j]: best cost of splitting values[0..j] into c+1 classes.
  std::vector<std::vector<double>> cost(k, std::vector<double>(n, inf));
  std::vector<std::vector<std::size_t>> start(k, std::vector<std::size_t>(n, 0));
  for (std::size_t j = 0; j < n; ++j) cost[0][j] = ssd(0, j);
  for (std::size_t c = 1; c < k; ++c) {
    for (std::size_t j = c; j < n; ++j) {
      for (std::size_t i = c; i <= j; ++i) {
        const double v = cost[c - 1][i - 1] + ssd(i, j);
        if (v < cost[c][j]) {
          cost[c][j] = v;
          start[c][j] = i;
        }
      }
    }
  }
  std::vector<double> breaks(k - 1);
  std::size_t j = n - 1;
  for (std::size_t c = k - 1; c >= 1; --c) {
    const std::size_t i = start[c][j];
    breaks[c - 1] = values[i - 1];
    j = i - 1;
  }
  return breaks;
}

std::set<std::string> expand_by_proximity(const std::vector<Zone>& zones,
                                          const std::set<std::string>& congested,
                                          double radius_m) {
  std::set<std::string> out = congested;
  std::vector<const Zone*> centers;
  for (const auto& z : zones) {
    if (congested.count(z.zone_id)) centers.push_back(&z);
  }
  for (const auto& z : zones) {
    if (out.count(z.zone_id)) continue;
    for (const Zone* c : centers) {
      if (distance(z.centroid, c->centroid) < radius_m) {
        out.insert(z.zone_id);
        break;
      }
    }
  }
  return out;
}

std::vector<double> proximity_distances(const std::vector<Zone>& zones,
                                        const std::set<std::string>& congested) {
  std::vector<double> out;
  std::vector<const Zone*> centers;
  for (const auto& z : zones) {
    if (congested.count(z.zone_id)) centers.push_back(&z);
  }
  if (centers.empty()) return out;
  for (const auto& z : zones) {
    if (congested.count(z.zone_id)) continue;
    double best = std::numeric_limits<double>::infinity();
    for (const Zone* c : centers) best = std::min(best, distance(z.centroid, c->centroid));
    out.push_back(best);
  }
  return out;
}

CongestionResult compute_congestion(const std::vector<SpeedSeries>& series,
                                    const std::vector<Zone>& zones,
                                    const std::vector<Period>& periods, int window,
                                    const ProximityConfig& proximity) {
  if (proximity.congested_radius_m < 0) {
    fail(ErrorCode::invalid_argument, "proximity radius must be non-negative");
  }
  CongestionResult result;
  std::map<std::string, std::vector<SpeedSeries>> by_zone;
  for (const auto& s : series) by_zone[s.zone_id].push_back(smooth_speeds(s, window));

  for (const auto& period : periods) {
    std::set<std::string> raw;
    for (const auto& zone : zones) {
      ZonePeriodLevel cell;
      const auto it = by_zone.find(zone.zone_id);
      if (it != by_zone.end()) {
        std::vector<SegmentDelay> delays;
        for (const auto& s : it->second) delays.push_back({s.length_m, segment_delay(s, period)});
        cell.level = zone_congestion_level(delays);
        cell.indicator = congestion_indicator(*cell.level);
        if (cell.indicator) raw.insert(zone.zone_id);
      }
      result.map.set(zone.zone_id, period.name, cell);
    }
    const auto expanded = expand_by_proximity(zones, raw, proximity.congested_radius_m);
    for (const auto& z : expanded) result.map.entries()[{z, period.name}].congested = true;

    const auto distances = proximity_distances(zones, raw);
    if (distances.empty()) {
      result.break_notes[period.name] = "no congested zones";
      continue;
    }
    try {
      result.breaks[period.name] = jenks_breaks(distances, proximity.jenks_classes);
    } catch (const Error& e) {
      result.break_notes[period.name] = e.what();
    }
  }
  for (const auto& zone : zones) {
    if (!by_zone.count(zone.zone_id)) result.no_data_zones.push_back(zone.zone_id);
  }
  return result;
}

std::vector<SpeedSeries> load_speeds(const std::filesystem::path& path) {
  const auto table = csv::read_file(path);
  const auto c_seg = table.column("segment_id"), c_zone = table.column("zone_id"),
             c_len = table.column("length_m"), c_step = table.column("step_minutes"),
             c_t0 = table.column("t0");
  std::vector<SpeedSeries> out;
  std::map<std::string, std::size_t> index;

  auto header_for = [&](const csv::Row& row) -> SpeedSeries& {
    const auto& id = table.at(row, c_seg);
    auto [it, inserted] = index.emplace(id, out.size());
    if (inserted) {
      SpeedSeries s;
      s.segment_id = id;
      s.zone_id = table.at(row, c_zone);
      s.length_m = csv::to_double(table, row, c_len);
      s.step_minutes = static_cast<int>(csv::to_int(table, row, c_step));
      s.start_minute = static_cast<int>(csv::to_int(table, row, c_t0));
      if (!(s.length_m > 0) || s.step_minutes <= 0) {
        fail(ErrorCode::validation, table.source() + ":" + std::to_string(row.line) +
                                        ": length_m and step_minutes must be positive");
      }
      out.push_back(std::move(s));
    }
    return out[it->second];
  };
  auto check_speed = [&](const csv::Row& row, double v) {
    if (!(v > 0)) {
      fail(ErrorCode::validation,
           table.source() + ":" + std::to_string(row.line) + ": speeds must be positive");
    }
  };

  if (const auto c_speed = table.find_column("speed")) {
    table.require_columns({"segment_id", "zone_id", "length_m", "step_minutes", "t0", "step",
                           "speed"});
    const auto c_idx = table.column("step");
    std::map<std::string, std::vector<std::pair<long long, double>>> samples;
    for (const auto& row : table.rows()) {
      header_for(row);
      const double v = csv::to_double(table, row, *c_speed);
      check_speed(row, v);
      samples[table.at(row, c_seg)].emplace_back(csv::to_int(table, row, c_idx), v);
    }
    for (auto& s : out) {
      auto& list = samples[s.segment_id];
      std::sort(list.begin(), list.end());
      for (std::size_t i = 0; i < list.size(); ++i) {
        if (list[i].first != static_cast<long long>(i)) {
          fail(ErrorCode::validation, table.source() + ": segment '" + s.segment_id +
                                          "' steps must be 0..n-1 without gaps");
        }
        s.speeds_kmh.push_back(list[i].second);
      }
    }
  } else {
    std::vector<std::size_t> value_cols;
    for (std::size_t i = 0;; ++i) {
      const auto c = table.find_column("v" + std::to_string(i));
      if (!c) break;
      value_cols.push_back(*c);
    }
    if (value_cols.empty()) {
      fail(ErrorCode::parse, table.source() + ": expected 'speed' column or v0, v1, ... columns");
    }
    for (const auto& row : table.rows()) {
      auto& s = header_for(row);
      for (const auto c : value_cols) {
        if (table.at(row, c).empty()) break;  // ragged tail
        const double v = csv::to_double(table, row, c);
        check_speed(row, v);
        s.speeds_kmh.push_back(v);
      }
    }
  }
  return out;
}

void save_speeds_long(const std::vector<SpeedSeries>& series, const std::filesystem::path& path) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& s : series) {
    for (std::size_t j = 0; j < s.speeds_kmh.size(); ++j) {
      rows.push_back({s.segment_id, s.zone_id, csv::format_double(s.length_m),
                      std::to_string(s.step_minutes), std::to_string(s.start_minute),
                      std::to_string(j), csv::format_double(s.speeds_kmh[j])});
    }
  }
  csv::write_file(path,
                  {"segment_id", "zone_id", "length_m", "step_minutes", "t0", "step", "speed"},
                  rows);
}

void write_congestion_csv(const CongestionMap& map, const std::filesystem::path& path) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& [key, cell] : map.entries()) {
    rows.push_back({key.first, key.second, cell.level ? csv::format_double(*cell.level) : "",
                    cell.level ? (cell.indicator ? "1" : "0") : "",
                    cell.congested ? "1" : "0", cell.level ? "ok" : "no-data"});
  }
  csv::write_file(path, {"zone_id", "period", "CL", "CI", "congested", "status"}, rows);
}

CongestionMap load_congestion_csv(const std::filesystem::path& path) {
  const auto table = csv::read_file(path);
  table.require_columns({"zone_id", "period", "CL", "CI"}, {"congested", "status"});
  const auto c_zone = table.column("zone_id"), c_period = table.column("period"),
             c_cl = table.column("CL"), c_ci = table.column("CI");
  const auto c_cong = table.find_column("congested");
  CongestionMap map;
  for (const auto& row : table.rows()) {
    ZonePeriodLevel cell;
    if (!table.at(row, c_cl).empty()) {
      cell.level = csv::to_double(table, row, c_cl);
      cell.indicator = csv::to_int(table, row, c_ci) != 0;
    }
    cell.congested = c_cong ? csv::to_int(table, row, *c_cong) != 0 : cell.indicator;
    map.set(table.at(row, c_zone), table.at(row, c_period), cell);
  }
  return map;
}

void write_breaks_json(const CongestionResult& result, const ProximityConfig& config,
                       const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["jenks_classes"] = config.jenks_classes;
  j["congested_radius_m"] = config.congested_radius_m;
  nlohmann::ordered_json periods = nlohmann::ordered_json::object();
  for (const auto& [name, breaks] : result.breaks) periods[name]["breaks_m"] = breaks;
  for (const auto& [name, note] : result.break_notes) {
    periods[name]["breaks_m"] = nullptr;
    periods[name]["note"] = note;
  }
  j["periods"] = periods;
  j["no_data_zones"] = result.no_data_zones;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::io, "cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

}  // namespace tourkit::congestion
