#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "core/model.hpp"

namespace tourkit::congestion {

// Delay threshold above which a zone counts as congested: 10 s/km.
inline constexpr double kCongestionThresholdMinPerKm = 10.0 / 60.0;
inline constexpr double kDefaultRadiusM = 6423.0;

struct SpeedSeries {
  std::string segment_id;
  std::string zone_id;
  double length_m = 0.0;
  int step_minutes = 1;
  int start_minute = 0;  // minute of day of sample 0
  std::vector<double> speeds_kmh;

  int minute_of(std::size_t step) const { return start_minute + static_cast<int>(step) * step_minutes; }
};

// A union of half-open minute-of-day intervals.
struct Period {
  std::string name;
  std::vector<std::pair<int, int>> windows;

  bool contains(int minute_of_day) const;
};

// morning [373,638), midday [638,893), afternoon [893,1172), rest otherwise.
std::vector<Period> default_periods();
// Period containing the minute (taken modulo one day); periods must cover the day.
const Period& period_of(const std::vector<Period>& periods, int minute);

struct ZonePeriodLevel {
  std::optional<double> level;  // CL in min/km; empty when the zone has no segments
  bool indicator = false;       // CI: level > threshold
  bool congested = false;       // indicator after proximity expansion
};

class CongestionMap {
 public:
  void set(const std::string& zone, const std::string& period, ZonePeriodLevel value);
  const ZonePeriodLevel* find(const std::string& zone, const std::string& period) const;
  // Expanded status; unknown zones are not congested.
  bool congested(const std::string& zone, const std::string& period) const;
  const std::map<std::pair<std::string, std::string>, ZonePeriodLevel>& entries() const {
    return cells_;
  }
  std::map<std::pair<std::string, std::string>, ZonePeriodLevel>& entries() { return cells_; }

 private:
  std::map<std::pair<std::string, std::string>, ZonePeriodLevel> cells_;
};

struct ProximityConfig {
  int jenks_classes = 5;
  double congested_radius_m = kDefaultRadiusM;
};

// Forward moving average over [j, j+window) truncated at the end of the series.
SpeedSeries smooth_speeds(const SpeedSeries& series, int window);

// Delay in min/km for one segment: 60 * (1/v_min - 1/v_free), clamped at 0.
// v_min is taken inside the period, v_free over the whole series.
double segment_delay(const SpeedSeries& smoothed, const Period& period);

struct SegmentDelay {
  double length_m = 0.0;
  double delay = 0.0;
};

// Length-weighted mean delay; throws on an empty list.
double zone_congestion_level(const std::vector<SegmentDelay>& segments);

bool congestion_indicator(double level);

// Exact Fisher-Jenks optimum. Returns k-1 ascending breaks; each break is the
// largest value of the lower class.
std::vector<double> jenks_breaks(std::vector<double> values, int classes);

// Adds every zone whose centroid lies strictly closer than radius_m to the
// centroid of a congested zone.
std::set<std::string> expand_by_proximity(const std::vector<Zone>& zones,
                                          const std::set<std::string>& congested,
                                          double radius_m);

// Distance from each non-congested zone to the nearest congested centroid.
std::vector<double> proximity_distances(const std::vector<Zone>& zones,
                                        const std::set<std::string>& congested);

struct CongestionResult {
  CongestionMap map;
  // Per period: Jenks breaks over proximity distances, or a reason why none.
  std::map<std::string, std::vector<double>> breaks;
  std::map<std::string, std::string> break_notes;
  std::vector<std::string> no_data_zones;
};

CongestionResult compute_congestion(const std::vector<SpeedSeries>& series,
                                    const std::vector<Zone>& zones,
                                    const std::vector<Period>& periods, int window,
                                    const ProximityConfig& proximity);

// Wide form: segment_id, zone_id, length_m, step_minutes, t0, v0, v1, ...
// Long form: segment_id, zone_id, length_m, step_minutes, t0, step, speed
std::vector<SpeedSeries> load_speeds(const std::filesystem::path& path);
void save_speeds_long(const std::vector<SpeedSeries>& series, const std::filesystem::path& path);

void write_congestion_csv(const CongestionMap& map, const std::filesystem::path& path);
CongestionMap load_congestion_csv(const std::filesystem::path& path);
void write_breaks_json(const CongestionResult& result, const ProximityConfig& config,
                       const std::filesystem::path& path);

}  // namespace tourkit::congestion
