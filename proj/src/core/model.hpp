#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace tourkit {

enum class VehicleType { truck = 0, trailer = 1 };
enum class StopKind { pickup, delivery };
enum class Resolution { pc4, pc6 };
// Producer and consumer share one category.
enum class ActivityType { dc = 0, tt = 1, producer_consumer = 2, unknown = 3 };

inline constexpr std::size_t kActivityCount = 3;  // excludes unknown
inline constexpr std::array<ActivityType, kActivityCount> kActivities = {
    ActivityType::dc, ActivityType::tt, ActivityType::producer_consumer};

std::string_view to_string(VehicleType v);
std::string_view to_string(StopKind k);
std::string_view to_string(Resolution r);
std::string_view to_string(ActivityType a);

std::optional<VehicleType> parse_vehicle_type(std::string_view text);
std::optional<StopKind> parse_stop_kind(std::string_view text);
std::optional<ActivityType> parse_activity_type(std::string_view text);

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

double distance(const Point& a, const Point& b);

struct StopRecord {
  std::string zone_id;
  std::string postcode;
  StopKind kind = StopKind::pickup;
  Resolution resolution = Resolution::pc6;
  ActivityType activity_type = ActivityType::unknown;
  // Set by imputation when no commodity code was available for the stop.
  bool low_confidence = false;

  friend bool operator==(const StopRecord&, const StopRecord&) = default;
};

struct TourRecord {
  std::string tour_id;
  std::string carrier_id;
  VehicleType vehicle_type = VehicleType::truck;
  int day_of_week = 0;
  int departure_minute = 0;
  std::vector<StopRecord> stops;  // stops[0] is the departure location
  std::vector<std::string> shipment_ids;

  friend bool operator==(const TourRecord&, const TourRecord&) = default;
};

struct ShipmentRecord {
  std::string shipment_id;
  std::string tour_id;
  std::optional<std::string> commodity_code;
  double weight_kg = 0.0;
  std::string load_zone;
  std::string unload_zone;
  bool empty_flag = false;

  friend bool operator==(const ShipmentRecord&, const ShipmentRecord&) = default;
};

struct Zone {
  std::string zone_id;
  std::string pc4;
  Point centroid;
  std::vector<std::string> pc6_children;

  friend bool operator==(const Zone&, const Zone&) = default;
};

// Zone-to-zone travel times in minutes.
class TravelTimes {
 public:
  void set(const std::string& from, const std::string& to, double minutes);
  // Diagonal entries default to 0 when not stored.
  std::optional<double> get(const std::string& from, const std::string& to) const;
  std::size_t size() const { return minutes_.size(); }
  const std::map<std::pair<std::string, std::string>, double>& entries() const {
    return minutes_;
  }

  friend bool operator==(const TravelTimes&, const TravelTimes&) = default;

 private:
  std::map<std::pair<std::string, std::string>, double> minutes_;
};

struct Dataset {
  std::vector<TourRecord> tours;
  std::vector<ShipmentRecord> shipments;
  std::vector<Zone> zones;
  TravelTimes travel_times;
  std::vector<std::string> warnings;

  const Zone* find_zone(std::string_view zone_id) const;
  const TourRecord* find_tour(std::string_view tour_id) const;
  // Shipments belonging to a tour, in shipment_ids order.
  std::vector<const ShipmentRecord*> shipments_of(const TourRecord& tour) const;

  // Rebuilds lookup indices after the vectors were edited.
  void reindex();

  friend bool operator==(const Dataset& a, const Dataset& b) {
    return a.tours == b.tours && a.shipments == b.shipments && a.zones == b.zones &&
           a.travel_times == b.travel_times;
  }

 private:
  std::unordered_map<std::string, std::size_t> zone_index_;
  std::unordered_map<std::string, std::size_t> tour_index_;
  std::unordered_map<std::string, std::size_t> shipment_index_;
};

struct DatasetPaths {
  std::filesystem::path tours;
  std::filesystem::path stops;
  std::filesystem::path shipments;
  std::filesystem::path zones;
  std::filesystem::path travel_times;
  // Optional list of known NST-2007 codes; unknown codes become warnings.
  std::optional<std::filesystem::path> commodity_codes;

  static DatasetPaths in_directory(const std::filesystem::path& dir);
};

// Validates every row and cross-reference; errors name file and line.
Dataset load_dataset(const DatasetPaths& paths);
void save_dataset(const Dataset& dataset, const std::filesystem::path& dir);
void write_stops_csv(const Dataset& dataset, const std::filesystem::path& path);

// Checks invariants of an in-memory dataset (used after generation).
void validate_dataset(const Dataset& dataset);

}  // namespace tourkit
