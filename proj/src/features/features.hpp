#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "congestion/congestion.hpp"
#include "core/model.hpp"
#include "mtdt/dataset.hpp"

namespace tourkit::features {

// (w_max - w) / w_max; 0 for the heaviest load, approaching 1 for light ones.
double weight_factor(double w, double w_max);

double median_objective(std::span<const Point> points, const Point& c);

// Weiszfeld iteration with the Vardi-Zhang correction at input points.
// `trace` receives the objective after every iterate, starting point first.
Point geometric_median(std::span<const Point> points, double tol,
                       std::vector<double>* trace = nullptr);

// Depot to geometric median of the customers, in km (coordinates in meters).
double average_tour_length(const Point& depot, std::span<const Point> customers,
                           double tol = 1e-3);

// Departure classes from four ascending cut minutes; the first and the last
// interval are both night.
struct DepartureBins {
  std::array<int, 4> edges{373, 638, 893, 1172};

  std::string classify(int minute) const;
};

inline const std::vector<std::string>& departure_classes() {
  static const std::vector<std::string> names{"morning", "midday", "afternoon", "night"};
  return names;
}

std::string discretize_departure(int minute);

// Equal-frequency cut points at the 20/40/60/80 % quantiles of the minutes.
DepartureBins rebin_departure(std::vector<int> minutes);

enum class TourType { direct, collection, distribution };

std::string_view to_string(TourType t);
std::optional<TourType> parse_tour_type(std::string_view text);

inline const std::vector<std::string>& tour_type_names() {
  static const std::vector<std::string> names{"direct", "collection", "distribution"};
  return names;
}

struct TourTypeResult {
  TourType type = TourType::direct;
  bool mixed = false;  // decided by the majority rule
};

TourTypeResult classify_tour_type(std::span<const StopRecord> stops);

struct ArrivalFlags {
  bool first_stop_congested = false;
  bool later_stop_congested = false;
  std::vector<int> arrival_minutes;  // per stop, stops[0] at departure
};

ArrivalFlags arrival_congestion_flags(const TourRecord& tour,
                                      const congestion::CongestionMap& cmap,
                                      const TravelTimes& travel_times,
                                      const std::vector<congestion::Period>& periods);

struct FeatureConfig {
  std::vector<double> tour_length_breaks_km{22, 44, 64, 95, 107};
  std::vector<double> n_commodities_breaks{2, 7};
  std::vector<double> weight_factor_breaks{0.25, 0.5, 0.75};
  DepartureBins departure;
  bool rebin_departure = false;
  double median_tol_m = 1e-3;
  double test_fraction = 0.2;
  std::uint64_t seed = 0;
  std::vector<congestion::Period> periods = congestion::default_periods();
};

struct FeatureRow {
  std::string tour_id;
  std::string carrier_id;
  std::string market;  // heaviest commodity of the tour
  bool test = false;

  int day_of_week = 0;
  int visit_dc = 0;
  int visit_tt = 0;
  int first_stop_congested = 0;
  int later_stop_congested = 0;
  double initial_load_kg = 0.0;
  double weight_factor = 0.0;
  int n_commodities = 1;
  int empty_flag = 0;
  int vehicle_type = 0;
  double avg_tour_length_km = 0.0;
  int departure_minute = 0;

  std::string departure_class;
  std::string tour_type;
  int tour_type_mixed = 0;
  int n_stops = 1;
};

struct Matrix {
  std::vector<FeatureRow> rows;
  FeatureConfig config;
  std::map<std::string, double> w_max;  // per market, training rows only
  std::vector<std::string> warnings;
  std::size_t excluded = 0;
};

Matrix build_matrix(const Dataset& dataset, const congestion::CongestionMap& cmap,
                    const FeatureConfig& config);

// Index of the bin holding value: bin i covers [breaks[i-1], breaks[i]).
std::size_t bin_index(double value, std::span<const double> breaks);
std::vector<std::string> bin_labels(std::span<const double> breaks, double lower);

inline const std::vector<std::string>& matrix_attribute_names() {
  static const std::vector<std::string> names{
      "day_of_week",   "visit_DC",     "visit_TT",        "first_stop_congested",
      "later_stop_congested", "weight_factor", "n_commodities", "empty_flag",
      "vehicle_type",  "avg_tour_length", "departure_class", "tour_type", "market"};
  return names;
}

struct EncodeOptions {
  std::string class_target = "tour_type";          // or departure_class
  std::optional<std::string> numeric_target = "n_stops";
  std::vector<std::string> attributes;             // empty: every non-target covariate but market
};

// Categorical training table; returns the rows of the requested split
// (train, test or all) in matrix order.
enum class SplitSelect { train, test, all };

mtdt::TrainingSet encode(const Matrix& matrix, const EncodeOptions& options, SplitSelect which);

void write_matrix_csv(const Matrix& matrix, const std::filesystem::path& path);
// Reads matrix.csv and feature_config.json from a directory.
Matrix load_matrix(const std::filesystem::path& dir);
void write_feature_config(const Matrix& matrix, const std::filesystem::path& path);

}  // namespace tourkit::features
