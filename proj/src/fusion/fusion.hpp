#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "core/model.hpp"

namespace tourkit::fusion {

enum class MakeUse { make, use };
enum class FlowDirection { in, out };

using ActivityDistribution = std::array<double, kActivityCount>;

// Firm counts per (pc6 zone, activity) and make/use probabilities per
// (activity, commodity, direction).
struct FirmCensus {
  std::map<std::pair<std::string, ActivityType>, long long> counts;
  std::map<std::tuple<ActivityType, std::string, MakeUse>, double> make_use;

  long long count(const std::string& zone, ActivityType a) const;
  double probability(ActivityType a, const std::string& commodity, MakeUse dir) const;
};

// Shipment counts per (commodity, pc6 zone, direction).
struct ShipmentFlowCounts {
  std::map<std::tuple<std::string, std::string, FlowDirection>, long long> counts;

  long long count(const std::string& commodity, const std::string& pc6, FlowDirection dir) const;
  // Sum over all commodities; used when the commodity is unknown.
  long long total(const std::string& pc6, FlowDirection dir) const;
};

// Probability of each activity type at `zone` for a shipment of `commodity`.
// Without a commodity the distribution is proportional to firm counts.
ActivityDistribution activity_probability(const std::string& zone,
                                          const std::optional<std::string>& commodity,
                                          MakeUse direction, const FirmCensus& census);

// Distribution over the pc6 children of a pc4 zone, proportional to flows.
std::vector<double> pc6_weights(const Zone& pc4_zone, const std::optional<std::string>& commodity,
                                FlowDirection direction, const ShipmentFlowCounts& flows);

struct ImputationLogEntry {
  std::string tour_id;
  std::size_t stop_index = 0;
  std::string pc6_zone;  // the pc6 the stop was assigned to
  std::optional<std::string> commodity;
  ActivityDistribution probabilities{};
  ActivityType assigned = ActivityType::unknown;
};

struct ImputationResult {
  Dataset dataset;
  std::vector<ImputationLogEntry> log;
};

// Draws one index from a discrete distribution with a uniform variate u in [0,1).
std::size_t sample_index(const std::vector<double>& weights, double u);

// The commodity handled at a stop: first shipment of the tour loaded (pickup)
// or unloaded (delivery) in the stop's zone.
std::optional<std::string> stop_commodity(const Dataset& dataset, const TourRecord& tour,
                                          const StopRecord& stop);

// Random stream for one stop; independent of processing order.
std::uint64_t stop_seed(std::uint64_t seed, const std::string& tour_id, std::size_t stop_index);

ImputationResult impute_activities(const Dataset& dataset, const FirmCensus& census,
                                   const ShipmentFlowCounts& flows, std::uint64_t seed);

FirmCensus load_census(const std::filesystem::path& firms_csv,
                       const std::filesystem::path& make_use_csv);
ShipmentFlowCounts load_flows(const std::filesystem::path& flows_csv);
void save_census(const FirmCensus& census, const std::filesystem::path& firms_csv,
                 const std::filesystem::path& make_use_csv);
void save_flows(const ShipmentFlowCounts& flows, const std::filesystem::path& flows_csv);
void write_imputation_log(const std::vector<ImputationLogEntry>& log,
                          const std::filesystem::path& path);

}  // namespace tourkit::fusion
