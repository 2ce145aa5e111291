#include "fusion/fusion.hpp"

#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "core/csv.hpp"
#include "core/error.hpp"
#include "core/rng.hpp"

namespace tourkit::fusion {

namespace {

std::optional<MakeUse> parse_make_use(const std::string& text) {
  if (text == "make") return MakeUse::make;
  if (text == "use") return MakeUse::use;
  return std::nullopt;
}

std::optional<FlowDirection> parse_flow_direction(const std::string& text) {
  if (text == "in") return FlowDirection::in;
  if (text == "out") return FlowDirection::out;
  return std::nullopt;
}

}  // namespace

long long FirmCensus::count(const std::string& zone, ActivityType a) const {
  const auto it = counts.find({zone, a});
  return it == counts.end() ? 0 : it->second;
}

double FirmCensus::probability(ActivityType a, const std::string& commodity, MakeUse dir) const {
  const auto it = make_use.find({a, commodity, dir});
  return it == make_use.end() ? 0.0 : it->second;
}

long long ShipmentFlowCounts::count(const std::string& commodity, const std::string& pc6,
                                    FlowDirection dir) const {
  const auto it = counts.find({commodity, pc6, dir});
  return it == counts.end() ? 0 : it->second;
}

long long ShipmentFlowCounts::total(const std::string& pc6, FlowDirection dir) const {
  long long sum = 0;
  for (const auto& [key, n] : counts) {
    if (std::get<1>(key) == pc6 && std::get<2>(key) == dir) sum += n;
  }
  return sum;
}

ActivityDistribution activity_probability(const std::string& zone,
                                          const std::optional<std::string>& commodity,
                                          MakeUse direction, const FirmCensus& census) {
  ActivityDistribution weights{};
  long long firms = 0;
  for (std::size_t i = 0; i < kActivityCount; ++i) {
    const long long n = census.count(zone, kActivities[i]);
    firms += n;
    const double p = commodity ? census.probability(kActivities[i], *commodity, direction) : 1.0;
    weights[i] = static_cast<double>(n) * p;
  }
  if (firms == 0) {
    fail(ErrorCode::domain, "no firms recorded in zone '" + zone + "'");
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) {
    fail(ErrorCode::domain, "no firm in zone '" + zone + "' has a positive " +
                                (direction == MakeUse::make ? "make" : "use") +
                                " probability for commodity '" + commodity.value_or("") + "'");
  }
  for (auto& w : weights) w /= total;
  return weights;
}

std::vector<double> pc6_weights(const Zone& pc4_zone, const std::optional<std::string>& commodity,
                                FlowDirection direction, const ShipmentFlowCounts& flows) {
  const auto& kids = pc4_zone.pc6_children;
  if (kids.empty()) {
    fail(ErrorCode::domain, "zone '" + pc4_zone.zone_id + "' has no pc6 children");
  }
  std::vector<double> w(kids.size());
  double total = 0.0;
  for (std::size_t i = 0; i < kids.size(); ++i) {
    const long long m =
        commodity ? flows.count(*commodity, kids[i], direction) : flows.total(kids[i], direction);
    w[i] = static_cast<double>(m);
    total += w[i];
  }
  if (total <= 0.0) {
    std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(kids.size()));
    return w;
  }
  for (auto& x : w) x /= total;
  return w;
}

std::size_t sample_index(const std::vector<double>& weights, double u) {
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    last_positive = i;
    if (u < acc) return i;
  }
  // Rounding left u above the accumulated sum.
  return last_positive;
}

std::optional<std::string> stop_commodity(const Dataset& dataset, const TourRecord& tour,
                                          const StopRecord& stop) {
  for (const auto* s : dataset.shipments_of(tour)) {
    const auto& zone = stop.kind == StopKind::pickup ? s->load_zone : s->unload_zone;
    if (zone == stop.zone_id) return s->commodity_code;
  }
  return std::nullopt;
}

std::uint64_t stop_seed(std::uint64_t seed, const std::string& tour_id, std::size_t stop_index) {
  return derive_seed(derive_seed(seed, tour_id), "stop", stop_index);
}

ImputationResult impute_activities(const Dataset& dataset, const FirmCensus& census,
                                   const ShipmentFlowCounts& flows, std::uint64_t seed) {
  ImputationResult result{dataset, {}};
  auto& out = result.dataset;
  for (auto& tour : out.tours) {
    for (std::size_t k = 0; k < tour.stops.size(); ++k) {
      auto& stop = tour.stops[k];
      const auto commodity = stop_commodity(out, tour, stop);
      const auto make_use = stop.kind == StopKind::pickup ? MakeUse::make : MakeUse::use;
      const auto flow_dir = stop.kind == StopKind::pickup ? FlowDirection::out : FlowDirection::in;
      Rng rng(stop_seed(seed, tour.tour_id, k));
      try {
        std::string pc6 = stop.postcode;
        if (stop.resolution == Resolution::pc4) {
          const Zone* zone = out.find_zone(stop.zone_id);
          if (!zone) fail(ErrorCode::validation, "unknown zone '" + stop.zone_id + "'");
          const auto weights = pc6_weights(*zone, commodity, flow_dir, flows);
          pc6 = zone->pc6_children[sample_index(weights, rng.uniform())];
        }
        const auto probs = activity_probability(pc6, commodity, make_use, census);
        const std::vector<double> pv(probs.begin(), probs.end());
        stop.activity_type = kActivities[sample_index(pv, rng.uniform())];
        stop.low_confidence = !commodity.has_value();
        result.log.push_back({tour.tour_id, k, pc6, commodity, probs, stop.activity_type});
      } catch (const Error& e) {
        fail(e.code(), "tour '" + tour.tour_id + "' stop " + std::to_string(k + 1) + ": " +
                           e.what());
      }
    }
  }
  return result;
}

FirmCensus load_census(const std::filesystem::path& firms_csv,
                       const std::filesystem::path& make_use_csv) {
  FirmCensus census;
  {
    const auto table = csv::read_file(firms_csv);
    table.require_columns({"zone_id", "activity_type", "count"});
    const auto c_zone = table.column("zone_id"), c_act = table.column("activity_type"),
               c_count = table.column("count");
    for (const auto& row : table.rows()) {
      const auto act = parse_activity_type(table.at(row, c_act));
      if (!act || *act == ActivityType::unknown) {
        fail(ErrorCode::validation, table.source() + ":" + std::to_string(row.line) +
                                        ": bad activity_type '" + table.at(row, c_act) + "'");
      }
      const auto n = csv::to_int(table, row, c_count);
      if (n < 0) {
        fail(ErrorCode::validation,
             table.source() + ":" + std::to_string(row.line) + ": negative firm count");
      }
      census.counts[{table.at(row, c_zone), *act}] += n;
    }
  }
  {
    const auto table = csv::read_file(make_use_csv);
    table.require_columns({"activity_type", "commodity_code", "direction", "probability"});
    const auto c_act = table.column("activity_type"), c_code = table.column("commodity_code"),
               c_dir = table.column("direction"), c_p = table.column("probability");
    for (const auto& row : table.rows()) {
      const auto act = parse_activity_type(table.at(row, c_act));
      const auto dir = parse_make_use(table.at(row, c_dir));
      const double p = csv::to_double(table, row, c_p);
      if (!act || *act == ActivityType::unknown || !dir || p < 0.0 || p > 1.0) {
        fail(ErrorCode::validation,
             table.source() + ":" + std::to_string(row.line) + ": invalid make/use row");
      }
      census.make_use[{*act, table.at(row, c_code), *dir}] = p;
    }
  }
  return census;
}

ShipmentFlowCounts load_flows(const std::filesystem::path& flows_csv) {
  ShipmentFlowCounts flows;
  const auto table = csv::read_file(flows_csv);
  table.require_columns({"commodity_code", "pc6_zone", "direction", "count"});
  const auto c_code = table.column("commodity_code"), c_zone = table.column("pc6_zone"),
             c_dir = table.column("direction"), c_count = table.column("count");
  for (const auto& row : table.rows()) {
    const auto dir = parse_flow_direction(table.at(row, c_dir));
    const auto n = csv::to_int(table, row, c_count);
    if (!dir || n < 0) {
      fail(ErrorCode::validation,
           table.source() + ":" + std::to_string(row.line) + ": invalid flow row");
    }
    flows.counts[{table.at(row, c_code), table.at(row, c_zone), *dir}] += n;
  }
  return flows;
}

void save_census(const FirmCensus& census, const std::filesystem::path& firms_csv,
                 const std::filesystem::path& make_use_csv) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& [key, n] : census.counts) {
    rows.push_back({key.first, std::string(to_string(key.second)), std::to_string(n)});
  }
  csv::write_file(firms_csv, {"zone_id", "activity_type", "count"}, rows);
  rows.clear();
  for (const auto& [key, p] : census.make_use) {
    const auto& [act, code, dir] = key;
    rows.push_back({std::string(to_string(act)), code, dir == MakeUse::make ? "make" : "use",
                    csv::format_double(p)});
  }
  csv::write_file(make_use_csv, {"activity_type", "commodity_code", "direction", "probability"},
                  rows);
}

void save_flows(const ShipmentFlowCounts& flows, const std::filesystem::path& flows_csv) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& [key, n] : flows.counts) {
    const auto& [code, zone, dir] = key;
    rows.push_back({code, zone, dir == FlowDirection::in ? "in" : "out", std::to_string(n)});
  }
  csv::write_file(flows_csv, {"commodity_code", "pc6_zone", "direction", "count"}, rows);
}

void write_imputation_log(const std::vector<ImputationLogEntry>& log,
                          const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::io, "cannot write '" + path.string() + "'");
  for (const auto& e : log) {
    nlohmann::ordered_json j;
    j["tour_id"] = e.tour_id;
    j["stop"] = e.stop_index + 1;
    j["pc6_zone"] = e.pc6_zone;
    j["commodity"] = e.commodity ? nlohmann::ordered_json(*e.commodity) : nullptr;
    nlohmann::ordered_json probs;
    for (std::size_t i = 0; i < kActivityCount; ++i) {
      probs[std::string(to_string(kActivities[i]))] = e.probabilities[i];
    }
    j["probabilities"] = probs;
    j["assigned"] = std::string(to_string(e.assigned));
    j["low_confidence"] = !e.commodity.has_value();
    out << j.dump() << '\n';
  }
}

}  // namespace tourkit::fusion
