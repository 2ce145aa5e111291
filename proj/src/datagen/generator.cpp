#include "datagen/generator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

#include <json.hpp>

#include "core/csv.hpp"
#include "core/error.hpp"
#include "core/rng.hpp"

namespace tourkit::datagen {

namespace {

using json = nlohmann::ordered_json;

// Attributes the tour generator knows how to realize in raw data.
const std::set<std::string> kTourAttributes{"vehicle_type", "visit_DC", "visit_TT",
                                            "empty_flag",   "day_of_week", "departure_class"};

std::size_t draw(Rng& rng, const AttributeSpec& a) {
  if (a.probabilities.empty()) return rng.below(a.levels.size());
  double u = rng.uniform(), acc = 0.0;
  for (std::size_t i = 0; i < a.probabilities.size(); ++i) {
    acc += a.probabilities[i];
    if (u < acc) return i;
  }
  return a.probabilities.size() - 1;
}

double level_probability(const AttributeSpec& a, std::size_t level) {
  return a.probabilities.empty() ? 1.0 / static_cast<double>(a.levels.size())
                                 : a.probabilities[level];
}

json node_to_json(const GeneratorSpec& spec, int index) {
  const auto& n = spec.tree[static_cast<std::size_t>(index)];
  if (n.attribute.empty()) return {{"class", n.class_label}, {"mean", n.mean}};
  const auto& a = spec.attribute(n.attribute);
  json children = json::object();
  for (std::size_t l = 0; l < a.levels.size(); ++l) {
    children[a.levels[l]] = node_to_json(spec, n.children[l]);
  }
  return {{"attribute", n.attribute}, {"children", children}};
}

int node_from_json(const json& j, std::vector<PlantedNode>& nodes,
                   const std::vector<AttributeSpec>& attributes) {
  const int index = static_cast<int>(nodes.size());
  nodes.emplace_back();
  if (!j.contains("attribute")) {
    nodes.back().class_label = j.at("class").get<std::string>();
    nodes.back().mean = j.value("mean", 0.0);
    return index;
  }
  const auto name = j.at("attribute").get<std::string>();
  const auto it = std::find_if(attributes.begin(), attributes.end(),
                               [&](const AttributeSpec& a) { return a.name == name; });
  if (it == attributes.end()) {
    fail(ErrorCode::config, "planted tree uses undeclared attribute '" + name + "'");
  }
  nodes[static_cast<std::size_t>(index)].attribute = name;
  std::vector<int> children;
  for (const auto& level : it->levels) {
    if (!j.at("children").contains(level)) {
      fail(ErrorCode::config, "planted split on '" + name + "' misses level '" + level + "'");
    }
    children.push_back(node_from_json(j.at("children").at(level), nodes, attributes));
  }
  if (j.at("children").size() != it->levels.size()) {
    fail(ErrorCode::config, "planted split on '" + name + "' has unknown levels");
  }
  nodes[static_cast<std::size_t>(index)].children = std::move(children);
  return index;
}

}  // namespace

const AttributeSpec& GeneratorSpec::attribute(const std::string& name) const {
  for (const auto& a : attributes) {
    if (a.name == name) return a;
  }
  fail(ErrorCode::config, "undeclared attribute '" + name + "'");
}

void GeneratorSpec::validate() const {
  if (n_tours == 0) fail(ErrorCode::config, "n_tours must be positive");
  if (classes.empty()) fail(ErrorCode::config, "no classes declared");
  if (class_noise < 0.0 || class_noise >= 1.0) fail(ErrorCode::config, "class_noise must be in [0,1)");
  if (numeric_noise_variance < 0.0) fail(ErrorCode::config, "numeric_noise_variance must be >= 0");
  std::set<std::string> names;
  for (const auto& a : attributes) {
    if (!names.insert(a.name).second) fail(ErrorCode::config, "attribute '" + a.name + "' twice");
    if (a.levels.size() < 2) fail(ErrorCode::config, "attribute '" + a.name + "' needs 2 levels");
    if (!a.probabilities.empty()) {
      if (a.probabilities.size() != a.levels.size()) {
        fail(ErrorCode::config, "attribute '" + a.name + "': one probability per level");
      }
      double sum = 0.0;
      for (double p : a.probabilities) {
        if (p < 0.0) fail(ErrorCode::config, "attribute '" + a.name + "': negative probability");
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-9) {
        fail(ErrorCode::config, "attribute '" + a.name + "': probabilities must sum to 1");
      }
    }
  }
  if (tree.empty()) fail(ErrorCode::config, "planted tree is empty");
  // Every node reachable exactly once from the root, no attribute reused on a path.
  std::vector<int> seen(tree.size(), 0);
  std::vector<std::pair<int, std::set<std::string>>> stack{{0, {}}};
  while (!stack.empty()) {
    auto [i, used] = stack.back();
    stack.pop_back();
    if (i < 0 || static_cast<std::size_t>(i) >= tree.size() || seen[static_cast<std::size_t>(i)]++) {
      fail(ErrorCode::config, "planted tree is not a tree");
    }
    const auto& n = tree[static_cast<std::size_t>(i)];
    if (n.attribute.empty()) {
      if (std::find(classes.begin(), classes.end(), n.class_label) == classes.end()) {
        fail(ErrorCode::config, "planted leaf class '" + n.class_label + "' is not declared");
      }
      continue;
    }
    const auto& a = attribute(n.attribute);
    if (!used.insert(n.attribute).second) {
      fail(ErrorCode::config, "planted tree reuses '" + n.attribute + "' on a path");
    }
    if (n.children.size() != a.levels.size()) {
      fail(ErrorCode::config, "planted split on '" + n.attribute + "' needs one child per level");
    }
    for (int c : n.children) stack.push_back({c, used});
  }
  if (std::count(seen.begin(), seen.end(), 0) != 0) {
    fail(ErrorCode::config, "planted tree has unreachable nodes");
  }

  const std::set<std::string> codes(commodities.begin(), commodities.end());
  for (const auto& b : background_items) {
    if (!codes.count(b)) fail(ErrorCode::config, "background item '" + b + "' is not declared");
  }
  if (background_rate < 0.0 || background_rate > 1.0) {
    fail(ErrorCode::config, "background_rate must be in [0,1]");
  }
  std::set<std::string> consequents;
  for (const auto& r : rules) {
    if (!codes.count(r.antecedent) || !codes.count(r.consequent)) {
      fail(ErrorCode::config, "rule " + r.antecedent + "->" + r.consequent +
                                  " references an undeclared commodity");
    }
    if (r.antecedent == r.consequent) fail(ErrorCode::config, "rule with equal sides");
    if (std::find(background_items.begin(), background_items.end(), r.consequent) !=
            background_items.end() ||
        !consequents.insert(r.consequent).second) {
      fail(ErrorCode::config, "rule consequent '" + r.consequent +
                                  "' must only be produced by its one rule");
    }
    if (r.antecedent_probability < 0.0 || r.antecedent_probability > 1.0 || r.confidence < 0.0 ||
        r.confidence > 1.0) {
      fail(ErrorCode::config, "rule probabilities must be in [0,1]");
    }
  }
  for (const auto& r : rules) {
    if (consequents.count(r.antecedent)) {
      fail(ErrorCode::config, "rule antecedent '" + r.antecedent + "' is also a consequent");
    }
  }
  if (zones.grid < 2 || zones.spacing_m <= 0.0 || zones.pc6_per_zone < 1 ||
      zones.pc6_per_zone > 26 * 26 || zones.speed_kmh <= 0.0) {
    fail(ErrorCode::config, "invalid zone layout");
  }
  if (zones.dc_fraction < 0 || zones.tt_fraction < 0 || zones.dc_fraction + zones.tt_fraction >= 1 ||
      zones.congested_fraction < 0 || zones.congested_fraction > 1) {
    fail(ErrorCode::config, "invalid zone fractions");
  }
  if (speed.step_minutes < 1 || 1440 % speed.step_minutes != 0 || speed.free_flow_kmh <= 0 ||
      speed.dip_kmh <= 0 || speed.noise_kmh < 0 || speed.segments_per_zone < 1 ||
      speed.margin_minutes < 0) {
    fail(ErrorCode::config, "invalid speed template");
  }
}

GeneratorSpec default_spec() {
  GeneratorSpec s;
  s.attributes = {
      {"vehicle_type", {"0", "1"}, {0.5, 0.5}},
      {"visit_DC", {"0", "1"}, {0.5, 0.5}},
      {"empty_flag", {"0", "1"}, {0.5, 0.5}},
      {"visit_TT", {"0", "1"}, {0.8, 0.2}},
      {"day_of_week", {"0", "1", "2", "3", "4", "5", "6"}, {}},
  };
  s.tree = {
      {"vehicle_type", {1, 2}, "", 0.0},
      {"visit_DC", {3, 4}, "", 0.0},
      {"empty_flag", {5, 6}, "", 0.0},
      {"", {}, "distribution", 9.0},
      {"", {}, "collection", 5.0},
      {"", {}, "direct", 1.0},
      {"", {}, "collection", 3.0},
  };
  s.class_noise = 0.1;
  s.numeric_noise_variance = 1.0;
  s.commodities = {"01", "02", "03", "04", "05", "06", "07", "08", "09", "10"};
  s.background_items = {"05", "06", "07", "08", "09", "10"};
  s.rules = {{"01", "02", 0.3, 0.9}, {"03", "04", 0.25, 0.85}};
  return s;
}

std::string spec_to_json(const GeneratorSpec& s) {
  json j;
  j["seed"] = s.seed;
  j["n_tours"] = s.n_tours;
  j["classes"] = s.classes;
  json attrs = json::array();
  for (const auto& a : s.attributes) {
    json e{{"name", a.name}, {"levels", a.levels}};
    if (!a.probabilities.empty()) e["probabilities"] = a.probabilities;
    attrs.push_back(e);
  }
  j["attributes"] = attrs;
  j["tree"] = node_to_json(s, 0);
  j["class_noise"] = s.class_noise;
  j["numeric_noise_variance"] = s.numeric_noise_variance;
  j["commodities"] = s.commodities;
  j["background_items"] = s.background_items;
  j["background_rate"] = s.background_rate;
  json rules = json::array();
  for (const auto& r : s.rules) {
    rules.push_back({{"antecedent", r.antecedent},
                     {"consequent", r.consequent},
                     {"antecedent_probability", r.antecedent_probability},
                     {"confidence", r.confidence}});
  }
  j["rules"] = rules;
  j["zones"] = {{"grid", s.zones.grid},
                {"spacing_m", s.zones.spacing_m},
                {"pc6_per_zone", s.zones.pc6_per_zone},
                {"dc_fraction", s.zones.dc_fraction},
                {"tt_fraction", s.zones.tt_fraction},
                {"congested_fraction", s.zones.congested_fraction},
                {"speed_kmh", s.zones.speed_kmh}};
  j["speed"] = {{"free_flow_kmh", s.speed.free_flow_kmh},
                {"dip_kmh", s.speed.dip_kmh},
                {"noise_kmh", s.speed.noise_kmh},
                {"step_minutes", s.speed.step_minutes},
                {"segments_per_zone", s.speed.segments_per_zone},
                {"margin_minutes", s.speed.margin_minutes}};
  return j.dump(2);
}

GeneratorSpec spec_from_json(const std::string& text) {
  GeneratorSpec s = default_spec();
  try {
    const auto j = json::parse(text);
    s.seed = j.value("seed", s.seed);
    s.n_tours = j.value("n_tours", s.n_tours);
    if (j.contains("classes")) s.classes = j.at("classes").get<std::vector<std::string>>();
    if (j.contains("attributes")) {
      s.attributes.clear();
      for (const auto& a : j.at("attributes")) {
        s.attributes.push_back({a.at("name").get<std::string>(),
                                a.at("levels").get<std::vector<std::string>>(),
                                a.value("probabilities", std::vector<double>{})});
      }
    }
    if (j.contains("tree")) {
      s.tree.clear();
      node_from_json(j.at("tree"), s.tree, s.attributes);
    }
    s.class_noise = j.value("class_noise", s.class_noise);
    s.numeric_noise_variance = j.value("numeric_noise_variance", s.numeric_noise_variance);
    if (j.contains("commodities")) s.commodities = j.at("commodities").get<std::vector<std::string>>();
    if (j.contains("background_items")) {
      s.background_items = j.at("background_items").get<std::vector<std::string>>();
    }
    s.background_rate = j.value("background_rate", s.background_rate);
    if (j.contains("rules")) {
      s.rules.clear();
      for (const auto& r : j.at("rules")) {
        s.rules.push_back({r.at("antecedent").get<std::string>(),
                           r.at("consequent").get<std::string>(),
                           r.at("antecedent_probability").get<double>(),
                           r.at("confidence").get<double>()});
      }
    }
    if (j.contains("zones")) {
      const auto& z = j.at("zones");
      s.zones.grid = z.value("grid", s.zones.grid);
      s.zones.spacing_m = z.value("spacing_m", s.zones.spacing_m);
      s.zones.pc6_per_zone = z.value("pc6_per_zone", s.zones.pc6_per_zone);
      s.zones.dc_fraction = z.value("dc_fraction", s.zones.dc_fraction);
      s.zones.tt_fraction = z.value("tt_fraction", s.zones.tt_fraction);
      s.zones.congested_fraction = z.value("congested_fraction", s.zones.congested_fraction);
      s.zones.speed_kmh = z.value("speed_kmh", s.zones.speed_kmh);
    }
    if (j.contains("speed")) {
      const auto& v = j.at("speed");
      s.speed.free_flow_kmh = v.value("free_flow_kmh", s.speed.free_flow_kmh);
      s.speed.dip_kmh = v.value("dip_kmh", s.speed.dip_kmh);
      s.speed.noise_kmh = v.value("noise_kmh", s.speed.noise_kmh);
      s.speed.step_minutes = v.value("step_minutes", s.speed.step_minutes);
      s.speed.segments_per_zone = v.value("segments_per_zone", s.speed.segments_per_zone);
      s.speed.margin_minutes = v.value("margin_minutes", s.speed.margin_minutes);
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::config, std::string("generator spec: ") + e.what());
  }
  s.validate();
  return s;
}

double implied_rho(const GeneratorSpec& spec) {
  const double k = static_cast<double>(spec.classes.size());
  const double eta = spec.class_noise;
  const double hit = 1.0 - eta + eta / k;
  const double miss = eta / k;
  return hit * hit + (k - 1.0) * miss * miss;
}

std::vector<double> class_frequencies(const GeneratorSpec& spec) {
  spec.validate();
  const double k = static_cast<double>(spec.classes.size());
  std::vector<double> freq(spec.classes.size(), 0.0);
  std::vector<std::pair<int, double>> stack{{0, 1.0}};
  while (!stack.empty()) {
    const auto [i, p] = stack.back();
    stack.pop_back();
    const auto& n = spec.tree[static_cast<std::size_t>(i)];
    if (n.attribute.empty()) {
      for (std::size_t c = 0; c < freq.size(); ++c) {
        freq[c] += p * ((spec.classes[c] == n.class_label ? 1.0 - spec.class_noise : 0.0) +
                        spec.class_noise / k);
      }
      continue;
    }
    const auto& a = spec.attribute(n.attribute);
    for (std::size_t l = 0; l < a.levels.size(); ++l) {
      stack.push_back({n.children[l], p * level_probability(a, l)});
    }
  }
  return freq;
}

int planted_leaf(const GeneratorSpec& spec, const std::map<std::string, std::string>& values) {
  int i = 0;
  for (;;) {
    const auto& n = spec.tree[static_cast<std::size_t>(i)];
    if (n.attribute.empty()) return i;
    const auto& a = spec.attribute(n.attribute);
    const auto v = values.find(n.attribute);
    if (v == values.end()) fail(ErrorCode::invalid_argument, "no value for '" + n.attribute + "'");
    const auto it = std::find(a.levels.begin(), a.levels.end(), v->second);
    if (it == a.levels.end()) {
      fail(ErrorCode::invalid_argument, "'" + v->second + "' is not a level of " + n.attribute);
    }
    i = n.children[static_cast<std::size_t>(it - a.levels.begin())];
  }
}

namespace {

struct PlantedRow {
  std::map<std::string, std::string> values;
  int leaf = 0;
  std::size_t planted_class = 0;
  std::size_t observed_class = 0;
  double numeric = 0.0;
};

std::size_t class_index(const GeneratorSpec& spec, const std::string& label) {
  return static_cast<std::size_t>(
      std::find(spec.classes.begin(), spec.classes.end(), label) - spec.classes.begin());
}

PlantedRow planted_row(const GeneratorSpec& spec, Rng& rng) {
  PlantedRow r;
  for (const auto& a : spec.attributes) r.values[a.name] = a.levels[draw(rng, a)];
  r.leaf = planted_leaf(spec, r.values);
  const auto& leaf = spec.tree[static_cast<std::size_t>(r.leaf)];
  r.planted_class = class_index(spec, leaf.class_label);
  r.observed_class = r.planted_class;
  // Both draws happen regardless of the outcome so streams stay aligned.
  const double u = rng.uniform();
  const auto replacement = rng.below(spec.classes.size());
  if (u < spec.class_noise) r.observed_class = replacement;
  const double z = rng.normal();
  r.numeric = leaf.mean + std::sqrt(spec.numeric_noise_variance) * z;
  return r;
}

}  // namespace

mtdt::TrainingSet generate_training_set(const GeneratorSpec& spec) {
  spec.validate();
  mtdt::TrainingSet ts;
  for (const auto& a : spec.attributes) ts.attributes.push_back({a.name, a.levels, true});
  ts.classes = spec.classes;
  ts.class_target = "class";
  ts.numeric_target = "numeric";
  ts.has_numeric = true;
  for (std::size_t i = 0; i < spec.n_tours; ++i) {
    Rng rng(derive_seed(spec.seed, "row", i));
    const auto r = planted_row(spec, rng);
    std::vector<int> x;
    for (const auto& a : spec.attributes) {
      const auto& v = r.values.at(a.name);
      x.push_back(static_cast<int>(std::find(a.levels.begin(), a.levels.end(), v) -
                                   a.levels.begin()));
    }
    ts.x.push_back(std::move(x));
    ts.y_class.push_back(static_cast<int>(r.observed_class));
    ts.y_numeric.push_back(r.numeric);
    ts.row_ids.push_back("R" + std::to_string(i + 1));
  }
  return ts;
}

namespace {

std::string padded(std::size_t i, int width) {
  std::string s = std::to_string(i);
  return std::string(static_cast<std::size_t>(std::max(0, width - static_cast<int>(s.size()))), '0') + s;
}

const std::vector<std::string> kDipPeriods{"morning", "midday", "afternoon"};

}  // namespace

GeneratedData generate(const GeneratorSpec& spec) {
  spec.validate();
  for (const auto& a : spec.attributes) {
    if (!kTourAttributes.count(a.name)) {
      fail(ErrorCode::config, "attribute '" + a.name + "' cannot be planted in tour data");
    }
  }
  for (const auto& c : spec.classes) {
    if (c != "direct" && c != "collection" && c != "distribution") {
      fail(ErrorCode::config, "tour data classes must be tour types, got '" + c + "'");
    }
  }
  if (spec.commodities.empty()) fail(ErrorCode::config, "no commodities declared");

  GeneratedData out;
  auto& ds = out.dataset;
  json truth;

  // Zones on a grid, each with one activity type.
  const std::size_t n_zones = static_cast<std::size_t>(spec.zones.grid * spec.zones.grid);
  std::vector<ActivityType> zone_type(n_zones, ActivityType::producer_consumer);
  std::map<std::string, std::vector<std::string>> congested_periods;
  {
    Rng rng(derive_seed(spec.seed, "zones"));
    std::vector<std::size_t> order(n_zones);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = n_zones; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    const auto n_dc = std::max<std::size_t>(1, static_cast<std::size_t>(spec.zones.dc_fraction * n_zones));
    const auto n_tt = std::max<std::size_t>(1, static_cast<std::size_t>(spec.zones.tt_fraction * n_zones));
    for (std::size_t i = 0; i < n_dc; ++i) zone_type[order[i]] = ActivityType::dc;
    for (std::size_t i = n_dc; i < n_dc + n_tt; ++i) zone_type[order[i]] = ActivityType::tt;
    for (std::size_t z = 0; z < n_zones; ++z) {
      Zone zone;
      zone.zone_id = "Z" + padded(z + 1, 3);
      zone.pc4 = std::to_string(1000 + z);
      zone.centroid = {static_cast<double>(z % spec.zones.grid) * spec.zones.spacing_m,
                       static_cast<double>(z / spec.zones.grid) * spec.zones.spacing_m};
      for (int c = 0; c < spec.zones.pc6_per_zone; ++c) {
        zone.pc6_children.push_back(zone.pc4 + static_cast<char>('A' + c / 26) +
                                    static_cast<char>('A' + c % 26));
      }
      if (rng.uniform() < spec.zones.congested_fraction) {
        auto& periods = congested_periods[zone.zone_id];
        const auto pick = rng.below(4);
        if (pick == 3) {
          periods = {"morning", "afternoon"};
        } else {
          periods = {kDipPeriods[pick]};
        }
      }
      ds.zones.push_back(std::move(zone));
    }
  }
  for (const auto& a : ds.zones) {
    for (const auto& b : ds.zones) {
      ds.travel_times.set(a.zone_id, b.zone_id,
                          distance(a.centroid, b.centroid) / 1000.0 / spec.zones.speed_kmh * 60.0);
    }
  }
  std::vector<std::size_t> dc_zones, tt_zones, pc_zones;
  for (std::size_t z = 0; z < n_zones; ++z) {
    (zone_type[z] == ActivityType::dc   ? dc_zones
     : zone_type[z] == ActivityType::tt ? tt_zones
                                        : pc_zones)
        .push_back(z);
  }

  // Firms of the zone's single type make imputation deterministic.
  {
    Rng rng(derive_seed(spec.seed, "census"));
    for (std::size_t z = 0; z < n_zones; ++z) {
      for (const auto& pc6 : ds.zones[z].pc6_children) {
        out.census.counts[{pc6, zone_type[z]}] = 3 + static_cast<long long>(rng.below(5));
        for (const auto& code : spec.commodities) {
          for (auto dir : {fusion::FlowDirection::in, fusion::FlowDirection::out}) {
            out.flows.counts[{code, pc6, dir}] = 1 + static_cast<long long>(rng.below(10));
          }
        }
      }
    }
    for (auto a : kActivities) {
      for (const auto& code : spec.commodities) {
        out.census.make_use[{a, code, fusion::MakeUse::make}] = 0.5;
        out.census.make_use[{a, code, fusion::MakeUse::use}] = 0.5;
      }
    }
  }

  // Speed series with dips inside the congested periods.
  {
    const auto periods = congestion::default_periods();
    const int steps = 1440 / spec.speed.step_minutes;
    for (std::size_t z = 0; z < n_zones; ++z) {
      const auto& zone_id = ds.zones[z].zone_id;
      const auto cp = congested_periods.find(zone_id);
      for (int s = 0; s < spec.speed.segments_per_zone; ++s) {
        Rng rng(derive_seed(spec.seed, "speed:" + zone_id, static_cast<std::uint64_t>(s)));
        congestion::SpeedSeries series;
        series.segment_id = zone_id + "-" + std::to_string(s + 1);
        series.zone_id = zone_id;
        series.length_m = 500.0 + static_cast<double>(rng.below(1500));
        series.step_minutes = spec.speed.step_minutes;
        series.start_minute = 0;
        for (int t = 0; t < steps; ++t) {
          const int minute = t * spec.speed.step_minutes;
          bool dip = false;
          if (cp != congested_periods.end()) {
            for (const auto& name : cp->second) {
              for (const auto& p : periods) {
                if (p.name != name) continue;
                for (const auto& [b, e] : p.windows) {
                  dip |= minute >= b + spec.speed.margin_minutes &&
                         minute < e - spec.speed.margin_minutes;
                }
              }
            }
          }
          const double base = dip ? spec.speed.dip_kmh : spec.speed.free_flow_kmh;
          series.speeds_kmh.push_back(base + spec.speed.noise_kmh * (2.0 * rng.uniform() - 1.0));
        }
        out.speeds.push_back(std::move(series));
      }
    }
  }

  // Tours.
  json tour_truth = json::array();
  for (std::size_t i = 0; i < spec.n_tours; ++i) {
    Rng rng(derive_seed(spec.seed, "tour", i));
    const auto row = planted_row(spec, rng);
    auto value = [&](const std::string& name, const std::string& fallback) {
      const auto it = row.values.find(name);
      return it == row.values.end() ? fallback : it->second;
    };
    const auto cls = spec.classes[row.observed_class];
    int n_stops = 1;
    if (cls != "direct") {
      n_stops = std::clamp(static_cast<int>(std::lround(row.numeric)), 2, 33);
    }

    TourRecord tour;
    tour.tour_id = "T" + padded(i + 1, 6);
    tour.carrier_id = "C" + padded(i % 50 + 1, 2);
    tour.vehicle_type = value("vehicle_type", rng.below(2) ? "1" : "0") == "1" ? VehicleType::trailer
                                                                              : VehicleType::truck;
    tour.day_of_week = std::stoi(value("day_of_week", std::to_string(rng.below(7))));
    {
      const auto dep = value("departure_class", "");
      int minute = 0;
      if (dep == "morning") minute = 373 + static_cast<int>(rng.below(638 - 373));
      else if (dep == "midday") minute = 638 + static_cast<int>(rng.below(893 - 638));
      else if (dep == "afternoon") minute = 893 + static_cast<int>(rng.below(1172 - 893));
      else if (dep == "night") minute = (1172 + static_cast<int>(rng.below(373 + 268))) % 1440;
      else minute = static_cast<int>(rng.below(1440));
      tour.departure_minute = minute;
    }
    const bool visit_dc = value("visit_DC", "0") == "1";
    const bool visit_tt = value("visit_TT", "0") == "1";
    const bool empty = value("empty_flag", "0") == "1";

    auto pick = [&](const std::vector<std::size_t>& pool) { return pool[rng.below(pool.size())]; };
    const std::size_t origin = visit_dc ? pick(dc_zones) : pick(pc_zones);
    std::vector<std::size_t> visited;
    {
      std::vector<std::size_t> pool;
      for (auto z : pc_zones) {
        if (z != origin) pool.push_back(z);
      }
      for (int k = 0; k < n_stops; ++k) {
        if (pool.empty()) {
          visited.push_back(pick(pc_zones));
          continue;
        }
        const auto j = rng.below(pool.size());
        visited.push_back(pool[j]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(j));
      }
      if (visit_tt) visited.back() = pick(tt_zones);
    }
    auto stop_at = [&](std::size_t z, StopKind kind) {
      StopRecord s;
      const auto& zone = ds.zones[z];
      s.zone_id = zone.zone_id;
      s.kind = kind;
      if (rng.uniform() < 0.5) {
        s.postcode = zone.pc4;
        s.resolution = Resolution::pc4;
      } else {
        s.postcode = zone.pc6_children[rng.below(zone.pc6_children.size())];
        s.resolution = Resolution::pc6;
      }
      return s;
    };
    tour.stops.push_back(stop_at(origin, StopKind::pickup));
    for (std::size_t k = 0; k < visited.size(); ++k) {
      const bool pickup = cls == "collection" && k + 1 < visited.size();
      tour.stops.push_back(stop_at(visited[k], pickup ? StopKind::pickup : StopKind::delivery));
    }

    // Commodity basket: background items plus planted co-occurrences.
    std::vector<std::string> items;
    for (const auto& b : spec.background_items) {
      if (rng.uniform() < spec.background_rate) items.push_back(b);
    }
    for (const auto& r : spec.rules) {
      const bool a = rng.uniform() < r.antecedent_probability;
      const bool b = rng.uniform() < r.confidence;
      if (a) {
        items.push_back(r.antecedent);
        if (b) items.push_back(r.consequent);
      }
    }
    if (items.empty()) {
      const auto& pool = spec.background_items.empty() ? spec.commodities : spec.background_items;
      items.push_back(pool[rng.below(pool.size())]);
    }
    std::sort(items.begin(), items.end());

    // One shipment per served stop, extra origin shipments until every item is carried.
    std::vector<std::pair<std::string, std::string>> legs;
    const auto& origin_id = ds.zones[origin].zone_id;
    const auto& last_id = tour.stops.back().zone_id;
    if (cls == "collection") {
      legs.push_back({origin_id, last_id});
      for (std::size_t k = 1; k + 1 < tour.stops.size(); ++k) legs.push_back({tour.stops[k].zone_id, last_id});
    } else {
      for (std::size_t k = 1; k < tour.stops.size(); ++k) legs.push_back({origin_id, tour.stops[k].zone_id});
    }
    while (legs.size() < items.size()) legs.push_back({origin_id, tour.stops[1].zone_id});
    for (std::size_t k = 0; k < legs.size(); ++k) {
      ShipmentRecord s;
      s.shipment_id = tour.tour_id + "-S" + std::to_string(k + 1);
      s.tour_id = tour.tour_id;
      s.commodity_code = items[k % items.size()];
      s.load_zone = legs[k].first;
      s.unload_zone = legs[k].second;
      s.empty_flag = empty && k == 0;
      s.weight_kg = s.empty_flag ? 50.0 : 500.0 + static_cast<double>(rng.below(4501));
      tour.shipment_ids.push_back(s.shipment_id);
      ds.shipments.push_back(std::move(s));
    }

    tour_truth.push_back({{"tour_id", tour.tour_id},
                          {"leaf", row.leaf},
                          {"planted_class", spec.classes[row.planted_class]},
                          {"class", cls},
                          {"noised", row.observed_class != row.planted_class},
                          {"n_stops", n_stops}});
    ds.tours.push_back(std::move(tour));
  }
  ds.reindex();
  validate_dataset(ds);

  truth["format"] = "tourkit.ground_truth/1";
  truth["seed"] = spec.seed;
  truth["class_noise"] = spec.class_noise;
  truth["numeric_noise_variance"] = spec.numeric_noise_variance;
  truth["implied_rho"] = implied_rho(spec);
  truth["class_frequencies"] = json::object();
  {
    const auto freq = class_frequencies(spec);
    for (std::size_t c = 0; c < freq.size(); ++c) truth["class_frequencies"][spec.classes[c]] = freq[c];
  }
  truth["tree"] = node_to_json(spec, 0);
  json rules = json::array();
  for (const auto& r : spec.rules) {
    rules.push_back({{"antecedent", r.antecedent},
                     {"consequent", r.consequent},
                     {"confidence", r.confidence},
                     {"antecedent_probability", r.antecedent_probability}});
  }
  truth["rules"] = rules;
  json zones = json::array();
  for (std::size_t z = 0; z < n_zones; ++z) {
    const auto& id = ds.zones[z].zone_id;
    const auto it = congested_periods.find(id);
    zones.push_back({{"zone_id", id},
                     {"activity_type", std::string(to_string(zone_type[z]))},
                     {"congested_periods", it == congested_periods.end()
                                               ? std::vector<std::string>{}
                                               : it->second}});
  }
  truth["zones"] = zones;
  truth["tours"] = tour_truth;
  out.ground_truth = truth.dump(2);
  return out;
}

void save_generated(const GeneratedData& data, const GeneratorSpec& spec,
                    const std::filesystem::path& dir) {
  save_dataset(data.dataset, dir);
  fusion::save_census(data.census, dir / "firms.csv", dir / "make_use.csv");
  fusion::save_flows(data.flows, dir / "flows.csv");
  congestion::save_speeds_long(data.speeds, dir / "speeds.csv");
  {
    std::vector<std::vector<std::string>> rows;
    for (const auto& c : spec.commodities) rows.push_back({c});
    csv::write_file(dir / "commodities.csv", {"code"}, rows);
  }
  for (const auto& [name, text] : {std::pair<const char*, std::string>{"ground_truth.json", data.ground_truth},
                                   {"generator_spec.json", spec_to_json(spec)}}) {
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::io, "cannot write '" + (dir / name).string() + "'");
    out << text << '\n';
  }
}

}  // namespace tourkit::datagen
