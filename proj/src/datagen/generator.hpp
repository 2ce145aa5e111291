#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "congestion/congestion.hpp"
#include "core/model.hpp"
#include "fusion/fusion.hpp"
#include "mtdt/dataset.hpp"

namespace tourkit::datagen {

struct AttributeSpec {
  std::string name;
  std::vector<std::string> levels;
  std::vector<double> probabilities;  // empty: uniform
};

// Planted decision tree; nodes[0] is the root.
struct PlantedNode {
  std::string attribute;     // empty for a leaf
  std::vector<int> children;  // per level of the attribute
  std::string class_label;   // leaves
  double mean = 0.0;         // leaves: numeric target mean
};

struct PlantedRule {
  std::string antecedent;
  std::string consequent;
  double antecedent_probability = 0.0;
  double confidence = 0.0;
};

struct ZoneLayout {
  int grid = 8;
  double spacing_m = 5000.0;
  int pc6_per_zone = 2;
  double dc_fraction = 0.15;
  double tt_fraction = 0.1;
  double congested_fraction = 0.2;
  double speed_kmh = 50.0;  // travel-time matrix speed
};

struct SpeedTemplate {
  double free_flow_kmh = 100.0;
  double dip_kmh = 60.0;
  double noise_kmh = 1.0;
  int step_minutes = 15;
  int segments_per_zone = 2;
  // Dips stay this far inside their period so smoothing cannot leak them.
  int margin_minutes = 60;
};

struct GeneratorSpec {
  std::uint64_t seed = 1;
  std::size_t n_tours = 5000;
  std::vector<std::string> classes{"direct", "collection", "distribution"};
  std::vector<AttributeSpec> attributes;
  std::vector<PlantedNode> tree;
  double class_noise = 0.0;
  double numeric_noise_variance = 0.0;
  std::vector<std::string> commodities;
  std::vector<std::string> background_items;
  double background_rate = 0.15;
  std::vector<PlantedRule> rules;
  ZoneLayout zones;
  SpeedTemplate speed;

  // Throws a config error on any inconsistency.
  void validate() const;
  const AttributeSpec& attribute(const std::string& name) const;
};

// The depth-2 structure used throughout the tests and the default pipeline.
GeneratorSpec default_spec();

GeneratorSpec spec_from_json(const std::string& text);
std::string spec_to_json(const GeneratorSpec& spec);

// Expected leaf-weighted probability matching of a tree that recovers the
// planted partition, given uniform class noise over all classes.
double implied_rho(const GeneratorSpec& spec);

// Marginal class frequencies implied by the attribute distributions, the
// tree and the noise.
std::vector<double> class_frequencies(const GeneratorSpec& spec);

// Planted leaf for a full attribute assignment (values by attribute name).
int planted_leaf(const GeneratorSpec& spec, const std::map<std::string, std::string>& values);

// Rows drawn directly at the tree level: one attribute per spec attribute,
// numeric target = leaf mean + N(0, variance).
mtdt::TrainingSet generate_training_set(const GeneratorSpec& spec);

struct GeneratedData {
  Dataset dataset;
  fusion::FirmCensus census;
  fusion::ShipmentFlowCounts flows;
  std::vector<congestion::SpeedSeries> speeds;
  std::string ground_truth;  // JSON
};

// Tour-level data whose engineered features follow the planted tree.
GeneratedData generate(const GeneratorSpec& spec);

// Writes the core CSVs, census, flows, speeds, the spec and ground_truth.json.
void save_generated(const GeneratedData& data, const GeneratorSpec& spec,
                    const std::filesystem::path& dir);

}  // namespace tourkit::datagen
