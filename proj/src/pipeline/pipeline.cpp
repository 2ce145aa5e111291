#include "pipeline/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "congestion/congestion.hpp"
#include "core/error.hpp"
#include "core/model.hpp"
#include "core/rng.hpp"
#include "datagen/generator.hpp"
#include "eval/impact.hpp"
#include "eval/metrics.hpp"
#include "features/features.hpp"
#include "fusion/fusion.hpp"
#include "mtdt/cross_validate.hpp"
#include "mtdt/tree.hpp"
#include "mtdt/tree_io.hpp"
#include "rulemine/apriori.hpp"

namespace tourkit::pipeline {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

json default_config() {
  const features::FeatureConfig f;
  const mtdt::Hyperparams h;
  return {
      {"seed", 1},
      {"out", "out"},
      {"input_dir", nullptr},
      {"synth", {{"spec", nullptr}, {"n_tours", nullptr}, {"class_noise", nullptr}}},
      {"congestion",
       {{"window_steps", 4},
        {"jenks_classes", 5},
        {"radius_m", congestion::kDefaultRadiusM}}},
      {"features",
       {{"tour_length_breaks_km", f.tour_length_breaks_km},
        {"n_commodities_breaks", f.n_commodities_breaks},
        {"weight_factor_breaks", f.weight_factor_breaks},
        {"departure_edges", f.departure.edges},
        {"rebin_departure", false},
        {"median_tol_m", f.median_tol_m},
        {"test_fraction", f.test_fraction}}},
      {"rulemine",
       {{"min_support", nullptr},
        {"min_confidence", nullptr},
        {"min_rule_size", 2},
        {"confidence_floor", 0.7}}},
      {"mtdt",
       {{"class_target", "tour_type"},
        {"numeric_target", "n_stops"},
        {"attributes", json::array()},
        {"max_depth_grid", h.max_depth_grid},
        {"min_samples_leaf", h.min_samples_leaf},
        {"cv_folds", h.cv_folds},
        {"secondary_mode", std::string(mtdt::to_string(h.secondary_mode))},
        {"oversample", h.oversample},
        {"rho_weight", h.rho_weight},
        {"r2_weight", h.r2_weight}}},
  };
}

namespace {

// Keys whose default is null accept these JSON types.
bool nullable_accepts(const std::string& key, const json& v) {
  if (v.is_null()) return true;
  if (key == "input_dir" || key == "synth.spec" || key == "mtdt.numeric_target") return v.is_string();
  return v.is_number();
}

bool same_kind(const json& def, const json& v) {
  if (def.is_number()) return v.is_number();
  return def.type() == v.type();
}

void merge(json& into, const json& from, const std::string& prefix) {
  if (!from.is_object()) fail(ErrorCode::config, "config section '" + prefix + "' must be an object");
  for (const auto& [key, value] : from.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (!into.contains(key)) fail(ErrorCode::config, "unknown config key '" + path + "'");
    auto& slot = into[key];
    if (slot.is_object()) {
      merge(slot, value, path);
    } else if (slot.is_null() ? nullable_accepts(path, value) : same_kind(slot, value)) {
      slot = value;
    } else if (!slot.is_null() && (path == "mtdt.numeric_target") && value.is_null()) {
      slot = value;
    } else {
      fail(ErrorCode::config, "config key '" + path + "' has the wrong type");
    }
  }
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorCode::parse, path.string() + ": " + e.what());
  }
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot open '" + path.string() + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::io, "cannot write '" + path.string() + "'");
  out << text;
  if (text.empty() || text.back() != '\n') out << '\n';
}

void require_file(const fs::path& path, const std::string& stage) {
  if (!fs::exists(path)) {
    fail(ErrorCode::io, "stage '" + stage + "' input missing: '" + path.string() + "'");
  }
}

}  // namespace

Config::Config() : doc_(default_config()) {}

Config Config::from_json(const std::string& text) {
  Config c;
  json user;
  try {
    user = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::parse, std::string("config: ") + e.what());
  }
  merge(c.doc_, user, "");
  c.validate();
  return c;
}

Config Config::load(const fs::path& path) {
  if (!fs::exists(path)) fail(ErrorCode::io, "config file not found: '" + path.string() + "'");
  try {
    return from_json(read_text(path));
  } catch (const Error& e) {
    fail(e.code(), path.string() + ": " + e.what());
  }
}

void Config::set(const std::string& key_path, const json& value) {
  json patch = value;
  std::vector<std::string> parts;
  std::stringstream ss(key_path);
  for (std::string part; std::getline(ss, part, '.');) parts.push_back(part);
  if (parts.empty()) fail(ErrorCode::config, "empty config key");
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) patch = json{{*it, patch}};
  json next = doc_;
  merge(next, patch, "");
  std::swap(doc_, next);
  try {
    validate();
  } catch (...) {
    std::swap(doc_, next);
    throw;
  }
}

std::uint64_t Config::seed() const { return doc_.at("seed").get<std::uint64_t>(); }
fs::path Config::out() const { return doc_.at("out").get<std::string>(); }
fs::path Config::input_dir() const {
  const auto& v = doc_.at("input_dir");
  return v.is_null() ? out() / "synth" : fs::path(v.get<std::string>());
}

namespace {

features::FeatureConfig feature_config(const Config& c) {
  const auto& j = c.doc().at("features");
  features::FeatureConfig f;
  f.tour_length_breaks_km = j.at("tour_length_breaks_km").get<std::vector<double>>();
  f.n_commodities_breaks = j.at("n_commodities_breaks").get<std::vector<double>>();
  f.weight_factor_breaks = j.at("weight_factor_breaks").get<std::vector<double>>();
  f.departure.edges = j.at("departure_edges").get<std::array<int, 4>>();
  f.rebin_departure = j.at("rebin_departure").get<bool>();
  f.median_tol_m = j.at("median_tol_m").get<double>();
  f.test_fraction = j.at("test_fraction").get<double>();
  f.seed = derive_seed(c.seed(), "features");
  return f;
}

mtdt::Hyperparams hyperparams(const Config& c) {
  const auto& j = c.doc().at("mtdt");
  mtdt::Hyperparams h;
  h.max_depth_grid = j.at("max_depth_grid").get<std::vector<int>>();
  h.min_samples_leaf = j.at("min_samples_leaf").get<int>();
  h.cv_folds = j.at("cv_folds").get<int>();
  const auto mode = mtdt::parse_secondary_mode(j.at("secondary_mode").get<std::string>());
  if (!mode) fail(ErrorCode::config, "mtdt.secondary_mode must be precedence_IG, precedence_SSR or distance");
  h.secondary_mode = *mode;
  h.oversample = j.at("oversample").get<bool>();
  h.rho_weight = j.at("rho_weight").get<double>();
  h.r2_weight = j.at("r2_weight").get<double>();
  h.seed = derive_seed(c.seed(), "train");
  return h;
}

features::EncodeOptions encode_options(const Config& c) {
  const auto& j = c.doc().at("mtdt");
  features::EncodeOptions o;
  o.class_target = j.at("class_target").get<std::string>();
  if (j.at("numeric_target").is_null()) {
    o.numeric_target.reset();
  } else {
    o.numeric_target = j.at("numeric_target").get<std::string>();
  }
  o.attributes = j.at("attributes").get<std::vector<std::string>>();
  return o;
}

}  // namespace

void Config::validate() const {
  try {
    const auto& j = doc_;
    if (!j.at("seed").is_number_unsigned() && !(j.at("seed").is_number_integer() && j.at("seed").get<long long>() >= 0)) {
      fail(ErrorCode::config, "seed must be a non-negative integer");
    }
    if (j.at("out").get<std::string>().empty()) fail(ErrorCode::config, "out must not be empty");
    const auto& s = j.at("synth");
    if (!s.at("n_tours").is_null() && s.at("n_tours").get<double>() < 1) {
      fail(ErrorCode::config, "synth.n_tours must be >= 1");
    }
    if (!s.at("class_noise").is_null()) {
      const double eta = s.at("class_noise").get<double>();
      if (eta < 0 || eta >= 1) fail(ErrorCode::config, "synth.class_noise must be in [0,1)");
    }
    const auto& g = j.at("congestion");
    if (g.at("window_steps").get<int>() < 1) fail(ErrorCode::config, "congestion.window_steps must be >= 1");
    if (g.at("jenks_classes").get<int>() < 2) fail(ErrorCode::config, "congestion.jenks_classes must be >= 2");
    if (!(g.at("radius_m").get<double>() >= 0)) fail(ErrorCode::config, "congestion.radius_m must be >= 0");
    const auto f = feature_config(*this);
    if (f.test_fraction < 0 || f.test_fraction >= 1) fail(ErrorCode::config, "features.test_fraction must be in [0,1)");
    if (!(f.median_tol_m > 0)) fail(ErrorCode::config, "features.median_tol_m must be positive");
    for (std::size_t i = 0; i < 4; ++i) {
      if (f.departure.edges[i] < 0 || f.departure.edges[i] > 1440 ||
          (i && f.departure.edges[i] <= f.departure.edges[i - 1])) {
        fail(ErrorCode::config, "features.departure_edges must be increasing minutes of day");
      }
    }
    const auto& r = j.at("rulemine");
    for (const char* key : {"min_support", "min_confidence"}) {
      if (!r.at(key).is_null()) {
        const double v = r.at(key).get<double>();
        if (!(v > 0 && v <= 1)) fail(ErrorCode::config, std::string("rulemine.") + key + " must be in (0,1]");
      }
    }
    if (r.at("min_rule_size").get<int>() < 2) fail(ErrorCode::config, "rulemine.min_rule_size must be >= 2");
    const double floor = r.at("confidence_floor").get<double>();
    if (floor < 0 || floor > 1) fail(ErrorCode::config, "rulemine.confidence_floor must be in [0,1]");
    const auto h = hyperparams(*this);
    if (h.max_depth_grid.empty()) fail(ErrorCode::config, "mtdt.max_depth_grid must not be empty");
    for (int d : h.max_depth_grid) {
      if (d < 0) fail(ErrorCode::config, "mtdt.max_depth_grid entries must be >= 0");
    }
    if (h.min_samples_leaf < 1) fail(ErrorCode::config, "mtdt.min_samples_leaf must be >= 1");
    if (h.cv_folds < 2) fail(ErrorCode::config, "mtdt.cv_folds must be >= 2");
    const auto o = encode_options(*this);
    if (o.class_target != "tour_type" && o.class_target != "departure_class") {
      fail(ErrorCode::config, "mtdt.class_target must be tour_type or departure_class");
    }
    if (o.numeric_target && *o.numeric_target != "n_stops") {
      fail(ErrorCode::config, "mtdt.numeric_target must be n_stops or null");
    }
    for (const auto& a : o.attributes) {
      const auto& names = features::matrix_attribute_names();
      if (std::find(names.begin(), names.end(), a) == names.end()) {
        fail(ErrorCode::config, "mtdt.attributes: unknown attribute '" + a + "'");
      }
      if (a == o.class_target) fail(ErrorCode::config, "mtdt.attributes contains the class target");
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::config, std::string("config: ") + e.what());
  }
}

namespace {

StageResult stage_synth(const Config& c) {
  StageResult r;
  const auto& s = c.doc().at("synth");
  datagen::GeneratorSpec spec = datagen::default_spec();
  if (!s.at("spec").is_null()) spec = datagen::spec_from_json(read_text(s.at("spec").get<std::string>()));
  if (!s.at("n_tours").is_null()) spec.n_tours = s.at("n_tours").get<std::size_t>();
  if (!s.at("class_noise").is_null()) spec.class_noise = s.at("class_noise").get<double>();
  spec.seed = derive_seed(c.seed(), "synth");
  spec.validate();
  const auto data = datagen::generate(spec);
  const auto dir = c.out() / "synth";
  datagen::save_generated(data, spec, dir);
  r.artifacts = {dir / "tours.csv", dir / "stops.csv", dir / "shipments.csv", dir / "zones.csv",
                 dir / "travel_times.csv", dir / "firms.csv", dir / "make_use.csv",
                 dir / "flows.csv", dir / "speeds.csv", dir / "ground_truth.json"};
  std::ostringstream line;
  line << "synth: " << data.dataset.tours.size() << " tours, " << data.dataset.shipments.size()
       << " shipments, " << data.dataset.zones.size() << " zones, implied rho "
       << datagen::implied_rho(spec) << " -> " << dir.string();
  r.summary = line.str();
  return r;
}

Dataset load_raw(const Config& c, const std::string& stage) {
  const auto dir = c.input_dir();
  if (!fs::is_directory(dir)) {
    fail(ErrorCode::io, "stage '" + stage + "' input directory missing: '" + dir.string() + "'");
  }
  return load_dataset(DatasetPaths::in_directory(dir));
}

StageResult stage_fuse(const Config& c) {
  StageResult r;
  const auto ds = load_raw(c, "fuse");
  const auto in = c.input_dir();
  for (const char* f : {"firms.csv", "make_use.csv", "flows.csv"}) require_file(in / f, "fuse");
  const auto census = fusion::load_census(in / "firms.csv", in / "make_use.csv");
  const auto flows = fusion::load_flows(in / "flows.csv");
  const auto result = fusion::impute_activities(ds, census, flows, derive_seed(c.seed(), "fuse"));
  const auto dir = c.out() / "fuse";
  fs::create_directories(dir);
  write_stops_csv(result.dataset, dir / "stops.csv");
  fusion::write_imputation_log(result.log, dir / "imputation_log.jsonl");
  std::size_t low = 0;
  std::array<std::size_t, kActivityCount> by_type{};
  for (const auto& e : result.log) {
    low += !e.commodity.has_value();
    for (std::size_t i = 0; i < kActivityCount; ++i) by_type[i] += e.assigned == kActivities[i];
  }
  r.artifacts = {dir / "stops.csv", dir / "imputation_log.jsonl"};
  r.warnings = ds.warnings;
  std::ostringstream line;
  line << "fuse: " << result.log.size() << " stops imputed (DC " << by_type[0] << ", TT "
       << by_type[1] << ", producer_consumer " << by_type[2] << "), " << low
       << " low-confidence -> " << dir.string();
  r.summary = line.str();
  return r;
}

StageResult stage_congest(const Config& c) {
  StageResult r;
  const auto ds = load_raw(c, "congest");
  require_file(c.input_dir() / "speeds.csv", "congest");
  const auto speeds = congestion::load_speeds(c.input_dir() / "speeds.csv");
  const auto& g = c.doc().at("congestion");
  congestion::ProximityConfig prox;
  prox.jenks_classes = g.at("jenks_classes").get<int>();
  prox.congested_radius_m = g.at("radius_m").get<double>();
  const auto result = congestion::compute_congestion(speeds, ds.zones, congestion::default_periods(),
                                                     g.at("window_steps").get<int>(), prox);
  const auto dir = c.out() / "congest";
  fs::create_directories(dir);
  congestion::write_congestion_csv(result.map, dir / "congestion.csv");
  congestion::write_breaks_json(result, prox, dir / "breaks.json");
  std::size_t indicated = 0, congested = 0;
  for (const auto& [key, cell] : result.map.entries()) {
    indicated += cell.indicator;
    congested += cell.congested;
  }
  for (const auto& z : result.no_data_zones) r.warnings.push_back("zone '" + z + "' has no speed data");
  r.artifacts = {dir / "congestion.csv", dir / "breaks.json"};
  std::ostringstream line;
  line << "congest: " << speeds.size() << " segments, " << indicated
       << " zone-periods over threshold, " << congested << " after proximity expansion -> "
       << dir.string();
  r.summary = line.str();
  return r;
}

StageResult stage_features(const Config& c) {
  StageResult r;
  auto paths = DatasetPaths::in_directory(c.input_dir());
  paths.stops = c.out() / "fuse" / "stops.csv";
  require_file(paths.stops, "features");
  const auto cpath = c.out() / "congest" / "congestion.csv";
  require_file(cpath, "features");
  const auto ds = load_dataset(paths);
  const auto cmap = congestion::load_congestion_csv(cpath);
  const auto m = features::build_matrix(ds, cmap, feature_config(c));
  const auto dir = c.out() / "features";
  fs::create_directories(dir);
  features::write_matrix_csv(m, dir / "matrix.csv");
  features::write_feature_config(m, dir / "feature_config.json");
  r.warnings = m.warnings;
  r.artifacts = {dir / "matrix.csv", dir / "feature_config.json"};
  std::size_t test = 0;
  for (const auto& row : m.rows) test += row.test;
  std::ostringstream line;
  line << "features: " << m.rows.size() << " rows (" << m.rows.size() - test << " train, " << test
       << " test), " << m.excluded << " tours excluded -> " << dir.string();
  r.summary = line.str();
  return r;
}

StageResult stage_segment(const Config& c) {
  StageResult r;
  const auto& j = c.doc().at("rulemine");
  if (j.at("min_support").is_null() || j.at("min_confidence").is_null()) {
    fail(ErrorCode::config, "rulemine.min_support and rulemine.min_confidence are required");
  }
  const auto ds = load_raw(c, "segment");
  const auto tx = rulemine::tour_transactions(ds);
  rulemine::MiningParams params;
  params.min_support = j.at("min_support").get<double>();
  params.min_confidence = j.at("min_confidence").get<double>();
  params.min_rule_size = j.at("min_rule_size").get<std::size_t>();
  const double floor = j.at("confidence_floor").get<double>();
  const auto rules = rulemine::apriori(tx, params);
  const auto segments = rulemine::segment_markets(rules, tx, floor);
  const auto dir = c.out() / "segment";
  fs::create_directories(dir);
  rulemine::write_transactions(tx, dir / "transactions.csv");
  rulemine::write_rules_json(rules, dir / "rules.json");
  rulemine::write_segments_json(segments, floor, dir / "segments.json");
  r.artifacts = {dir / "transactions.csv", dir / "rules.json", dir / "segments.json"};
  std::ostringstream line;
  line << "segment: " << tx.size() << " transactions, " << rules.frequent.size()
       << " frequent itemsets, " << rules.rules.size() << " rules, " << segments.size()
       << " segments -> " << dir.string();
  r.summary = line.str();
  return r;
}

features::Matrix load_features(const Config& c, const std::string& stage) {
  const auto dir = c.out() / "features";
  require_file(dir / "matrix.csv", stage);
  require_file(dir / "feature_config.json", stage);
  return features::load_matrix(dir);
}

StageResult stage_train(const Config& c) {
  StageResult r;
  const auto m = load_features(c, "train");
  const auto train = features::encode(m, encode_options(c), features::SplitSelect::train);
  if (train.size() == 0) fail(ErrorCode::domain, "no training rows");
  auto h = hyperparams(c);
  const auto cv = mtdt::cross_validate(train, h);
  h.max_depth = cv.best_depth;
  auto fit_data = train;
  if (h.oversample) fit_data = mtdt::oversample_minority(train, derive_seed(h.seed, "fit"), &r.warnings);
  const auto tree = mtdt::grow_tree(fit_data, h);
  const auto dir = c.out() / "train";
  fs::create_directories(dir);
  mtdt::save_tree(tree, dir / "tree.json");
  write_text(dir / "tree.dot", mtdt::tree_to_dot(tree));
  ojson j;
  j["rows"] = train.size();
  j["folds"] = h.cv_folds;
  j["secondary_mode"] = std::string(mtdt::to_string(h.secondary_mode));
  j["oversample"] = h.oversample;
  j["best_depth"] = cv.best_depth;
  auto table = ojson::array();
  for (const auto& s : cv.table) {
    table.push_back({{"depth", s.depth},
                     {"mean_rho", s.mean_rho},
                     {"mean_R2", s.mean_r2 ? ojson(*s.mean_r2) : ojson(nullptr)},
                     {"score", s.score}});
  }
  j["grid"] = table;
  j["attributes"] = ojson::array();
  for (const auto& a : train.attributes) j["attributes"].push_back(a.name);
  write_text(dir / "cv.json", j.dump(2));
  r.artifacts = {dir / "tree.json", dir / "tree.dot", dir / "cv.json"};
  std::ostringstream line;
  line << "train: " << train.size() << " rows, depth " << cv.best_depth << " by " << h.cv_folds
       << "-fold CV, " << tree.leaf_count() << " leaves -> " << dir.string();
  r.summary = line.str();
  return r;
}

struct Fitted {
  mtdt::MultiTaskTree tree;
  mtdt::TrainingSet data;
  std::vector<std::string> warnings;
};

Fitted load_fitted(const Config& c, const std::string& stage, features::SplitSelect which) {
  const auto m = load_features(c, stage);
  const auto tree_path = c.out() / "train" / "tree.json";
  require_file(tree_path, stage);
  Fitted f{mtdt::load_tree(tree_path), features::encode(m, encode_options(c), which), {}};
  if (f.data.size() == 0 && which == features::SplitSelect::test) {
    f.warnings.push_back("no test rows; evaluating on all rows");
    f.data = features::encode(m, encode_options(c), features::SplitSelect::all);
  }
  if (f.tree.attributes != f.data.attributes || f.tree.classes != f.data.classes) {
    fail(ErrorCode::validation, "tree.json does not match the configured attributes; rerun train");
  }
  return f;
}

StageResult stage_eval(const Config& c) {
  StageResult r;
  auto f = load_fitted(c, "eval", features::SplitSelect::test);
  r.warnings = f.warnings;
  const auto report = eval::evaluate(f.tree, f.data);
  const auto dir = c.out() / "eval";
  write_text(dir / "eval_report.json", eval::eval_report_json(report));
  r.artifacts = {dir / "eval_report.json"};
  std::ostringstream line;
  line << "eval: " << report.rows << " test rows, rho " << report.rho.rho;
  if (report.rho.rho_incr) line << ", rho_incr " << *report.rho.rho_incr;
  if (report.r2) line << ", R2 " << *report.r2;
  if (report.classification.macro_f1) line << ", Macro-F1 " << *report.classification.macro_f1;
  line << " -> " << dir.string();
  r.summary = line.str();
  return r;
}

StageResult stage_impact(const Config& c) {
  StageResult r;
  auto f = load_fitted(c, "impact", features::SplitSelect::all);
  const auto report = eval::impact_report(f.tree, f.data);
  r.warnings = report.warnings;
  const auto dir = c.out() / "impact";
  write_text(dir / "impact_report.json", eval::impact_report_json(report));
  r.artifacts = {dir / "impact_report.json"};
  std::ostringstream line;
  line << "impact: " << report.covariates.size() << " covariates";
  if (!report.covariates.empty()) {
    line << ", top " << report.covariates.front().covariate << " (MI share "
         << report.covariates.front().mi_share << ")";
  }
  line << " -> " << dir.string();
  r.summary = line.str();
  return r;
}

StageResult stage_report(const Config& c) {
  StageResult r;
  const auto out = c.out();
  const auto dir = out / "report";
  fs::create_directories(dir);
  const std::vector<std::pair<fs::path, std::string>> bundle{
      {c.input_dir() / "ground_truth.json", "ground_truth.json"},
      {out / "congest" / "breaks.json", "breaks.json"},
      {out / "features" / "feature_config.json", "feature_config.json"},
      {out / "segment" / "rules.json", "rules.json"},
      {out / "segment" / "segments.json", "segments.json"},
      {out / "train" / "tree.json", "tree.json"},
      {out / "train" / "tree.dot", "tree.dot"},
      {out / "train" / "cv.json", "cv.json"},
      {out / "eval" / "eval_report.json", "eval_report.json"},
      {out / "impact" / "impact_report.json", "impact_report.json"},
  };
  ojson summary;
  summary["seed"] = c.seed();
  auto files = ojson::array();
  for (const auto& [src, name] : bundle) {
    if (!fs::exists(src)) {
      if (name != "ground_truth.json") r.warnings.push_back("report: missing " + src.string());
      continue;
    }
    fs::copy_file(src, dir / name, fs::copy_options::overwrite_existing);
    files.push_back(name);
    r.artifacts.push_back(dir / name);
  }
  summary["files"] = files;
  if (fs::exists(out / "eval" / "eval_report.json")) {
    const auto e = read_json_file(out / "eval" / "eval_report.json");
    ojson metrics;
    for (const char* k : {"ρ", "ρ_root", "ρ_incr", "R²", "Macro-F1", "Micro-F1", "One-vs-all", "kappa", "WRG"}) {
      if (e.contains(k)) metrics[k] = e.at(k);
    }
    summary["eval"] = metrics;
  }
  if (fs::exists(c.input_dir() / "ground_truth.json")) {
    summary["implied_rho"] = read_json_file(c.input_dir() / "ground_truth.json").at("implied_rho");
  }
  if (fs::exists(out / "train" / "cv.json")) {
    summary["best_depth"] = read_json_file(out / "train" / "cv.json").at("best_depth");
  }
  if (fs::exists(out / "segment" / "rules.json")) {
    summary["rules"] = read_json_file(out / "segment" / "rules.json").at("rules").size();
  }
  if (fs::exists(out / "segment" / "segments.json")) {
    summary["segments"] = read_json_file(out / "segment" / "segments.json").at("segments").size();
  }
  summary["warnings"] = r.warnings;
  write_text(dir / "summary.json", summary.dump(2));
  r.artifacts.push_back(dir / "summary.json");
  r.summary = "report: " + std::to_string(files.size()) + " artifacts bundled -> " + dir.string();
  return r;
}

}  // namespace

StageResult run_stage(const std::string& stage, const Config& config) {
  config.validate();
  StageResult r;
  if (stage == "synth") r = stage_synth(config);
  else if (stage == "fuse") r = stage_fuse(config);
  else if (stage == "congest") r = stage_congest(config);
  else if (stage == "features") r = stage_features(config);
  else if (stage == "segment") r = stage_segment(config);
  else if (stage == "train") r = stage_train(config);
  else if (stage == "eval") r = stage_eval(config);
  else if (stage == "impact") r = stage_impact(config);
  else if (stage == "report") r = stage_report(config);
  else fail(ErrorCode::unknown_command, "unknown stage '" + stage + "'");
  r.stage = stage;
  return r;
}

}  // namespace tourkit::pipeline
