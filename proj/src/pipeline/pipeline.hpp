#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace tourkit::pipeline {

inline const std::vector<std::string>& stage_names() {
  static const std::vector<std::string> names{"synth",   "fuse",  "congest", "features", "segment",
                                              "train",   "eval",  "impact",  "report"};
  return names;
}

// JSON configuration with defaults for every key. Unknown keys are rejected.
class Config {
 public:
  Config();

  static Config from_json(const std::string& text);
  static Config load(const std::filesystem::path& path);

  // Sets a dotted key ("rulemine.min_support") to a JSON value.
  void set(const std::string& key_path, const nlohmann::json& value);
  void validate() const;

  const nlohmann::json& doc() const { return doc_; }
  std::string dump() const { return doc_.dump(2); }

  std::uint64_t seed() const;
  std::filesystem::path out() const;
  // Raw-data directory: input_dir when set, otherwise the synth output.
  std::filesystem::path input_dir() const;

 private:
  nlohmann::json doc_;
};

nlohmann::json default_config();

struct StageResult {
  std::string stage;
  std::string summary;  // one line
  std::vector<std::filesystem::path> artifacts;
  std::vector<std::string> warnings;
};

StageResult run_stage(const std::string& stage, const Config& config);

}  // namespace tourkit::pipeline
