#include "tourkit/tourkit.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include <json.hpp>

#include "core/error.hpp"
#include "mtdt/tree.hpp"
#include "mtdt/tree_io.hpp"
#include "pipeline/pipeline.hpp"

struct tk_config {
  tourkit::pipeline::Config config;
};

struct tk_tree {
  tourkit::mtdt::MultiTaskTree tree;
};

namespace {

thread_local std::string last_error;

char* copy_out(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

template <typename F>
tk_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return TK_OK;
  } catch (const tourkit::Error& e) {
    last_error = e.what();
    return static_cast<tk_status>(static_cast<int>(e.code()));
  } catch (const nlohmann::json::exception& e) {
    last_error = e.what();
    return TK_PARSE;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return TK_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return TK_INTERNAL;
  } catch (...) {
    last_error = "unknown failure";
    return TK_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) tourkit::fail(tourkit::ErrorCode::invalid_argument, std::string(what) + " is NULL");
}

}  // namespace

extern "C" {

const char* tk_version(void) { return "0.1.0"; }

const char* tk_status_name(tk_status status) {
  switch (status) {
    case TK_OK: return "ok";
    case TK_INVALID_ARGUMENT: return "invalid_argument";
    case TK_IO: return "io";
    case TK_PARSE: return "parse";
    case TK_VALIDATION: return "validation";
    case TK_DOMAIN: return "domain";
    case TK_UNKNOWN_COMMAND: return "unknown_command";
    case TK_CONFIG: return "config";
    case TK_INTERNAL: return "internal";
  }
  return "internal";
}

const char* tk_last_error(void) { return last_error.c_str(); }

void tk_string_free(char* text) { std::free(text); }

tk_status tk_config_new(tk_config** out) {
  return guarded([&] {
    need(out, "out");
    *out = new tk_config{};
  });
}

tk_status tk_config_load(const char* path, tk_config** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new tk_config{tourkit::pipeline::Config::load(path)};
  });
}

tk_status tk_config_from_json(const char* json, tk_config** out) {
  return guarded([&] {
    need(json, "json");
    need(out, "out");
    *out = new tk_config{tourkit::pipeline::Config::from_json(json)};
  });
}

tk_status tk_config_set(tk_config* config, const char* key_path, const char* json_value) {
  return guarded([&] {
    need(config, "config");
    need(key_path, "key_path");
    need(json_value, "json_value");
    nlohmann::json value;
    try {
      value = nlohmann::json::parse(json_value);
    } catch (const nlohmann::json::exception&) {
      tourkit::fail(tourkit::ErrorCode::parse,
                    std::string("value for '") + key_path + "' is not JSON: " + json_value);
    }
    config->config.set(key_path, value);
  });
}

tk_status tk_config_to_json(const tk_config* config, char** out) {
  return guarded([&] {
    need(config, "config");
    need(out, "out");
    *out = copy_out(config->config.dump());
  });
}

void tk_config_free(tk_config* config) { delete config; }

tk_status tk_run_stage(const tk_config* config, const char* stage, char** summary) {
  return guarded([&] {
    need(config, "config");
    need(stage, "stage");
    const auto r = tourkit::pipeline::run_stage(stage, config->config);
    if (summary) {
      nlohmann::ordered_json j;
      j["stage"] = r.stage;
      j["summary"] = r.summary;
      auto artifacts = nlohmann::ordered_json::array();
      for (const auto& a : r.artifacts) artifacts.push_back(a.string());
      j["artifacts"] = artifacts;
      j["warnings"] = r.warnings;
      *summary = copy_out(j.dump());
    }
  });
}

tk_status tk_tree_load(const char* path, tk_tree** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new tk_tree{tourkit::mtdt::load_tree(path)};
  });
}

tk_status tk_tree_predict(const tk_tree* tree, size_t n, const char* const* attributes,
                          const char* const* levels, char** out) {
  return guarded([&] {
    need(tree, "tree");
    need(out, "out");
    if (n) {
      need(attributes, "attributes");
      need(levels, "levels");
    }
    const auto& t = tree->tree;
    std::vector<int> row(t.attributes.size(), -1);
    for (size_t i = 0; i < n; ++i) {
      need(attributes[i], "attribute name");
      need(levels[i], "level");
      const std::string name = attributes[i];
      std::size_t a = 0;
      while (a < t.attributes.size() && t.attributes[a].name != name) ++a;
      if (a == t.attributes.size()) {
        tourkit::fail(tourkit::ErrorCode::invalid_argument, "unknown attribute '" + name + "'");
      }
      const auto& lv = t.attributes[a].levels;
      const auto it = std::find(lv.begin(), lv.end(), std::string(levels[i]));
      if (it == lv.end()) {
        tourkit::fail(tourkit::ErrorCode::invalid_argument,
                      std::string("unknown level '") + levels[i] + "' for '" + name + "'");
      }
      row[a] = static_cast<int>(it - lv.begin());
    }
    const auto p = tourkit::mtdt::predict(t, row);
    nlohmann::ordered_json j;
    j["leaf"] = p.leaf_id;
    j["class"] = t.classes[static_cast<std::size_t>(p.predicted_class)];
    nlohmann::ordered_json dist;
    for (std::size_t c = 0; c < t.classes.size(); ++c) dist[t.classes[c]] = p.distribution[c];
    j["distribution"] = dist;
    if (t.has_numeric) j[t.numeric_target] = p.numeric;
    *out = copy_out(j.dump());
  });
}

void tk_tree_free(tk_tree* tree) { delete tree; }

}  // extern "C"
