// Command-line front end. Talks to the library only through tourkit.h.
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tourkit/tourkit.h"

namespace {

const std::vector<std::string> kStages{"synth", "fuse",  "congest", "features", "segment",
                                       "train", "eval",  "impact",  "report"};

int report_error(tk_status status, const std::string& message) {
  nlohmann::ordered_json j;
  j["error"] = {{"code", tk_status_name(status)},
                {"status", static_cast<int>(status)},
                {"message", message}};
  std::cerr << j.dump() << '\n';
  return static_cast<int>(status);
}

struct Overrides {
  std::optional<std::string> config_path;
  std::optional<unsigned long long> seed;
  std::optional<std::string> out, input_dir, spec;
  std::optional<long long> n_tours;
  std::optional<double> class_noise;
  std::optional<int> window_steps, jenks_classes;
  std::optional<double> radius_m, test_fraction;
  std::optional<bool> rebin_departure;
  std::optional<double> min_support, min_confidence, confidence_floor;
  std::optional<int> min_rule_size;
  std::optional<std::string> class_target, numeric_target, secondary_mode;
  std::optional<std::vector<std::string>> attributes;
  std::optional<std::vector<int>> max_depth_grid;
  std::optional<int> min_samples_leaf, cv_folds;
  std::optional<bool> oversample;
  std::vector<std::string> sets;  // key=json
};

void add_options(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config_path, "JSON config file");
  app->add_option("--seed", o.seed, "top-level seed");
  app->add_option("--out", o.out, "output directory");
  app->add_option("--input-dir", o.input_dir, "raw data directory (default <out>/synth)");
  app->add_option("--spec", o.spec, "generator spec JSON (synth)");
  app->add_option("--n-tours", o.n_tours, "number of synthetic tours");
  app->add_option("--class-noise", o.class_noise, "synthetic class noise rate");
  app->add_option("--window-steps", o.window_steps, "speed smoothing window in samples");
  app->add_option("--jenks-classes", o.jenks_classes, "natural-breaks classes for proximity");
  app->add_option("--radius-m", o.radius_m, "congestion proximity radius in meters");
  app->add_option("--test-fraction", o.test_fraction, "held-out share of tours");
  app->add_option("--rebin-departure", o.rebin_departure, "re-derive departure edges from data");
  app->add_option("--min-support", o.min_support, "apriori minimum support");
  app->add_option("--min-confidence", o.min_confidence, "apriori minimum confidence");
  app->add_option("--min-rule-size", o.min_rule_size, "minimum |A|+|B|");
  app->add_option("--confidence-floor", o.confidence_floor, "segment edge confidence");
  app->add_option("--class-target", o.class_target, "tour_type or departure_class");
  app->add_option("--numeric-target", o.numeric_target, "n_stops or none");
  app->add_option("--attributes", o.attributes, "tree covariates")->delimiter(',');
  app->add_option("--max-depth-grid", o.max_depth_grid, "depths tried by CV")->delimiter(',');
  app->add_option("--min-samples-leaf", o.min_samples_leaf, "smallest allowed child");
  app->add_option("--cv-folds", o.cv_folds, "cross-validation folds");
  app->add_option("--secondary-mode", o.secondary_mode,
                  "precedence_IG, precedence_SSR or distance");
  app->add_option("--oversample", o.oversample, "oversample minority classes");
  app->add_option("--set", o.sets, "raw override key.path=<json>");
}

// Error carried out of the C API calls.
struct Failure {
  tk_status status;
  std::string message;
};

void check(tk_status s) {
  if (s != TK_OK) throw Failure{s, tk_last_error()};
}

template <typename T>
void set_json(tk_config* cfg, const char* key, const std::optional<T>& value) {
  if (!value) return;
  check(tk_config_set(cfg, key, nlohmann::json(*value).dump().c_str()));
}

tk_config* build_config(const Overrides& o) {
  tk_config* cfg = nullptr;
  if (o.config_path) {
    check(tk_config_load(o.config_path->c_str(), &cfg));
  } else {
    check(tk_config_new(&cfg));
  }
  try {
    set_json(cfg, "seed", o.seed);
    set_json(cfg, "out", o.out);
    set_json(cfg, "input_dir", o.input_dir);
    set_json(cfg, "synth.spec", o.spec);
    set_json(cfg, "synth.n_tours", o.n_tours);
    set_json(cfg, "synth.class_noise", o.class_noise);
    set_json(cfg, "congestion.window_steps", o.window_steps);
    set_json(cfg, "congestion.jenks_classes", o.jenks_classes);
    set_json(cfg, "congestion.radius_m", o.radius_m);
    set_json(cfg, "features.test_fraction", o.test_fraction);
    set_json(cfg, "features.rebin_departure", o.rebin_departure);
    set_json(cfg, "rulemine.min_support", o.min_support);
    set_json(cfg, "rulemine.min_confidence", o.min_confidence);
    set_json(cfg, "rulemine.min_rule_size", o.min_rule_size);
    set_json(cfg, "rulemine.confidence_floor", o.confidence_floor);
    set_json(cfg, "mtdt.class_target", o.class_target);
    if (o.numeric_target) {
      const auto v = *o.numeric_target == "none" ? std::string("null")
                                                 : nlohmann::json(*o.numeric_target).dump();
      check(tk_config_set(cfg, "mtdt.numeric_target", v.c_str()));
    }
    set_json(cfg, "mtdt.attributes", o.attributes);
    set_json(cfg, "mtdt.max_depth_grid", o.max_depth_grid);
    set_json(cfg, "mtdt.min_samples_leaf", o.min_samples_leaf);
    set_json(cfg, "mtdt.cv_folds", o.cv_folds);
    set_json(cfg, "mtdt.secondary_mode", o.secondary_mode);
    set_json(cfg, "mtdt.oversample", o.oversample);
    for (const auto& s : o.sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw Failure{TK_INVALID_ARGUMENT, "--set expects key=json: " + s};
      check(tk_config_set(cfg, s.substr(0, eq).c_str(), s.substr(eq + 1).c_str()));
    }
  } catch (...) {
    tk_config_free(cfg);
    throw;
  }
  return cfg;
}

void run(tk_config* cfg, const std::string& stage) {
  char* summary = nullptr;
  check(tk_run_stage(cfg, stage.c_str(), &summary));
  const auto j = nlohmann::json::parse(summary);
  tk_string_free(summary);
  std::cout << j.at("summary").get<std::string>() << std::endl;
  const auto& warnings = j.at("warnings");
  const std::size_t shown = std::min<std::size_t>(warnings.size(), 5);
  for (std::size_t i = 0; i < shown; ++i) {
    std::cerr << "warning: " << warnings[i].get<std::string>() << '\n';
  }
  if (warnings.size() > shown) {
    std::cerr << "warning: ... " << warnings.size() - shown << " more\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1 && argv[1][0] != '-') {
    const std::string cmd = argv[1];
    if (std::find(kStages.begin(), kStages.end(), cmd) == kStages.end() && cmd != "all" &&
        cmd != "predict" && cmd != "config") {
      return report_error(TK_UNKNOWN_COMMAND, "unknown subcommand '" + cmd + "'");
    }
  }

  CLI::App app{"tourkit: freight tour analytics pipeline"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(tk_version()));
  Overrides o;
  std::vector<std::pair<std::string, CLI::App*>> stage_cmds;
  for (const auto& s : kStages) {
    auto* sub = app.add_subcommand(s, "run the " + s + " stage");
    add_options(sub, o);
    stage_cmds.push_back({s, sub});
  }
  auto* all = app.add_subcommand("all", "run every stage in order");
  add_options(all, o);
  auto* show = app.add_subcommand("config", "print the effective configuration");
  add_options(show, o);
  std::string tree_path;
  std::vector<std::string> values;
  auto* predict = app.add_subcommand("predict", "predict one row with a trained tree");
  predict->add_option("--tree", tree_path, "tree.json")->required();
  predict->add_option("values", values, "attribute=level pairs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error(TK_INVALID_ARGUMENT, e.what());
  }

  try {
    if (*predict) {
      tk_tree* tree = nullptr;
      check(tk_tree_load(tree_path.c_str(), &tree));
      std::vector<std::string> names, levels;
      for (const auto& v : values) {
        const auto eq = v.find('=');
        if (eq == std::string::npos) {
          tk_tree_free(tree);
          throw Failure{TK_INVALID_ARGUMENT, "expected attribute=level, got '" + v + "'"};
        }
        names.push_back(v.substr(0, eq));
        levels.push_back(v.substr(eq + 1));
      }
      std::vector<const char*> n_ptr, l_ptr;
      for (std::size_t i = 0; i < names.size(); ++i) {
        n_ptr.push_back(names[i].c_str());
        l_ptr.push_back(levels[i].c_str());
      }
      char* out = nullptr;
      const auto st = tk_tree_predict(tree, names.size(), n_ptr.data(), l_ptr.data(), &out);
      tk_tree_free(tree);
      check(st);
      std::cout << out << std::endl;
      tk_string_free(out);
      return 0;
    }
    tk_config* cfg = build_config(o);
    try {
      if (*show) {
        char* text = nullptr;
        check(tk_config_to_json(cfg, &text));
        std::cout << text << std::endl;
        tk_string_free(text);
      } else if (*all) {
        for (const auto& s : kStages) run(cfg, s);
      } else {
        for (const auto& [name, sub] : stage_cmds) {
          if (*sub) run(cfg, name);
        }
      }
    } catch (...) {
      tk_config_free(cfg);
      throw;
    }
    tk_config_free(cfg);
  } catch (const Failure& f) {
    return report_error(f.status, f.message);
  }
  return 0;
}
