// Command-line front end. Builds a run configuration from a JSON file and/or
// flags and hands it to the C API.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "unifx/unifx.h"

namespace {

using json = nlohmann::ordered_json;

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

int exit_code(unifx_status s) {
  switch (s) {
    case UNIFX_OK: return 0;
    case UNIFX_ERR_NUMERIC: return kExitNumeric;
    case UNIFX_ERR_INTERNAL: return 1;
    default: return kExitConfig;
  }
}

int report_failure(unifx_status s) {
  std::cerr << "unifx: " << unifx_status_name(s) << ": " << unifx_last_error() << "\n";
  return exit_code(s);
}

struct ConfigFailure {
  std::string message;
};

std::vector<double> parse_floats(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
      while (used < cell.size() && cell[used] == ' ') ++used;
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw ConfigFailure{flag + ": '" + cell + "' is not a number"};
    }
  }
  if (out.empty()) throw ConfigFailure{flag + ": expected comma-separated numbers"};
  return out;
}

// "1+2,3" -> [[1,2],[3]]
json parse_targets(const std::string& text) {
  json out = json::array();
  std::stringstream ss(text);
  std::string group;
  while (std::getline(ss, group, ',')) {
    json c = json::array();
    std::stringstream gs(group);
    std::string f;
    while (std::getline(gs, f, '+')) {
      try {
        c.push_back(std::stoi(f));
      } catch (const std::exception&) {
        throw ConfigFailure{"--targets: '" + group + "' is not a coalition like 1+2"};
      }
    }
    out.push_back(c);
  }
  return out;
}

// Values that parse as JSON keep their type; anything else is a string.
json scalar(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error&) {
    return json(text);
  }
}

void set_dotted(json& root, const std::string& dotted, json value) {
  json* node = &root;
  std::stringstream ss(dotted);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  if (parts.empty()) throw ConfigFailure{"empty override path"};
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!node->is_object()) *node = json::object();
    node = &(*node)[parts[i]];
  }
  if (!node->is_object()) *node = json::object();
  (*node)[parts.back()] = std::move(value);
}

std::string game_key(const json& cfg) {
  if (cfg.contains("game") && cfg["game"].is_object() && cfg["game"].size() == 1) {
    return cfg["game"].begin().key();
  }
  return "";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feature-attribution games: effects, sensitivity and risk measures"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(unifx_version()));

  // run
  auto* run = app.add_subcommand("run", "compute effects for one configuration");
  run->allow_extras();
  std::string config_path, model, imputer, baseline, game, x0, effect, type, targets, output, format, mode, alias,
      dataset, loss;
  std::optional<int> d, order, n;
  std::optional<double> rho;
  std::optional<long long> samples, permutations;
  std::optional<unsigned long long> seed;
  run->add_option("--config", config_path, "JSON configuration file");
  run->add_option("--model", model, "model expression, e.g. \"2*x1 + x1*x2\"");
  run->add_option("--d", d, "feature count");
  run->add_option("--rho", rho, "equicorrelated Gaussian with unit variances");
  run->add_option("--dataset", dataset, "CSV background / evaluation data");
  run->add_option("--imputer", imputer, "b, m or c");
  run->add_option("--baseline", baseline, "comma-separated baseline point");
  run->add_option("--game", game, "local, sensitivity or risk");
  run->add_option("--x0", x0, "comma-separated point to explain (local game)");
  run->add_option("--n", n, "evaluation points (sensitivity and risk games)");
  run->add_option("--loss", loss, "squared or log (risk game)");
  run->add_option("--effect", effect, "pure, partial or full");
  run->add_option("--type", type, "individual, joint or interaction");
  run->add_option("--targets", targets, "coalitions, e.g. 1,2,1+2");
  run->add_option("--order", order, "interaction order k");
  run->add_option("--alias", alias, "method alias (see `aliases`)");
  run->add_option("--permutations", permutations, "sample the Shapley value with this many permutations");
  run->add_option("--samples", samples, "Monte Carlo samples per value");
  run->add_option("--seed", seed, "master seed");
  run->add_option("--mode", mode, "exact, mc or auto");
  run->add_option("--output", output, "output file (default: stdout)");
  run->add_option("--format", format, "csv or json");

  // reproduce
  auto* rep = app.add_subcommand("reproduce", "rerun a synthetic experiment");
  std::string experiment, out_dir = ".", rep_mode;
  unsigned long long rep_seed = 0;
  int repetitions = 30;
  long long rep_samples = 512;
  rep->add_option("experiment", experiment, "table3, fig2_lin, fig2_int or fig_add")->required();
  rep->add_option("--seed", rep_seed, "base seed; repetition r uses seed + r");
  rep->add_option("--out-dir", out_dir, "directory for CSV and plot files");
  rep->add_option("--mode", rep_mode, "exact (default) or mc");
  rep->add_option("--repetitions", repetitions, "number of seeds");
  rep->add_option("--samples", rep_samples, "Monte Carlo samples (mc mode)");

  // aliases
  auto* ali = app.add_subcommand("aliases", "list the method-alias registry");
  bool aliases_json = false;
  ali->add_flag("--json", aliases_json, "print JSON instead of a table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (*ali) {
    char* out = nullptr;
    const unifx_status s = unifx_aliases(&out);
    if (s != UNIFX_OK) return report_failure(s);
    const json list = json::parse(out);
    unifx_string_free(out);
    if (aliases_json) {
      std::cout << list.dump(2) << "\n";
      return 0;
    }
    std::printf("%-20s %-12s %-24s %-8s %-12s %s\n", "name", "game", "imputers", "effect", "type", "description");
    for (const auto& a : list) {
      std::string imps;
      for (const auto& k : a["imputers"]) imps += (imps.empty() ? "" : ",") + k.get<std::string>();
      std::string game_name = a["game"].get<std::string>();
      if (a["normalized_game"].get<bool>()) game_name += "*";
      std::printf("%-20s %-12s %-24s %-8s %-12s %s\n", a["name"].get<std::string>().c_str(), game_name.c_str(),
                  imps.c_str(), a["effect"].get<std::string>().c_str(), a["type"].get<std::string>().c_str(),
                  a["description"].get<std::string>().c_str());
    }
    std::printf("(* normalised at the empty coalition)\n");
    return 0;
  }

  if (*rep) {
    char* summary = nullptr;
    const unifx_status s =
        unifx_reproduce(experiment.c_str(), rep_seed, out_dir.c_str(), rep_mode.empty() ? nullptr : rep_mode.c_str(),
                        repetitions, rep_samples > 0 ? static_cast<size_t>(rep_samples) : 0, &summary);
    if (s != UNIFX_OK) return report_failure(s);
    std::cout << summary;
    unifx_string_free(summary);
    return 0;
  }

  json cfg = json::object();
  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ConfigFailure{"--config: cannot open '" + config_path + "'"};
      try {
        cfg = json::parse(in);
      } catch (const json::parse_error& e) {
        throw ConfigFailure{"--config: " + std::string(e.what())};
      }
    }
    if (!model.empty()) cfg["model"] = model;
    if (d) cfg["d"] = *d;
    if (rho) cfg["distribution"] = json{{"gaussian", json{{"rho", *rho}}}};
    if (!dataset.empty()) cfg["distribution"] = json{{"dataset", dataset}};
    if (!imputer.empty()) set_dotted(cfg, "imputer.kind", imputer);
    if (!baseline.empty()) set_dotted(cfg, "imputer.baseline", parse_floats(baseline, "--baseline"));
    if (samples) set_dotted(cfg, "imputer.mc_samples", *samples);
    if (seed) set_dotted(cfg, "imputer.seed", *seed);
    if (!mode.empty()) set_dotted(cfg, "imputer.mode", mode);
    if (!game.empty() && game_key(cfg) != game) cfg["game"] = json{{game, json::object()}};
    if (!x0.empty()) {
      if (game_key(cfg).empty()) cfg["game"] = json{{"local", json::object()}};
      if (game_key(cfg) != "local") throw ConfigFailure{"--x0: applies to the local game only"};
      cfg["game"]["local"]["x0"] = parse_floats(x0, "--x0");
    }
    if (n) {
      const std::string g = game_key(cfg);
      if (g != "sensitivity" && g != "risk") throw ConfigFailure{"--n: applies to sensitivity and risk games"};
      cfg["game"][g]["n"] = *n;
    }
    if (!loss.empty()) {
      if (game_key(cfg) != "risk") throw ConfigFailure{"--loss: applies to the risk game only"};
      cfg["game"]["risk"]["loss"] = loss;
    }
    if (!alias.empty() || !effect.empty() || !type.empty()) {
      json req = json::object();
      if (!alias.empty()) {
        req["alias"] = alias;
      } else {
        req["effect"] = effect.empty() ? "partial" : effect;
        req["type"] = type.empty() ? "individual" : type;
      }
      if (!targets.empty()) req["targets"] = parse_targets(targets);
      if (order) req["order"] = *order;
      if (permutations) req["permutations"] = *permutations;
      cfg["effects"] = json::array({req});
    } else if (!targets.empty() || order || permutations) {
      if (!cfg.contains("effects") || !cfg["effects"].is_array()) {
        throw ConfigFailure{"--targets/--order/--permutations need --effect, --alias or effects in --config"};
      }
      for (auto& req : cfg["effects"]) {
        if (!targets.empty()) req["targets"] = parse_targets(targets);
        if (order) req["order"] = *order;
        if (permutations) req["permutations"] = *permutations;
      }
    }
    if (!output.empty()) set_dotted(cfg, "output.path", output);
    if (!format.empty()) set_dotted(cfg, "output.format", format);

    // Remaining "--dotted.path value" pairs override config fields.
    const std::vector<std::string> extras = run->remaining();
    for (std::size_t i = 0; i < extras.size(); ++i) {
      const std::string& flag = extras[i];
      if (flag.rfind("--", 0) != 0 || flag.size() <= 2) throw ConfigFailure{"unexpected argument '" + flag + "'"};
      std::string key = flag.substr(2);
      std::string value;
      if (const auto eq = key.find('='); eq != std::string::npos) {
        value = key.substr(eq + 1);
        key = key.substr(0, eq);
      } else {
        if (i + 1 >= extras.size()) throw ConfigFailure{flag + ": missing value"};
        value = extras[++i];
      }
      set_dotted(cfg, key, scalar(value));
    }
  } catch (const ConfigFailure& e) {
    std::cerr << "unifx: configuration error: " << e.message << "\n";
    return kExitConfig;
  }

  char* out = nullptr;
  const unifx_status s = unifx_run(cfg.dump().c_str(), &out, nullptr);
  if (s != UNIFX_OK) return report_failure(s);
  const bool to_file = cfg.contains("output") && cfg["output"].is_object() && cfg["output"].contains("path");
  if (to_file) {
    std::cerr << "wrote " << cfg["output"]["path"].get<std::string>() << "\n";
  } else {
    std::cout << out;
  }
  unifx_string_free(out);
  return 0;
}
