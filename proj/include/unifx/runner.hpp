#pragma once

// Configuration-driven runs and the synthetic reproduction experiments.
//
// A run config is one JSON document:
//   model         polynomial expression string
//   d             feature count
//   distribution  (default: independent standard normal)
//                 {"gaussian": {"mu": [...], "sigma": [[...]]} | {"rho": r}}
//                 or {"dataset": "path.csv"}
//   imputer       {"kind": "b"|"m"|"c", "baseline": [...], "mc_samples": n,
//                  "seed": s, "mode": "exact"|"mc"|"auto"}
//   game          {"local": {"x0": [...]}}
//                 | {"sensitivity": {"n": 500, "seed": s}}
//                 | {"risk": {"loss": "squared"|"log", "n": 500,
//                            "noise_variance": 0.01, "seed": s,
//                            "normalize": false}}
//   effects       [{"effect": ..., "type": ..., "targets": [[1], [1, 2]],
//                   "order": k, "permutations": m, "normalize": false}
//                  | {"alias": "pfi", "targets": ..., "order": k}]
//   output        {"path": "...", "format": "json"|"csv"}

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "unifx/value_function.hpp"

namespace unifx {

struct RunOutput {
  std::string report;  // JSON report (always)
  std::string output;  // report rendered in the configured format
  std::string format;  // "json" or "csv"
  std::optional<std::string> path;  // written when set
};

// Throws ConfigError (naming the offending field), ParseError, IoError or
// NumericError.
RunOutput run_config(std::string_view config_json);

struct ReproduceOptions {
  std::string experiment;  // table3, fig2_lin, fig2_int, fig_add
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  std::optional<EstimationMode> mode;  // default exact
  int repetitions = 30;
  std::size_t mc_samples = 512;
};

struct ReproduceOutput {
  std::string summary;  // JSON
  std::vector<std::string> files;
};

ReproduceOutput reproduce(const ReproduceOptions& options);

}  // namespace unifx
