#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "unifx/error.hpp"
#include "unifx/games.hpp"
#include "unifx/influence.hpp"
#include "unifx/oracle.hpp"
#include "unifx/runner.hpp"

namespace unifx {

using json = nlohmann::ordered_json;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string write_file(const std::string& dir, const std::string& name, const std::string& text) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
  const std::string path = (std::filesystem::path(dir) / name).string();
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write '" + path + "'");
  f << text;
  if (!f) throw IoError("failed writing '" + path + "'");
  return path;
}

// The nine local measures for targets {1} and {1,2}, in table row order.
std::array<double, 9> nine_measures(const GameTensor& t) {
  const int d = t.dim();
  const Coalition one = Coalition::singleton(1, d);
  const Coalition pair = Coalition::of({1, 2}, d);
  return {pure_effect(t, one, InfluenceType::individual),
          shapley_value(t).get(one),
          full_effect(t, one, InfluenceType::individual),
          pure_effect(t, pair, InfluenceType::joint),
          generalized_value(t, pair),
          full_effect(t, pair, InfluenceType::joint),
          pure_effect(t, pair, InfluenceType::interaction),
          shapley_interaction_index(t, pair),
          full_effect(t, pair, InfluenceType::interaction)};
}

ReproduceOutput run_table3(const ReproduceOptions& o) {
  const int d = 3;
  const std::vector<double> x(3, 1.0);
  auto measures_of = [&](const std::string& text) {
    ImputerConfig ic;
    ic.kind = ImputerKind::marginal;
    ic.background = GaussianSpec::standard(d);
    ic.seed = o.seed;
    ic.mc_samples = o.mc_samples;
    ic.mode = o.mode.value_or(EstimationMode::exact_moments);
    const ValueFunction vf(parse_model(text, d), ic);
    return nine_measures(local_game(vf, x));
  };
  const std::array<std::string, 4> effect_models{"x1", "x2", "x1*x2", "x1*x2*x3"};
  Eigen::Matrix<double, 9, 4> computed;
  for (int c = 0; c < 4; ++c) {
    const auto m = measures_of(effect_models[static_cast<std::size_t>(c)]);
    for (int r = 0; r < 9; ++r) computed(r, c) = m[static_cast<std::size_t>(r)];
  }
  const auto values = measures_of("x1 + x2 + x3 + x1*x2 + x1*x2*x3");
  const Eigen::Matrix<double, 9, 4> reference = oracle::table3_reference();
  const Eigen::Matrix<double, 9, 1> ref_values = reference * Eigen::Vector4d::Ones();
  const auto labels = oracle::table3_row_labels();

  double max_weight_dev = 0.0;
  double max_value_dev = 0.0;
  std::string csv =
      "influence,effect,target,w_x1,w_x2,w_x1x2,w_x1x2x3,ref_x1,ref_x2,ref_x1x2,ref_x1x2x3,value,reference_value,"
      "abs_deviation\n";
  json rows = json::array();
  for (int r = 0; r < 9; ++r) {
    const std::string target = r < 3 ? "1" : "1+2";
    csv += labels[static_cast<std::size_t>(r)] + "," + target;
    for (int c = 0; c < 4; ++c) csv += "," + fmt(computed(r, c));
    for (int c = 0; c < 4; ++c) csv += "," + fmt(reference(r, c));
    const double dev = std::abs(values[static_cast<std::size_t>(r)] - ref_values(r));
    csv += "," + fmt(values[static_cast<std::size_t>(r)]) + "," + fmt(ref_values(r)) + "," + fmt(dev) + "\n";
    max_weight_dev = std::max(max_weight_dev, (computed.row(r) - reference.row(r)).cwiseAbs().maxCoeff());
    max_value_dev = std::max(max_value_dev, dev);
    json row;
    row["measure"] = labels[static_cast<std::size_t>(r)];
    row["target"] = target;
    row["value"] = values[static_cast<std::size_t>(r)];
    row["reference"] = ref_values(r);
    rows.push_back(std::move(row));
  }
  ReproduceOutput out;
  out.files.push_back(write_file(o.out_dir, "table3.csv", csv));
  json summary;
  summary["experiment"] = "table3";
  summary["mode"] = to_string(o.mode.value_or(EstimationMode::exact_moments));
  summary["max_abs_weight_deviation"] = max_weight_dev;
  summary["max_abs_value_deviation"] = max_value_dev;
  summary["max_abs_deviation"] = std::max(max_weight_dev, max_value_dev);
  summary["rows"] = std::move(rows);
  summary["files"] = out.files;
  out.summary = summary.dump(2) + "\n";
  return out;
}

struct Stats {
  double mean = 0.0, std = 0.0, min = 0.0, max = 0.0;
};

Stats stats_of(const std::vector<double>& v) {
  Stats s;
  s.min = *std::min_element(v.begin(), v.end());
  s.max = *std::max_element(v.begin(), v.end());
  for (double e : v) s.mean += e;
  s.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double e : v) ss += (e - s.mean) * (e - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return s;
}

ReproduceOutput run_fig(const ReproduceOptions& o) {
  const int d = 4;
  std::string text;
  if (o.experiment == "fig2_lin") text = "2*x1 + 2*x2 + 2*x3";
  if (o.experiment == "fig2_int") text = "2*x1 + 2*x2 + 2*x3 + x1*x2 + x1*x2*x3";
  if (o.experiment == "fig_add") text = "2*x1 + x2^2 + x3^3";
  const ModelExpr model = parse_model(text, d);
  const std::vector<double> x(4, 1.0);
  const std::array<double, 3> rhos{0.0, 0.5, 0.9};
  const std::array<ImputerKind, 3> kinds{ImputerKind::baseline, ImputerKind::marginal, ImputerKind::conditional};
  const std::array<const char*, 3> kind_names{"b", "m", "c"};
  const std::array<const char*, 3> effect_names{"pure", "partial", "full"};
  const EstimationMode mode = o.mode.value_or(EstimationMode::exact_moments);
  if (o.repetitions < 1) throw InvalidArgument("at least one repetition is required");

  std::string csv = "rho,imputer,feature,effect,mean,std,min,max,repetitions\n";
  json rows = json::array();
  json panels = json::array();
  for (double rho : rhos) {
    const GaussianSpec spec = GaussianSpec::equicorrelated(d, rho);
    // values[kind][effect][feature] over repetitions
    std::vector<double> values[3][3][4];
    for (int rep = 0; rep < o.repetitions; ++rep) {
      const std::uint64_t seed = o.seed + static_cast<std::uint64_t>(rep);
      for (int k = 0; k < 3; ++k) {
        ImputerConfig ic;
        ic.kind = kinds[static_cast<std::size_t>(k)];
        ic.background = spec;
        ic.seed = seed;
        ic.mc_samples = o.mc_samples;
        ic.mode = mode;
        if (ic.kind == ImputerKind::baseline) {
          if (mode == EstimationMode::exact_moments) {
            ic.baseline = std::vector<double>(spec.mu.data(), spec.mu.data() + d);
          } else {
            const Eigen::VectorXd means =
                sample(spec, o.mc_samples, seed, StreamPurpose::background).colwise().mean().transpose();
            ic.baseline = std::vector<double>(means.data(), means.data() + d);
          }
        }
        const ValueFunction vf(model, ic);
        const GameTensor t = local_game(vf, x);
        const InteractionValues sv = shapley_value(t);
        for (int i = 1; i <= d; ++i) {
          const Coalition s = Coalition::singleton(i, d);
          values[k][0][i - 1].push_back(pure_effect(t, s, InfluenceType::individual));
          values[k][1][i - 1].push_back(sv.get(s));
          values[k][2][i - 1].push_back(full_effect(t, s, InfluenceType::individual));
        }
      }
    }
    json panel;
    panel["rho"] = rho;
    json features = json::array();
    for (int i = 0; i < d; ++i) {
      json feature;
      feature["feature"] = i + 1;
      json bars = json::array();
      for (int k = 0; k < 3; ++k) {
        for (int e = 0; e < 3; ++e) {
          const Stats st = stats_of(values[k][e][i]);
          csv += fmt(rho) + "," + kind_names[static_cast<std::size_t>(k)] + "," + std::to_string(i + 1) + "," +
                 effect_names[static_cast<std::size_t>(e)] + "," + fmt(st.mean) + "," + fmt(st.std) + "," +
                 fmt(st.min) + "," + fmt(st.max) + "," + std::to_string(o.repetitions) + "\n";
          json row;
          row["rho"] = rho;
          row["imputer"] = kind_names[static_cast<std::size_t>(k)];
          row["feature"] = i + 1;
          row["effect"] = effect_names[static_cast<std::size_t>(e)];
          row["mean"] = st.mean;
          row["std"] = st.std;
          row["min"] = st.min;
          row["max"] = st.max;
          rows.push_back(row);
          json bar;
          bar["imputer"] = kind_names[static_cast<std::size_t>(k)];
          bar["effect"] = effect_names[static_cast<std::size_t>(e)];
          bar["mean"] = st.mean;
          bar["error"] = st.std;
          bars.push_back(std::move(bar));
        }
      }
      feature["bars"] = std::move(bars);
      features.push_back(std::move(feature));
    }
    panel["features"] = std::move(features);
    panels.push_back(std::move(panel));
  }

  json plot;
  plot["experiment"] = o.experiment;
  plot["model"] = text;
  plot["x"] = x;
  plot["kind"] = "grouped_bar";
  plot["x_axis"] = "feature";
  plot["y_axis"] = "individual effect";
  plot["error_bars"] = "standard deviation over repetitions";
  plot["panels"] = std::move(panels);

  ReproduceOutput out;
  out.files.push_back(write_file(o.out_dir, o.experiment + ".csv", csv));
  out.files.push_back(write_file(o.out_dir, o.experiment + "_plot.json", plot.dump(2) + "\n"));
  json summary;
  summary["experiment"] = o.experiment;
  summary["model"] = text;
  summary["mode"] = to_string(mode);
  summary["repetitions"] = o.repetitions;
  summary["seed"] = o.seed;
  summary["seed_semantics"] =
      "repetition r uses imputer/background seed seed+r; the distribution and the explained point are fixed";
  summary["rows"] = std::move(rows);
  summary["files"] = out.files;
  out.summary = summary.dump(2) + "\n";
  return out;
}

}  // namespace

ReproduceOutput reproduce(const ReproduceOptions& options) {
  if (options.experiment == "table3") return run_table3(options);
  if (options.experiment == "fig2_lin" || options.experiment == "fig2_int" || options.experiment == "fig_add") {
    return run_fig(options);
  }
  throw ConfigError("experiment: unknown tag '" + options.experiment +
                    "'; available: table3, fig2_lin, fig2_int, fig_add");
}

}  // namespace unifx
