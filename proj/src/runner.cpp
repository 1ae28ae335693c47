#include "unifx/runner.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <map>
#include <set>

#include "unifx/aliases.hpp"
#include "unifx/error.hpp"
#include "unifx/games.hpp"
#include "unifx/influence.hpp"
#include "unifx/model.hpp"

namespace unifx {

using json = nlohmann::ordered_json;

namespace {

// Path-aware view of a JSON value; every error names the field.
class Field {
 public:
  Field(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

  const std::string& path() const { return path_; }
  const json& raw() const { return j_; }

  [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(path_ + ": " + msg); }

  bool has(const char* key) const { return j_.is_object() && j_.contains(key) && !j_.at(key).is_null(); }

  Field at(const char* key) const {
    if (!j_.is_object()) fail("expected an object");
    if (!j_.contains(key) || j_.at(key).is_null()) {
      throw ConfigError(child(key) + ": required field is missing");
    }
    return Field(j_.at(key), child(key));
  }

  Field at(std::size_t i) const { return Field(j_.at(i), path_ + "[" + std::to_string(i) + "]"); }

  void allow(std::initializer_list<const char*> keys) const {
    if (!j_.is_object()) fail("expected an object");
    for (const auto& item : j_.items()) {
      if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return item.key() == k; })) {
        throw ConfigError(child(item.key().c_str()) + ": unknown field");
      }
    }
  }

  std::string str() const {
    if (!j_.is_string()) fail("expected a string");
    return j_.get<std::string>();
  }

  std::string choice(std::initializer_list<const char*> options) const {
    const std::string v = str();
    std::string listed;
    for (const char* o : options) {
      if (v == o) return v;
      if (!listed.empty()) listed += ", ";
      listed += o;
    }
    fail("expected one of " + listed + ", got \"" + v + "\"");
  }

  double num() const {
    if (!j_.is_number()) fail("expected a number");
    const double v = j_.get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
  }

  std::int64_t integer(std::int64_t lo, std::int64_t hi) const {
    if (!j_.is_number_integer() && !(j_.is_number_float() && std::floor(j_.get<double>()) == j_.get<double>())) {
      fail("expected an integer");
    }
    const auto v = j_.is_number_unsigned() ? static_cast<std::int64_t>(std::min<std::uint64_t>(
                                                 j_.get<std::uint64_t>(), static_cast<std::uint64_t>(INT64_MAX)))
                                           : j_.get<std::int64_t>();
    if (v < lo || v > hi) fail("expected an integer in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return v;
  }

  std::uint64_t seed() const {
    if (j_.is_number_unsigned()) return j_.get<std::uint64_t>();
    return static_cast<std::uint64_t>(integer(0, INT64_MAX));
  }

  bool boolean() const {
    if (!j_.is_boolean()) fail("expected true or false");
    return j_.get<bool>();
  }

  std::vector<double> vec(std::size_t expected) const {
    if (!j_.is_array()) fail("expected an array of numbers");
    if (j_.size() != expected) {
      fail("expected " + std::to_string(expected) + " values, got " + std::to_string(j_.size()));
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < j_.size(); ++i) out.push_back(at(i).num());
    return out;
  }

  std::size_t size() const {
    if (!j_.is_array()) fail("expected an array");
    return j_.size();
  }

 private:
  std::string child(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  const json& j_;
  std::string path_;
};

struct Request {
  std::string source_path;  // effects[i]
  Effect effect = Effect::pure;
  InfluenceType type = InfluenceType::individual;
  std::vector<Coalition> targets;
  std::optional<int> order;
  std::optional<std::size_t> permutations;
  bool normalize = false;
  bool normalized_game = false;
  AliasMeasure measure = AliasMeasure::effect;
  std::string method;
};

struct Row {
  std::string effect;
  std::string type;
  Coalition coalition;
  double value = 0.0;
  std::optional<double> std_error;
  std::string method;
  std::uint64_t evaluations = 0;
  bool degenerate = false;
};

Effect parse_effect(const Field& f) {
  const std::string v = f.choice({"pure", "partial", "full"});
  return v == "pure" ? Effect::pure : v == "partial" ? Effect::partial : Effect::full;
}

InfluenceType parse_type(const Field& f) {
  const std::string v = f.choice({"individual", "joint", "interaction"});
  return v == "individual" ? InfluenceType::individual
         : v == "joint"    ? InfluenceType::joint
                           : InfluenceType::interaction;
}

ImputerKind parse_imputer(const Field& f) {
  const std::string v = f.choice({"b", "m", "c", "baseline", "marginal", "conditional"});
  if (v == "b" || v == "baseline") return ImputerKind::baseline;
  if (v == "m" || v == "marginal") return ImputerKind::marginal;
  return ImputerKind::conditional;
}

const char* imputer_letter(ImputerKind k) {
  switch (k) {
    case ImputerKind::baseline: return "b";
    case ImputerKind::marginal: return "m";
    case ImputerKind::conditional: return "c";
  }
  return "m";
}

Coalition parse_coalition(const Field& f, int d) {
  std::vector<int> feats;
  if (f.raw().is_number()) {
    feats.push_back(static_cast<int>(f.integer(1, d)));
  } else {
    const std::size_t n = f.size();
    if (n == 0) f.fail("coalition must not be empty");
    for (std::size_t i = 0; i < n; ++i) feats.push_back(static_cast<int>(f.at(i).integer(1, d)));
  }
  return Coalition::of(std::span<const int>(feats), d);
}

std::vector<Coalition> default_targets(const Request& r, int d, const Field& f) {
  std::vector<Coalition> out;
  switch (r.type) {
    case InfluenceType::individual:
      for (int i = 1; i <= d; ++i) out.push_back(Coalition::singleton(i, d));
      break;
    case InfluenceType::joint: f.fail("targets are required for joint effects");
    case InfluenceType::interaction: {
      const int lo = r.measure == AliasMeasure::h_statistic ? 2 : 1;
      const int hi = r.measure == AliasMeasure::h_statistic ? 2 : r.order.value_or(std::min(2, d));
      for (int k = lo; k <= hi; ++k) {
        for (Coalition s : coalitions_of_size(d, k)) out.push_back(s);
      }
      break;
    }
  }
  return out;
}

Request parse_request(const Field& f, int d, GameKind game, ImputerKind imputer) {
  Request r;
  r.source_path = f.path();
  if (f.has("alias")) {
    f.allow({"alias", "targets", "order", "normalize"});
    const std::string name = f.at("alias").str();
    const MethodAlias* alias = nullptr;
    try {
      alias = &method_alias(name);
    } catch (const ConfigError& e) {
      throw ConfigError(f.path() + ".alias: " + e.what());
    }
    if (alias->game != game) {
      throw ConfigError(f.path() + ".alias: '" + name + "' needs a " + to_string(alias->game) + " game, config has " +
                        to_string(game));
    }
    if (std::find(alias->imputers.begin(), alias->imputers.end(), imputer) == alias->imputers.end()) {
      std::string ok;
      for (ImputerKind k : alias->imputers) ok += std::string(ok.empty() ? "" : ", ") + imputer_letter(k);
      throw ConfigError(f.path() + ".alias: '" + name + "' uses imputer " + ok + ", config has " +
                        imputer_letter(imputer));
    }
    r.effect = alias->effect;
    r.type = alias->type;
    r.normalized_game = alias->normalized_game;
    r.measure = alias->measure;
    r.method = alias->name;
    if (alias->type == InfluenceType::interaction && alias->measure == AliasMeasure::effect) {
      r.order = alias->default_order == 0 ? d : std::min(alias->default_order, d);
    }
  } else {
    f.allow({"effect", "type", "targets", "order", "permutations", "normalize"});
    r.effect = parse_effect(f.at("effect"));
    r.type = parse_type(f.at("type"));
  }
  if (f.has("order")) {
    if (r.type != InfluenceType::interaction) f.at("order").fail("order applies to interaction effects only");
    r.order = static_cast<int>(f.at("order").integer(1, d));
  }
  if (f.has("permutations")) {
    if (r.effect != Effect::partial || r.type != InfluenceType::individual) {
      f.at("permutations").fail("permutation sampling applies to partial individual effects only");
    }
    r.permutations = static_cast<std::size_t>(f.at("permutations").integer(1, 100'000'000));
  }
  if (f.has("normalize")) {
    r.normalize = f.at("normalize").boolean();
    if (r.normalize && game != GameKind::sensitivity) {
      f.at("normalize").fail("normalisation by the total variance needs a sensitivity game");
    }
  }
  if (r.measure == AliasMeasure::h_statistic && game != GameKind::sensitivity) {
    f.fail("the H-statistic needs a sensitivity game");
  }
  if (f.has("targets")) {
    const Field t = f.at("targets");
    const std::size_t n = t.size();
    if (n == 0) t.fail("at least one target is required");
    for (std::size_t i = 0; i < n; ++i) r.targets.push_back(parse_coalition(t.at(i), d));
  } else {
    r.targets = default_targets(r, d, f);
  }
  for (std::size_t i = 0; i < r.targets.size(); ++i) {
    const Coalition s = r.targets[i];
    const std::string where = f.path() + ".targets[" + std::to_string(i) + "]";
    if (r.type == InfluenceType::individual && s.size() != 1) {
      throw ConfigError(where + ": individual targets must contain exactly one feature");
    }
    if (r.measure == AliasMeasure::h_statistic && s.size() != 2) {
      throw ConfigError(where + ": the H-statistic needs a pair of features");
    }
    if (r.order && r.effect == Effect::partial && s.size() > *r.order) {
      throw ConfigError(where + ": coalition larger than the requested order " + std::to_string(*r.order));
    }
  }
  std::sort(r.targets.begin(), r.targets.end(), CanonicalOrder{});
  r.targets.erase(std::unique(r.targets.begin(), r.targets.end()), r.targets.end());
  if (r.method.empty()) {
    switch (r.effect) {
      case Effect::pure: r.method = r.type == InfluenceType::interaction ? "moebius" : "pure"; break;
      case Effect::full: r.method = r.type == InfluenceType::interaction ? "co_moebius" : "full"; break;
      case Effect::partial:
        r.method = r.type == InfluenceType::individual ? (r.permutations ? "sv_sampled" : "sv")
                   : r.type == InfluenceType::joint   ? "gv"
                   : r.order                          ? "k_sii"
                                                      : "sii";
        break;
    }
  }
  return r;
}

// Records the distinct coalitions a measure touches.
struct CountingGame {
  const LazyGame& game;
  std::set<std::uint32_t>& seen;
  int dim() const { return game.dim(); }
  double operator()(Coalition s) const {
    seen.insert(s.bits());
    return game(s);
  }
};

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json coalition_json(Coalition s) {
  json a = json::array();
  for (int f : s.features()) a.push_back(f);
  return a;
}

}  // namespace

RunOutput run_config(std::string_view config_json) {
  json root;
  try {
    root = json::parse(config_json);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON (") + e.what() + ")");
  }
  const Field cfg(root, "config");
  if (!root.is_object()) cfg.fail("expected a JSON object");
  cfg.allow({"model", "d", "distribution", "imputer", "game", "effects", "output"});

  const int d = static_cast<int>(cfg.at("d").integer(1, kMaxFeatures));
  const std::string model_text = cfg.at("model").str();
  std::optional<ModelExpr> model_opt;
  try {
    model_opt = parse_model(model_text, d);
  } catch (const ParseError& e) {
    throw ParseError(std::string("model: ") + e.what(), e.position());
  }
  const ModelExpr& model = *model_opt;

  // Distribution.
  Background background;
  if (cfg.has("distribution")) {
    const Field dist = cfg.at("distribution");
    dist.allow({"gaussian", "dataset"});
    if (dist.has("gaussian") == dist.has("dataset")) dist.fail("give exactly one of gaussian or dataset");
    if (dist.has("gaussian")) {
      const Field g = dist.at("gaussian");
      g.allow({"mu", "sigma", "rho"});
      std::vector<double> mu(static_cast<std::size_t>(d), 0.0);
      if (g.has("mu")) mu = g.at("mu").vec(static_cast<std::size_t>(d));
      if (g.has("sigma") == g.has("rho")) g.fail("give exactly one of sigma or rho");
      Eigen::MatrixXd sigma(d, d);
      if (g.has("rho")) {
        const double rho = g.at("rho").num();
        if (!(rho <= 1.0) || (d > 1 && !(rho > -1.0 / (d - 1)))) {
          g.at("rho").fail("rho must lie in (-1/(d-1), 1]");
        }
        sigma.setConstant(rho);
        sigma.diagonal().setOnes();
      } else {
        const Field s = g.at("sigma");
        if (s.size() != static_cast<std::size_t>(d)) s.fail("expected " + std::to_string(d) + " rows");
        for (int i = 0; i < d; ++i) {
          const auto row = s.at(static_cast<std::size_t>(i)).vec(static_cast<std::size_t>(d));
          for (int j = 0; j < d; ++j) sigma(i, j) = row[static_cast<std::size_t>(j)];
        }
      }
      Eigen::VectorXd muv = Eigen::Map<const Eigen::VectorXd>(mu.data(), d);
      try {
        background = GaussianSpec::create(muv, sigma);
      } catch (const InvalidArgument& e) {
        g.fail(e.what());
      }
    } else {
      Dataset ds = load_dataset(dist.at("dataset").str());
      if (ds.dim() != d) {
        dist.at("dataset").fail("dataset has " + std::to_string(ds.dim()) + " feature columns, d=" + std::to_string(d));
      }
      background = std::move(ds);
    }
  }

  // Imputer.
  ImputerConfig ic;
  std::string mode_text = "auto";
  if (cfg.has("imputer")) {
    const Field imp = cfg.at("imputer");
    imp.allow({"kind", "baseline", "mc_samples", "seed", "mode"});
    if (imp.has("kind")) ic.kind = parse_imputer(imp.at("kind"));
    if (imp.has("baseline")) ic.baseline = imp.at("baseline").vec(static_cast<std::size_t>(d));
    if (imp.has("mc_samples")) ic.mc_samples = static_cast<std::size_t>(imp.at("mc_samples").integer(1, 100'000'000));
    if (imp.has("seed")) ic.seed = imp.at("seed").seed();
    if (imp.has("mode")) {
      mode_text = imp.at("mode").choice({"exact", "mc", "auto"});
      if (mode_text == "exact") ic.mode = EstimationMode::exact_moments;
      if (mode_text == "mc") ic.mode = EstimationMode::monte_carlo;
    }
  }
  if (std::holds_alternative<std::monostate>(background)) background = GaussianSpec::standard(d);
  ic.background = background;
  std::optional<ValueFunction> vf_opt;
  try {
    vf_opt.emplace(model, ic);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("config.imputer: ") + e.what());
  }
  const ValueFunction& vf = *vf_opt;

  // Game.
  const Field gf = cfg.at("game");
  gf.allow({"local", "sensitivity", "risk"});
  const int games = static_cast<int>(gf.has("local")) + gf.has("sensitivity") + gf.has("risk");
  if (games != 1) gf.fail("give exactly one of local, sensitivity or risk");
  GameKind kind = GameKind::local;
  std::optional<LazyGame> game_opt;
  Eigen::MatrixXd points;  // sensitivity evaluation points
  bool normalize_risk = false;
  json game_meta = json::object();
  auto gaussian_or_fail = [&](const Field& f) -> const GaussianSpec& {
    if (const auto* g = std::get_if<GaussianSpec>(&background)) return *g;
    f.fail("sampling evaluation points needs a Gaussian distribution");
  };
  if (gf.has("local")) {
    const Field l = gf.at("local");
    l.allow({"x0"});
    const std::vector<double> x0 = l.at("x0").vec(static_cast<std::size_t>(d));
    game_opt = lazy_local_game(vf, x0);
    game_meta["x0"] = x0;
  } else if (gf.has("sensitivity")) {
    kind = GameKind::sensitivity;
    const Field s = gf.at("sensitivity");
    s.allow({"n", "seed"});
    if (const auto* ds = std::get_if<Dataset>(&background); ds && !s.has("n")) {
      points = ds->x;
    } else {
      const std::size_t n = s.has("n") ? static_cast<std::size_t>(s.at("n").integer(2, 10'000'000)) : 500;
      const std::uint64_t seed = s.has("seed") ? s.at("seed").seed() : ic.seed;
      points = sample_eval_points(gaussian_or_fail(s), n, seed);
    }
    if (points.rows() < 2) s.fail("at least 2 evaluation points are required");
    game_opt = lazy_sensitivity_game(vf, points);
    game_meta["n"] = points.rows();
  } else {
    kind = GameKind::risk;
    const Field r = gf.at("risk");
    r.allow({"loss", "n", "noise_variance", "seed", "normalize"});
    const Loss loss = r.has("loss") && r.at("loss").choice({"squared", "log"}) == "log" ? Loss::log : Loss::squared;
    if (r.has("normalize")) normalize_risk = r.at("normalize").boolean();
    Dataset data;
    if (const auto* ds = std::get_if<Dataset>(&background); ds && !r.has("n")) {
      if (!ds->y) r.fail("the dataset has no label column y");
      data = *ds;
    } else {
      const std::size_t n = r.has("n") ? static_cast<std::size_t>(r.at("n").integer(1, 10'000'000)) : 500;
      const double noise = r.has("noise_variance") ? r.at("noise_variance").num() : 0.01;
      if (noise < 0) r.at("noise_variance").fail("must be non-negative");
      const std::uint64_t seed = r.has("seed") ? r.at("seed").seed() : ic.seed;
      data = make_synthetic_dataset(model, gaussian_or_fail(r), n, noise, seed);
      game_meta["noise_variance"] = noise;
    }
    try {
      game_opt = lazy_risk_game(vf, data, loss);
    } catch (const InvalidArgument& e) {
      r.fail(e.what());
    }
    game_meta["loss"] = to_string(loss);
    game_meta["n"] = data.rows();
  }
  const LazyGame& base_game = *game_opt;
  const LazyGame normalized_game(d, kind, [base_game, d](Coalition s) {
    return base_game(s) - base_game(Coalition::empty(d));
  });

  // Effects.
  const Field ef = cfg.at("effects");
  const std::size_t n_effects = ef.size();
  if (n_effects == 0) ef.fail("at least one effect request is required");
  std::vector<Request> requests;
  for (std::size_t i = 0; i < n_effects; ++i) requests.push_back(parse_request(ef.at(i), d, kind, ic.kind));

  // Output settings are validated before any expensive work.
  std::string format = "json";
  std::optional<std::string> path;
  if (cfg.has("output")) {
    const Field o = cfg.at("output");
    o.allow({"path", "format"});
    if (o.has("format")) format = o.at("format").choice({"csv", "json"});
    if (o.has("path")) path = o.at("path").str();
  }

  std::optional<GameTensor> tensor;
  std::optional<GameTensor> tensor_norm;
  auto full_tensor = [&](bool norm) -> const GameTensor& {
    if (!tensor) tensor = base_game.materialize();
    if (!norm) return *tensor;
    if (!tensor_norm) tensor_norm = normalized(*tensor);
    return *tensor_norm;
  };
  std::map<int, InteractionValues> ksii_cache;

  std::vector<Row> rows;
  for (const Request& r : requests) {
    const bool norm = r.normalized_game || (kind == GameKind::risk && normalize_risk);
    const LazyGame& game = norm ? normalized_game : base_game;
    for (Coalition s : r.targets) {
      Row row;
      row.effect = to_string(r.effect);
      row.type = to_string(r.type);
      row.coalition = s;
      row.method = r.method;
      std::set<std::uint32_t> seen;
      const CountingGame counting{game, seen};
      if (r.measure == AliasMeasure::h_statistic) {
        const auto f = s.features();
        const HStatistic h = h_statistic(vf, points, f[0], f[1]);
        row.value = h.value;
        row.degenerate = h.degenerate;
        rows.push_back(row);
        continue;
      }
      switch (r.effect) {
        case Effect::pure: row.value = pure_effect(counting, s, r.type); break;
        case Effect::full: row.value = full_effect(counting, s, r.type); break;
        case Effect::partial: {
          if (r.permutations) {
            const Estimate e = shapley_value_sampled([&](Coalition c) { return counting(c); }, d,
                                                     s.features().front(), *r.permutations, ic.seed);
            row.value = e.value;
            row.std_error = e.std_error;
            break;
          }
          const GameTensor& t = full_tensor(norm);
          for (std::uint32_t b = 0; b < t.size(); ++b) seen.insert(b);
          switch (r.type) {
            case InfluenceType::individual: row.value = generalized_value(t, s); break;
            case InfluenceType::joint: row.value = generalized_value(t, s); break;
            case InfluenceType::interaction:
              if (r.order) {
                const int key = *r.order * 2 + (norm ? 1 : 0);
                auto it = ksii_cache.find(key);
                if (it == ksii_cache.end()) it = ksii_cache.emplace(key, k_sii(t, *r.order)).first;
                row.value = it->second.get(s);
              } else {
                row.value = shapley_interaction_index(t, s);
              }
              break;
          }
          break;
        }
      }
      if (r.normalize) {
        const double total = base_game(Coalition::full(d));
        if (total == 0.0) throw NumericError(r.source_path + ": cannot normalise, total variance is zero");
        row.value /= total;
      }
      row.evaluations = seen.size();
      rows.push_back(row);
    }
  }

  // Report.
  json report;
  report["game"] = to_string(kind);
  report["imputer"] = imputer_letter(ic.kind);
  json effects = json::array();
  for (const Row& row : rows) {
    json e;
    e["effect"] = row.effect;
    e["type"] = row.type;
    e["coalition"] = coalition_json(row.coalition);
    e["value"] = row.value;
    e["stderr"] = row.std_error ? json(*row.std_error) : json(nullptr);
    e["method"] = row.method;
    e["game_evaluations"] = row.evaluations;
    if (row.degenerate) e["degenerate"] = true;
    effects.push_back(std::move(e));
  }
  report["effects"] = std::move(effects);
  json meta;
  meta["seed"] = ic.seed;
  meta["mc_samples"] = ic.mc_samples;
  meta["model"] = model_text;
  meta["d"] = d;
  meta["mode"] = to_string(vf.mode());
  meta["game"] = game_meta;
  meta["game_evaluations"] = base_game.evaluations();
  meta["value_function_calls"] = vf.calls();
  meta["model_calls"] = vf.model_calls();
  meta["degenerate"] = vf.degenerate();
  report["meta"] = std::move(meta);

  RunOutput out;
  out.report = report.dump(2) + "\n";
  out.format = format;
  out.path = path;
  if (format == "json") {
    out.output = out.report;
  } else {
    std::string csv = "effect,type,coalition,value,stderr\n";
    for (const Row& row : rows) {
      csv += row.effect + "," + row.type + "," + row.coalition.to_string() + "," + format_double(row.value) + "," +
             (row.std_error ? format_double(*row.std_error) : "") + "\n";
    }
    out.output = std::move(csv);
  }
  if (path) {
    std::ofstream f(*path, std::ios::binary);
    if (!f) throw IoError("cannot write output file '" + *path + "'");
    f << out.output;
    if (!f) throw IoError("failed writing output file '" + *path + "'");
  }
  return out;
}

}  // namespace unifx
