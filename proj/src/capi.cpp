#include "unifx/unifx.h"

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <new>
#include <string>

#include "unifx/aliases.hpp"
#include "unifx/error.hpp"
#include "unifx/games.hpp"
#include "unifx/influence.hpp"
#include "unifx/model.hpp"
#include "unifx/runner.hpp"

#ifndef UNIFX_VERSION_STRING
#define UNIFX_VERSION_STRING "0.0.0"
#endif

struct unifx_model {
  unifx::ModelExpr expr;
};

struct unifx_gaussian {
  unifx::GaussianSpec spec;
};

struct unifx_value_function {
  unifx::ValueFunction vf;
};

struct unifx_game {
  unifx::GameTensor tensor;
};

namespace {

thread_local std::string last_error;

unifx_status status_of(unifx::ErrorCode code) {
  switch (code) {
    case unifx::ErrorCode::invalid_argument: return UNIFX_ERR_INVALID_ARGUMENT;
    case unifx::ErrorCode::config: return UNIFX_ERR_CONFIG;
    case unifx::ErrorCode::parse: return UNIFX_ERR_PARSE;
    case unifx::ErrorCode::numeric: return UNIFX_ERR_NUMERIC;
    case unifx::ErrorCode::resource: return UNIFX_ERR_RESOURCE;
    case unifx::ErrorCode::io: return UNIFX_ERR_IO;
  }
  return UNIFX_ERR_INTERNAL;
}

template <typename Fn>
unifx_status guard(Fn&& fn) {
  last_error.clear();
  try {
    fn();
    return UNIFX_OK;
  } catch (const unifx::Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return UNIFX_ERR_RESOURCE;
  } catch (const std::exception& e) {
    last_error = e.what();
    return UNIFX_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return UNIFX_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (p == nullptr) throw unifx::InvalidArgument(std::string(what) + " must not be NULL");
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void need_length(size_t got, size_t want, const char* what) {
  if (got != want) {
    throw unifx::InvalidArgument(std::string(what) + " has length " + std::to_string(got) + ", expected " +
                                 std::to_string(want));
  }
}

unifx::Coalition coalition_of(uint32_t bits, int d) { return unifx::Coalition(bits, d); }

}  // namespace

extern "C" {

const char* unifx_version(void) { return UNIFX_VERSION_STRING; }

const char* unifx_last_error(void) { return last_error.c_str(); }

const char* unifx_status_name(unifx_status status) {
  switch (status) {
    case UNIFX_OK: return "ok";
    case UNIFX_ERR_INVALID_ARGUMENT: return "invalid argument";
    case UNIFX_ERR_CONFIG: return "configuration error";
    case UNIFX_ERR_PARSE: return "parse error";
    case UNIFX_ERR_NUMERIC: return "numeric error";
    case UNIFX_ERR_RESOURCE: return "resource limit";
    case UNIFX_ERR_IO: return "i/o error";
    case UNIFX_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void unifx_string_free(char* s) { std::free(s); }

unifx_status unifx_model_parse(const char* text, int d, unifx_model** out) {
  return guard([&] {
    need(text, "text");
    need(out, "out");
    *out = new unifx_model{unifx::parse_model(text, d)};
  });
}

unifx_status unifx_model_evaluate(const unifx_model* model, const double* x, size_t n, double* out) {
  return guard([&] {
    need(model, "model");
    need(x, "x");
    need(out, "out");
    *out = model->expr.evaluate(std::span<const double>(x, n));
  });
}

unifx_status unifx_model_to_string(const unifx_model* model, char** out) {
  return guard([&] {
    need(model, "model");
    need(out, "out");
    *out = dup(model->expr.to_string());
  });
}

unifx_status unifx_model_is_multilinear(const unifx_model* model, int* out) {
  return guard([&] {
    need(model, "model");
    need(out, "out");
    *out = unifx::is_multilinear(model->expr.expand()) ? 1 : 0;
  });
}

int unifx_model_dim(const unifx_model* model) { return model ? model->expr.dim() : -1; }

void unifx_model_free(unifx_model* model) { delete model; }

unifx_status unifx_gaussian_create(int d, const double* mu, const double* sigma, unifx_gaussian** out) {
  return guard([&] {
    need(mu, "mu");
    need(sigma, "sigma");
    need(out, "out");
    if (d < 1 || d > unifx::kMaxFeatures) throw unifx::InvalidArgument("d outside [1, 25]");
    Eigen::VectorXd m = Eigen::Map<const Eigen::VectorXd>(mu, d);
    Eigen::MatrixXd s = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(sigma, d, d);
    *out = new unifx_gaussian{unifx::GaussianSpec::create(std::move(m), std::move(s))};
  });
}

unifx_status unifx_gaussian_equicorrelated(int d, double rho, unifx_gaussian** out) {
  return guard([&] {
    need(out, "out");
    *out = new unifx_gaussian{unifx::GaussianSpec::equicorrelated(d, rho)};
  });
}

unifx_status unifx_gaussian_sample(const unifx_gaussian* g, size_t n, uint64_t seed, double* out) {
  return guard([&] {
    need(g, "distribution");
    if (n > 0) need(out, "out");
    const Eigen::MatrixXd draws = unifx::sample(g->spec, n, seed);
    const auto d = static_cast<size_t>(g->spec.dim());
    for (size_t k = 0; k < n; ++k) {
      for (size_t j = 0; j < d; ++j) out[k * d + j] = draws(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j));
    }
  });
}

unifx_status unifx_gaussian_moment(const unifx_gaussian* g, const int* kappa, size_t n, double* out) {
  return guard([&] {
    need(g, "distribution");
    need(kappa, "kappa");
    need(out, "out");
    *out = unifx::gaussian_moment(g->spec, std::span<const int>(kappa, n));
  });
}

void unifx_gaussian_free(unifx_gaussian* g) { delete g; }

unifx_status unifx_value_function_create(const unifx_model* model, const unifx_imputer_options* options,
                                         unifx_value_function** out) {
  return guard([&] {
    need(model, "model");
    need(options, "options");
    need(out, "out");
    const int d = model->expr.dim();
    unifx::ImputerConfig c;
    switch (options->kind) {
      case UNIFX_IMPUTER_BASELINE: c.kind = unifx::ImputerKind::baseline; break;
      case UNIFX_IMPUTER_MARGINAL: c.kind = unifx::ImputerKind::marginal; break;
      case UNIFX_IMPUTER_CONDITIONAL: c.kind = unifx::ImputerKind::conditional; break;
      default: throw unifx::InvalidArgument("unknown imputer kind");
    }
    if (options->baseline) c.baseline = std::vector<double>(options->baseline, options->baseline + d);
    c.background = options->distribution ? options->distribution->spec : unifx::GaussianSpec::standard(d);
    c.mc_samples = options->mc_samples == 0 ? 512 : options->mc_samples;
    c.seed = options->seed;
    switch (options->mode) {
      case UNIFX_MODE_AUTO: break;
      case UNIFX_MODE_EXACT: c.mode = unifx::EstimationMode::exact_moments; break;
      case UNIFX_MODE_MC: c.mode = unifx::EstimationMode::monte_carlo; break;
      default: throw unifx::InvalidArgument("unknown estimation mode");
    }
    *out = new unifx_value_function{unifx::ValueFunction(model->expr, std::move(c))};
  });
}

unifx_status unifx_value_function_evaluate(const unifx_value_function* vf, uint32_t coalition, const double* x,
                                           size_t n, double* value, double* std_error) {
  return guard([&] {
    need(vf, "value function");
    need(x, "x");
    need(value, "value");
    const unifx::Estimate e = vf->vf.estimate(coalition_of(coalition, vf->vf.dim()), std::span<const double>(x, n));
    *value = e.value;
    if (std_error) *std_error = e.std_error.value_or(std::numeric_limits<double>::quiet_NaN());
  });
}

unifx_status unifx_value_function_model_calls(const unifx_value_function* vf, uint64_t* out) {
  return guard([&] {
    need(vf, "value function");
    need(out, "out");
    *out = vf->vf.model_calls();
  });
}

void unifx_value_function_free(unifx_value_function* vf) { delete vf; }

unifx_status unifx_game_from_values(int d, const double* values, size_t n, unifx_game** out) {
  return guard([&] {
    need(values, "values");
    need(out, "out");
    *out = new unifx_game{unifx::GameTensor(d, std::vector<double>(values, values + n))};
  });
}

unifx_status unifx_game_local(const unifx_value_function* vf, const double* x0, size_t n, unifx_game** out) {
  return guard([&] {
    need(vf, "value function");
    need(x0, "x0");
    need(out, "out");
    *out = new unifx_game{unifx::local_game(vf->vf, std::span<const double>(x0, n))};
  });
}

unifx_status unifx_game_sensitivity(const unifx_value_function* vf, const double* points, size_t n_points,
                                    unifx_game** out) {
  return guard([&] {
    need(vf, "value function");
    need(points, "points");
    need(out, "out");
    const int d = vf->vf.dim();
    const Eigen::MatrixXd p = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        points, static_cast<Eigen::Index>(n_points), d);
    *out = new unifx_game{unifx::sensitivity_game(vf->vf, p)};
  });
}

int unifx_game_dim(const unifx_game* game) { return game ? game->tensor.dim() : -1; }

unifx_status unifx_game_values(const unifx_game* game, double* out, size_t n) {
  return guard([&] {
    need(game, "game");
    need(out, "out");
    need_length(n, game->tensor.size(), "out");
    std::memcpy(out, game->tensor.values().data(), n * sizeof(double));
  });
}

unifx_status unifx_game_moebius(const unifx_game* game, double* out, size_t n) {
  return guard([&] {
    need(game, "game");
    need(out, "out");
    need_length(n, game->tensor.size(), "out");
    const unifx::GameTensor m = unifx::moebius_transform(game->tensor);
    std::memcpy(out, m.values().data(), n * sizeof(double));
  });
}

unifx_status unifx_game_co_moebius(const unifx_game* game, double* out, size_t n) {
  return guard([&] {
    need(game, "game");
    need(out, "out");
    need_length(n, game->tensor.size(), "out");
    const unifx::GameTensor m = unifx::co_moebius_transform(game->tensor);
    std::memcpy(out, m.values().data(), n * sizeof(double));
  });
}

unifx_status unifx_game_effect(const unifx_game* game, unifx_effect effect, unifx_influence type,
                               uint32_t coalition, double* out) {
  return guard([&] {
    need(game, "game");
    need(out, "out");
    const unifx::GameTensor& t = game->tensor;
    const unifx::Coalition s = coalition_of(coalition, t.dim());
    if (s.is_empty()) throw unifx::InvalidArgument("coalition must be non-empty");
    unifx::InfluenceType it;
    switch (type) {
      case UNIFX_INFLUENCE_INDIVIDUAL: it = unifx::InfluenceType::individual; break;
      case UNIFX_INFLUENCE_JOINT: it = unifx::InfluenceType::joint; break;
      case UNIFX_INFLUENCE_INTERACTION: it = unifx::InfluenceType::interaction; break;
      default: throw unifx::InvalidArgument("unknown influence type");
    }
    if (it == unifx::InfluenceType::individual && s.size() != 1) {
      throw unifx::InvalidArgument("individual effects need a single feature");
    }
    switch (effect) {
      case UNIFX_EFFECT_PURE: *out = unifx::pure_effect(t, s, it); break;
      case UNIFX_EFFECT_FULL: *out = unifx::full_effect(t, s, it); break;
      case UNIFX_EFFECT_PARTIAL:
        *out = it == unifx::InfluenceType::interaction ? unifx::shapley_interaction_index(t, s)
                                                       : unifx::generalized_value(t, s);
        break;
      default: throw unifx::InvalidArgument("unknown effect");
    }
  });
}

unifx_status unifx_game_shapley_values(const unifx_game* game, double* out, size_t n) {
  return guard([&] {
    need(game, "game");
    need(out, "out");
    const int d = game->tensor.dim();
    need_length(n, static_cast<size_t>(d), "out");
    const unifx::InteractionValues sv = unifx::shapley_value(game->tensor);
    for (int i = 1; i <= d; ++i) out[i - 1] = sv.get(unifx::Coalition::singleton(i, d));
  });
}

unifx_status unifx_game_k_sii(const unifx_game* game, int k, double* out, size_t n) {
  return guard([&] {
    need(game, "game");
    need(out, "out");
    need_length(n, game->tensor.size(), "out");
    const unifx::InteractionValues v = unifx::k_sii(game->tensor, k);
    for (size_t b = 0; b < n; ++b) out[b] = 0.0;
    for (const auto& [s, value] : v.entries()) out[s.bits()] = value;
  });
}

void unifx_game_free(unifx_game* game) { delete game; }

unifx_status unifx_run(const char* config_json, char** output, char** report) {
  return guard([&] {
    need(config_json, "config");
    need(output, "output");
    const unifx::RunOutput r = unifx::run_config(config_json);
    char* o = dup(r.output);
    if (report) {
      try {
        *report = dup(r.report);
      } catch (...) {
        std::free(o);
        throw;
      }
    }
    *output = o;
  });
}

unifx_status unifx_reproduce(const char* experiment, uint64_t seed, const char* out_dir, const char* mode,
                             int repetitions, size_t mc_samples, char** summary) {
  return guard([&] {
    need(experiment, "experiment");
    need(summary, "summary");
    unifx::ReproduceOptions o;
    o.experiment = experiment;
    o.seed = seed;
    if (out_dir) o.out_dir = out_dir;
    if (mode) {
      const std::string m = mode;
      if (m == "exact") {
        o.mode = unifx::EstimationMode::exact_moments;
      } else if (m == "mc") {
        o.mode = unifx::EstimationMode::monte_carlo;
      } else {
        throw unifx::ConfigError("mode: expected exact or mc, got \"" + m + "\"");
      }
    }
    if (repetitions > 0) o.repetitions = repetitions;
    if (mc_samples > 0) o.mc_samples = mc_samples;
    *summary = dup(unifx::reproduce(o).summary);
  });
}

unifx_status unifx_aliases(char** out) {
  return guard([&] {
    need(out, "out");
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& a : unifx::method_aliases()) {
      nlohmann::ordered_json j;
      j["name"] = a.name;
      j["game"] = unifx::to_string(a.game);
      nlohmann::ordered_json imps = nlohmann::ordered_json::array();
      for (auto k : a.imputers) imps.push_back(unifx::to_string(k));
      j["imputers"] = imps;
      j["effect"] = unifx::to_string(a.effect);
      j["type"] = unifx::to_string(a.type);
      j["normalized_game"] = a.normalized_game;
      j["description"] = a.description;
      arr.push_back(std::move(j));
    }
    *out = dup(arr.dump(2) + "\n");
  });
}

}  // extern "C"
