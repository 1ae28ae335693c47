// Acceptance checks. Prints one PASS/FAIL line per criterion; exit status is
// nonzero when any selected criterion fails.
//
//   unifx_acceptance                 all criteria
//   unifx_acceptance --criterion N   criterion N only

#include <json.hpp>

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "property_checks.hpp"
#include "statistical_checks.hpp"
#include "unifx/error.hpp"
#include "unifx/games.hpp"
#include "unifx/influence.hpp"
#include "unifx/oracle.hpp"
#include "unifx/runner.hpp"

using namespace unifx;
using json = nlohmann::json;

namespace {

// Tolerances and time limits.
constexpr double kTable3Tol = 1e-10;
constexpr double kTable3Seconds = 1.0;
constexpr double kClosedFormTol = 1e-10;
constexpr double kClosedFormSeconds = 10.0;
constexpr double kEquivalenceTol = 1e-12;  // scaled by max(1, |reference|)
constexpr double kVarianceRelTol = 1e-9;
constexpr double kFullEffectTol = 1e-6;
constexpr double kPureSpreadRel = 0.05;  // "equally high": max/min - 1 of the four pure effects
constexpr double kRhoZeroTol = 1e-9;
constexpr double kFigSeconds = 30.0;
constexpr double kPropertySeconds = 60.0;
constexpr double kMcZ = 5.0;
constexpr double kSampledSvZ = 3.0;
constexpr double kRiskZ = 3.0;
constexpr double kHTol = 0.02;
constexpr double kStatisticalSeconds = 300.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

std::filesystem::path scratch(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("unifx_acceptance_" + name);
  std::filesystem::create_directories(p);
  return p;
}

// 1. Nine local measures of F_3int at (1,1,1).
Outcome table3() {
  const auto t0 = Clock::now();
  ImputerConfig ic;
  ic.kind = ImputerKind::marginal;
  ic.background = GaussianSpec::standard(3);
  ic.mode = EstimationMode::exact_moments;
  const ValueFunction vf(parse_model("x1 + x2 + x3 + x1*x2 + x1*x2*x3", 3), ic);
  const GameTensor g = local_game(vf, std::vector<double>{1, 1, 1});
  const Coalition one = Coalition::singleton(1, 3);
  const Coalition pair = Coalition::of({1, 2}, 3);
  const double computed[9] = {pure_effect(g, one, InfluenceType::individual),
                              shapley_value(g).get(one),
                              full_effect(g, one, InfluenceType::individual),
                              pure_effect(g, pair, InfluenceType::joint),
                              generalized_value(g, pair),
                              full_effect(g, pair, InfluenceType::joint),
                              pure_effect(g, pair, InfluenceType::interaction),
                              shapley_interaction_index(g, pair),
                              full_effect(g, pair, InfluenceType::interaction)};
  const double expected[9] = {1, 11.0 / 6.0, 3, 3, 3.5, 4, 1, 1.5, 2};
  double dev = 0.0;
  for (int k = 0; k < 9; ++k) dev = std::max(dev, std::abs(computed[k] - expected[k]));
  ReproduceOptions o;
  o.experiment = "table3";
  o.out_dir = scratch("table3").string();
  const double weight_dev = json::parse(reproduce(o).summary)["max_abs_deviation"].get<double>();
  const double secs = seconds_since(t0);
  Outcome r;
  r.pass = dev <= kTable3Tol && weight_dev <= kTable3Tol && secs < kTable3Seconds;
  r.detail = fmt("nine measures max dev %.3g, weight matrix max dev %.3g (tol %.0e); %.3f s (limit %.0f s)", dev,
                 weight_dev, kTable3Tol, secs, kTable3Seconds);
  return r;
}

ImputerKind imputer_of(oracle::Kind k) {
  switch (k) {
    case oracle::Kind::b: return ImputerKind::baseline;
    case oracle::Kind::m: return ImputerKind::marginal;
    case oracle::Kind::c: return ImputerKind::conditional;
  }
  return ImputerKind::baseline;
}

// 2. Moebius of the local game against the bivariate closed forms.
Outcome closed_forms() {
  const auto t0 = Clock::now();
  std::mt19937_64 gen(20240601);
  std::normal_distribution<double> n01;
  double dev = 0.0;
  int cells = 0;
  for (int draw = 0; draw < 10; ++draw) {
    Eigen::Vector2d mu(0.5 * n01(gen), 0.5 * n01(gen));
    const GaussianSpec spec = GaussianSpec::create(mu, stats::random_cov(2, gen));
    const std::vector<double> beta{n01(gen), n01(gen), n01(gen)};
    const std::vector<double> base{n01(gen), n01(gen)};
    for (oracle::Family fam : {oracle::Family::lin, oracle::Family::two_int}) {
      for (oracle::Kind kind : {oracle::Kind::b, oracle::Kind::m, oracle::Kind::c}) {
        oracle::OracleCase oc{fam, kind, beta, base, spec};
        ImputerConfig ic;
        ic.kind = imputer_of(kind);
        if (kind == oracle::Kind::b) {
          ic.baseline = base;
        } else {
          ic.background = spec;
        }
        ic.mode = EstimationMode::exact_moments;
        const ValueFunction vf(parse_model(oracle::model_text(oc), 2), ic);
        for (int a = -2; a <= 2; ++a) {
          for (int b = -2; b <= 2; ++b) {
            const std::vector<double> x{double(a), double(b)};
            const InteractionValues f = fanova_decomposition(local_game(vf, x));
            for (std::uint32_t s = 0; s < 4; ++s) {
              const Coalition S(s, 2);
              const double got = s == 0 ? *f.baseline_value : f.get(S);
              dev = std::max(dev, std::abs(got - oracle::closed_form_effect(oc, S, x)));
              ++cells;
            }
          }
        }
      }
    }
  }
  const double secs = seconds_since(t0);
  Outcome r;
  r.pass = dev <= kClosedFormTol && secs < kClosedFormSeconds;
  r.detail = fmt("%d cells (2 families x 3 kinds x 4 S x 25 points x 10 draws), max dev %.3g (tol %.0e); %.2f s "
                 "(limit %.0f s)",
                 cells, dev, kClosedFormTol, secs, kClosedFormSeconds);
  return r;
}

double scaled_dev(const GameTensor& a, const GameTensor& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a.at(i) - b.at(i)) / std::max(1.0, std::abs(b.at(i))));
  }
  return worst;
}

GameTensor tensor_of(const ModelExpr& f, ImputerKind kind, const GaussianSpec& spec, std::span<const double> x) {
  ImputerConfig ic;
  ic.kind = kind;
  ic.background = spec;  // baseline defaults to mu
  ic.mode = EstimationMode::exact_moments;
  return local_game(ValueFunction(f, ic), x);
}

std::string random_polynomial(std::mt19937_64& gen, bool multilinear) {
  std::normal_distribution<double> n01;
  std::ostringstream os;
  os.precision(17);
  os << n01(gen);
  const int terms = 6;
  for (int t = 0; t < terms; ++t) {
    os << " + (" << n01(gen) << ")";
    for (int i = 1; i <= 4; ++i) {
      const int e = multilinear ? static_cast<int>(gen() % 2) : static_cast<int>(gen() % 3);
      if (e > 0) os << "*x" << i << "^" << e;
    }
  }
  return os.str();
}

// 3. Equivalences between the three value functions.
Outcome equivalences() {
  std::mt19937_64 gen(77);
  std::normal_distribution<double> n01;
  const int d = 4;
  double dev_a = 0.0, dev_b = 0.0, dev_c = 0.0;
  for (int inst = 0; inst < 20; ++inst) {
    std::vector<double> x(d);
    for (double& v : x) v = 1.5 * n01(gen);
    Eigen::VectorXd mu(d);
    for (int i = 0; i < d; ++i) mu(i) = n01(gen);
    // (a) linear model, correlated Gaussian
    {
      std::ostringstream os;
      os.precision(17);
      os << n01(gen);
      for (int i = 1; i <= d; ++i) os << " + (" << n01(gen) << ")*x" << i;
      const ModelExpr f = parse_model(os.str(), d);
      const GaussianSpec spec = GaussianSpec::create(mu, stats::random_cov(d, gen));
      dev_a = std::max(dev_a, scaled_dev(tensor_of(f, ImputerKind::marginal, spec, x),
                                         tensor_of(f, ImputerKind::baseline, spec, x)));
    }
    Eigen::MatrixXd diag = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i < d; ++i) diag(i, i) = 0.3 + std::abs(n01(gen));
    const GaussianSpec indep = GaussianSpec::create(mu, diag);
    // (b) any polynomial, independent features
    {
      const ModelExpr f = parse_model(random_polynomial(gen, false), d);
      dev_b = std::max(dev_b, scaled_dev(tensor_of(f, ImputerKind::conditional, indep, x),
                                         tensor_of(f, ImputerKind::marginal, indep, x)));
    }
    // (c) multilinear polynomial, independent features
    {
      const ModelExpr f = parse_model(random_polynomial(gen, true), d);
      const GameTensor b = tensor_of(f, ImputerKind::baseline, indep, x);
      dev_c = std::max({dev_c, scaled_dev(tensor_of(f, ImputerKind::marginal, indep, x), b),
                        scaled_dev(tensor_of(f, ImputerKind::conditional, indep, x), b)});
    }
  }
  Outcome r;
  r.pass = dev_a <= kEquivalenceTol && dev_b <= kEquivalenceTol && dev_c <= kEquivalenceTol;
  r.detail = fmt("20 instances, d=4: (a) m vs b=mu %.3g, (b) c vs m %.3g, (c) m,c vs b=mu %.3g (tol %.0e x "
                 "max(1,|ref|))",
                 dev_a, dev_b, dev_c, kEquivalenceTol);
  return r;
}

double sample_variance(const std::vector<double>& v) {
  double mean = 0.0;
  for (double e : v) mean += e;
  mean /= double(v.size());
  double ss = 0.0;
  for (double e : v) ss += (e - mean) * (e - mean);
  return ss / double(v.size() - 1);
}

double sample_covariance(const std::vector<double>& a, const std::vector<double>& b) {
  double ma = 0.0, mb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    ma += a[k];
    mb += b[k];
  }
  ma /= double(a.size());
  mb /= double(b.size());
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - ma) * (b[k] - mb);
  return s / double(a.size() - 1);
}

// 4. Moebius of the sensitivity game vs the sample variance of each c-effect.
Outcome variance_decomposition() {
  std::mt19937_64 gen(4242);
  std::normal_distribution<double> n01;
  double worst_single = 0.0, worst_pair = 0.0, worst_with_cov = 0.0;
  for (int inst = 0; inst < 5; ++inst) {
    Eigen::Vector2d mu(0.5 * n01(gen), 0.5 * n01(gen));
    Eigen::Matrix2d diag = Eigen::Matrix2d::Zero();
    diag(0, 0) = 0.5 + std::abs(n01(gen));
    diag(1, 1) = 0.5 + std::abs(n01(gen));
    const GaussianSpec spec = GaussianSpec::create(mu, diag);
    oracle::OracleCase oc{oracle::Family::two_int, oracle::Kind::c, {n01(gen), n01(gen), n01(gen)}, {}, spec};
    ImputerConfig ic;
    ic.kind = ImputerKind::conditional;
    ic.background = spec;
    ic.mode = EstimationMode::exact_moments;
    const ValueFunction vf(parse_model(oracle::model_text(oc), 2), ic);
    const Eigen::MatrixXd pts = sample_eval_points(spec, 500, 100 + static_cast<std::uint64_t>(inst));
    const GameTensor m = moebius_transform(sensitivity_game(vf, pts));
    std::vector<std::vector<double>> f(4, std::vector<double>(500));
    for (int k = 0; k < 500; ++k) {
      const std::vector<double> x{pts(k, 0), pts(k, 1)};
      for (std::uint32_t s = 1; s < 4; ++s) f[s][static_cast<std::size_t>(k)] = oracle::closed_form_effect(oc, Coalition(s, 2), x);
    }
    auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); };
    worst_single = std::max({worst_single, rel(m.at(1), sample_variance(f[1])), rel(m.at(2), sample_variance(f[2]))});
    worst_pair = std::max(worst_pair, rel(m.at(3), sample_variance(f[3])));
    // With the finite-sample cross terms the identity is exact.
    const double with_cov = sample_variance(f[3]) + 2 * sample_covariance(f[1], f[2]) +
                            2 * sample_covariance(f[1], f[3]) + 2 * sample_covariance(f[2], f[3]);
    worst_with_cov = std::max(worst_with_cov, rel(m.at(3), with_cov));
  }
  Outcome r;
  r.pass = worst_single <= kVarianceRelTol && worst_pair <= kVarianceRelTol;
  r.detail = fmt("n=500, 5 instances, rel dev: |S|=1 %.3g, S={1,2} %.3g (tol %.0e); S={1,2} including sample "
                 "covariances of the effects %.3g",
                 worst_single, worst_pair, kVarianceRelTol, worst_with_cov);
  return r;
}

// 5. fig2_lin sweep.
Outcome fig2_lin() {
  const auto t0 = Clock::now();
  ReproduceOptions o;
  o.experiment = "fig2_lin";
  o.out_dir = scratch("fig2_lin").string();
  const json s = json::parse(reproduce(o).summary);
  const double secs = seconds_since(t0);
  std::map<std::string, double> mean;
  for (const auto& row : s["rows"]) {
    mean[fmt("%.1f/%s/%d/%s", row["rho"].get<double>(), row["imputer"].get<std::string>().c_str(),
             row["feature"].get<int>(), row["effect"].get<std::string>().c_str())] = row["mean"].get<double>();
  }
  const double target = oracle::equicorrelated_full_effect_lin(0.9, 4, 2.0);
  double full_dev = 0.0;
  for (int i = 1; i <= 3; ++i) full_dev = std::max(full_dev, std::abs(mean[fmt("0.9/c/%d/full", i)] - target));
  double lo = INFINITY, hi = -INFINITY;
  for (int i = 1; i <= 4; ++i) {
    lo = std::min(lo, mean[fmt("0.9/c/%d/pure", i)]);
    hi = std::max(hi, mean[fmt("0.9/c/%d/pure", i)]);
  }
  const double spread = hi / lo - 1.0;
  double rho0 = 0.0;
  for (int i = 1; i <= 4; ++i) {
    for (const char* e : {"pure", "partial", "full"}) {
      const double m = mean[fmt("0.0/m/%d/%s", i, e)];
      rho0 = std::max({rho0, std::abs(mean[fmt("0.0/b/%d/%s", i, e)] - m), std::abs(mean[fmt("0.0/c/%d/%s", i, e)] - m)});
    }
  }
  Outcome r;
  r.pass = full_dev <= kFullEffectTol && spread <= kPureSpreadRel && rho0 <= kRhoZeroTol && secs < kFigSeconds;
  r.detail = fmt("rho=0.9 c full x1..x3 dev from %.7f: %.3g (tol %.0e); c pure x1..x4 in [%.4f, %.4f], spread %.2f%% "
                 "(limit %.0f%%); rho=0 b/m/c max diff %.3g (tol %.0e); %d seeds, %.2f s (limit %.0f s)",
                 target, full_dev, kFullEffectTol, lo, hi, 100 * spread, 100 * kPureSpreadRel, rho0, kRhoZeroTol,
                 s["repetitions"].get<int>(), secs, kFigSeconds);
  return r;
}

// 6. Property suites.
Outcome properties() {
  const auto t0 = Clock::now();
  int failed = 0, total = 0;
  std::string worst;
  for (std::uint64_t seed : {1ull, 99ull}) {
    for (const props::Check& c : props::property_suite(seed)) {
      ++total;
      if (!c.pass()) {
        ++failed;
        worst += fmt(" [%s: %.3g]", c.name.c_str(), c.max_error);
      }
    }
  }
  const double secs = seconds_since(t0);
  Outcome r;
  r.pass = failed == 0 && secs < kPropertySeconds;
  r.detail = fmt("%d/%d identity suites hold%s; %.2f s (limit %.0f s)", total - failed, total, worst.c_str(), secs,
                 kPropertySeconds);
  return r;
}

// 7. Statistical suites.
Outcome statistical() {
  const auto t0 = Clock::now();
  const stats::Result mc = stats::mc_vs_exact(1, 200);
  const stats::Result sv = stats::sampled_shapley(2);
  const stats::Result risk = stats::risk_noise_level(3);
  const stats::Result h = stats::h_statistic_product(4);
  const double secs = seconds_since(t0);
  Outcome r;
  r.pass = mc.worst_z <= kMcZ && sv.worst_z <= kSampledSvZ && risk.worst_z <= kRiskZ && h.worst_abs <= kHTol &&
           secs < kStatisticalSeconds;
  r.detail = fmt("MC vs exact worst %.2f SE over %d cases (limit %.0f); sampled SV worst %.2f SE over %d (limit %.0f); "
                 "risk %s, %.2f SE (limit %.0f); %s, |H-1|=%.3g (tol %.2f); %.1f s (limit %.0f s)",
                 mc.worst_z, mc.cases, kMcZ, sv.worst_z, sv.cases, kSampledSvZ, risk.detail.c_str(), risk.worst_z,
                 kRiskZ, h.detail.c_str(), h.worst_abs, kHTol, secs, kStatisticalSeconds);
  return r;
}

// 8. Instrumented evaluation counts. With the baseline imputer every game
// evaluation is exactly one model call.
Outcome cost_accounting() {
  const int d = 5;
  const std::string model = "x1 + x2*x3 - x4*x5 + x1*x2*x3*x4*x5";
  int checks = 0, bad = 0;
  std::string first_bad;
  auto run_one = [&](const json& effect, std::size_t expected) {
    json cfg{{"model", model},
             {"d", d},
             {"imputer", {{"kind", "b"}, {"baseline", {0.1, 0.2, 0.3, 0.4, 0.5}}}},
             {"game", {{"local", {{"x0", {1, -1, 2, 0.5, 3}}}}}},
             {"effects", json::array({effect})}};
    const json rep = json::parse(run_config(cfg.dump()).report);
    const auto evals = rep["effects"][0]["game_evaluations"].get<std::size_t>();
    const auto calls = rep["meta"]["model_calls"].get<std::size_t>();
    ++checks;
    if (evals != expected || calls != expected) {
      ++bad;
      if (first_bad.empty()) {
        first_bad = fmt(" first mismatch: %s expected %zu, game %zu, model %zu", effect.dump().c_str(), expected, evals,
                        calls);
      }
    }
  };
  for (const char* e : {"pure", "full"}) {
    for (int i = 1; i <= d; ++i) run_one({{"effect", e}, {"type", "individual"}, {"targets", {{i}}}}, 2);
    run_one({{"effect", e}, {"type", "joint"}, {"targets", {{1, 3, 4}}}}, 2);
    for (int s = 1; s <= d; ++s) {
      json target = json::array();
      for (int i = 1; i <= s; ++i) target.push_back(i);
      run_one({{"effect", e}, {"type", "interaction"}, {"targets", {target}}}, std::size_t{1} << s);
    }
  }
  for (int i = 1; i <= d; ++i) {
    run_one({{"effect", "partial"}, {"type", "individual"}, {"targets", {{i}}}}, std::size_t{1} << d);
  }
  run_one({{"effect", "partial"}, {"type", "joint"}, {"targets", {{1, 2}}}}, std::size_t{1} << d);
  run_one({{"effect", "partial"}, {"type", "interaction"}, {"targets", {{2, 5}}}}, std::size_t{1} << d);
  run_one({{"effect", "partial"}, {"type", "interaction"}, {"order", 2}, {"targets", {{2, 5}}}}, std::size_t{1} << d);
  Outcome r;
  r.pass = bad == 0;
  r.detail = fmt("%d/%d requests: pure/full individual+joint = 2, interactions = 2^s, partial = 2^d=%d game "
                 "evaluations and model calls%s",
                 checks - bad, checks, 1 << d, first_bad.c_str());
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"table3 local measures of F_3int", table3},
      {"closed-form fANOVA effects", closed_forms},
      {"value-function equivalences", equivalences},
      {"sensitivity Moebius = effect variances", variance_decomposition},
      {"fig2_lin pattern", fig2_lin},
      {"property suites", properties},
      {"statistical suites", statistical},
      {"cost accounting", cost_accounting},
  };
  int only = 0;
  for (int a = 1; a < argc; ++a) {
    if (std::strcmp(argv[a], "--criterion") == 0 && a + 1 < argc) {
      only = std::atoi(argv[++a]);
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
      return 2;
    }
  }
  if (only < 0 || only > static_cast<int>(criteria.size())) {
    std::fprintf(stderr, "criterion must be in 1..%zu\n", criteria.size());
    return 2;
  }
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    if (only != 0 && only != static_cast<int>(k + 1)) continue;
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
