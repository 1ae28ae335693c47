#include "unifx/aliases.hpp"

#include "unifx/error.hpp"

namespace unifx {

namespace {

using IK = ImputerKind;
using E = Effect;
using T = InfluenceType;
using G = GameKind;

std::vector<MethodAlias> build() {
  std::vector<MethodAlias> r;
  auto add = [&r](std::string name, G game, std::vector<IK> imputers, E effect, T type, std::string desc) {
    MethodAlias a;
    a.name = std::move(name);
    a.game = game;
    a.imputers = std::move(imputers);
    a.effect = effect;
    a.type = type;
    a.description = std::move(desc);
    r.push_back(std::move(a));
    return &r.back();
  };
  add("occlusion_1", G::local, {IK::baseline}, E::full, T::individual,
      "prediction change when one feature is replaced by its baseline value");
  add("occlusion_patch", G::local, {IK::baseline}, E::full, T::joint,
      "prediction change when a group of features is replaced by baseline values");
  add("preddiff", G::local, {IK::conditional}, E::full, T::individual,
      "prediction change when one feature is replaced by conditional draws");
  add("preddiff_1", G::local, {IK::conditional}, E::full, T::individual,
      "alias of preddiff");
  add("preddiff_patch", G::local, {IK::conditional}, E::full, T::joint,
      "prediction change when a group is replaced by conditional draws");
  add("bshap", G::local, {IK::baseline}, E::partial, T::individual, "Shapley value of the baseline-imputed local game");
  add("interventional_shap", G::local, {IK::marginal}, E::partial, T::individual,
      "Shapley value of the marginally imputed local game");
  add("observational_shap", G::local, {IK::conditional}, E::partial, T::individual,
      "Shapley value of the conditionally imputed local game");
  add("arch_attribute", G::local, {IK::baseline}, E::pure, T::individual,
      "prediction change from the baseline when only one feature is kept");
  add("centered_pdp", G::local, {IK::marginal}, E::pure, T::individual,
      "partial dependence at the point, centred by the mean prediction");
  add("centered_mplot", G::local, {IK::conditional}, E::pure, T::individual,
      "conditional dependence at the point, centred by the mean prediction");
  add("centered_ice", G::local, {IK::baseline}, E::full, T::individual,
      "ICE value at the baseline, centred on the actual prediction");
  add("pfi", G::risk, {IK::marginal}, E::full, T::individual,
      "risk increase after marginally permuting one feature");
  add("grouped_pfi", G::risk, {IK::marginal}, E::full, T::joint,
      "risk increase after marginally permuting a group of features");
  add("cfi", G::risk, {IK::conditional}, E::full, T::individual,
      "risk increase after conditionally resampling one feature");
  add("sage", G::risk, {IK::conditional, IK::marginal}, E::partial, T::individual,
      "Shapley value of the risk game normalised at the empty coalition")
      ->normalized_game = true;
  add("closed_sobol", G::sensitivity, {IK::marginal}, E::pure, T::joint, "closed Sobol index of a group");
  add("total_sobol", G::sensitivity, {IK::marginal}, E::full, T::joint, "total Sobol index of a group");
  add("upsilon", G::sensitivity, {IK::marginal}, E::full, T::interaction,
      "variance of all fANOVA terms containing the group");
  add("h_statistic", G::sensitivity, {IK::marginal}, E::pure, T::interaction,
      "pairwise interaction variance over the joint variance")
      ->measure = AliasMeasure::h_statistic;
  add("sobol_sv", G::sensitivity, {IK::marginal}, E::partial, T::individual,
      "Shapley value of the variance game");
  add("shapley_gam", G::local, {IK::marginal, IK::conditional}, E::pure, T::interaction,
      "every fANOVA term at the point, up to the full order")
      ->default_order = 0;
  add("k_sv", G::local, {IK::marginal, IK::baseline, IK::conditional}, E::partial, T::interaction,
      "k-Shapley values of the local game");
  return r;
}

}  // namespace

const std::vector<MethodAlias>& method_aliases() {
  static const std::vector<MethodAlias> registry = build();
  return registry;
}

const MethodAlias& method_alias(std::string_view name) {
  for (const auto& a : method_aliases()) {
    if (a.name == name) return a;
  }
  std::string names;
  for (const auto& a : method_aliases()) {
    if (!names.empty()) names += ", ";
    names += a.name;
  }
  throw ConfigError("unknown method alias '" + std::string(name) + "'; available: " + names);
}

}  // namespace unifx
