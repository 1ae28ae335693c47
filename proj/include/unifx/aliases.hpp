#pragma once

// Named attribution methods expressed as (game, imputer, effect, influence
// type) cells.

#include <string>
#include <string_view>
#include <vector>

#include "unifx/coalition.hpp"
#include "unifx/influence.hpp"
#include "unifx/value_function.hpp"

namespace unifx {

enum class AliasMeasure {
  effect,       // pure / partial / full effect on the game
  h_statistic,  // normalised pairwise interaction variance
};

struct MethodAlias {
  std::string name;
  GameKind game;
  std::vector<ImputerKind> imputers;  // accepted kinds, default first
  Effect effect;
  InfluenceType type;
  bool normalized_game = false;  // nu(S) - nu(empty)
  AliasMeasure measure = AliasMeasure::effect;
  // Interaction order used when no targets are given; 0 means d.
  int default_order = 2;
  std::string description;
};

const std::vector<MethodAlias>& method_aliases();

// Throws ConfigError listing the registry when the name is unknown.
const MethodAlias& method_alias(std::string_view name);

}  // namespace unifx
