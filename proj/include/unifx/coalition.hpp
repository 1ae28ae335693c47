#pragma once

// Exact set-function algebra over subsets of the feature set D = {1, ..., d}.
//
// Feature i occupies bit i-1 of a coalition; a GameTensor stores one value per
// bit pattern, so tensor index == coalition bits.

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace unifx {

inline constexpr int kMaxFeatures = 25;

class Coalition {
 public:
  Coalition() = default;
  Coalition(std::uint32_t bits, int d);

  static Coalition empty(int d) { return Coalition(0u, d); }
  static Coalition full(int d);
  // Features are 1-based.
  static Coalition of(std::initializer_list<int> features, int d);
  static Coalition of(std::span<const int> features, int d);
  static Coalition singleton(int feature, int d);

  std::uint32_t bits() const noexcept { return bits_; }
  int dim() const noexcept { return d_; }
  int size() const noexcept;
  bool is_empty() const noexcept { return bits_ == 0; }

  bool contains(int feature) const;
  bool is_subset_of(Coalition other) const noexcept { return (bits_ & ~other.bits_) == 0; }
  bool intersects(Coalition other) const noexcept { return (bits_ & other.bits_) != 0; }

  Coalition complement() const;
  Coalition with(int feature) const;
  Coalition without(int feature) const;

  Coalition operator|(Coalition other) const;
  Coalition operator&(Coalition other) const;
  Coalition operator-(Coalition other) const;  // set difference

  // Ascending 1-based feature indices.
  std::vector<int> features() const;
  // "1+2" style; the empty coalition renders as "".
  std::string to_string() const;

  friend bool operator==(const Coalition&, const Coalition&) = default;
  friend auto operator<=>(const Coalition&, const Coalition&) = default;

 private:
  void check_same_dim(Coalition other) const;

  std::uint32_t bits_ = 0;
  int d_ = 0;
};

// Orders by cardinality, then by bit pattern. This is the emission order of
// every InteractionValues container.
struct CanonicalOrder {
  bool operator()(const Coalition& a, const Coalition& b) const noexcept {
    if (a.size() != b.size()) return a.size() < b.size();
    return a.bits() < b.bits();
  }
};

// All 2^|S| subsets of S in ascending bit-pattern order.
std::vector<Coalition> subsets_of(Coalition s);

// All coalitions of D with exactly k members, ascending bit pattern.
std::vector<Coalition> coalitions_of_size(int d, int k);

enum class GameKind { local, sensitivity, risk, raw };

const char* to_string(GameKind kind);

// Every evaluation of a cooperative game on the 2^d coalitions of D.
class GameTensor {
 public:
  GameTensor() = default;
  GameTensor(int d, std::vector<double> values, GameKind kind = GameKind::raw);

  static GameTensor zeros(int d, GameKind kind = GameKind::raw);

  int dim() const noexcept { return d_; }
  GameKind kind() const noexcept { return kind_; }
  std::size_t size() const noexcept { return values_.size(); }

  double operator()(Coalition s) const;
  double at(std::uint32_t bits) const { return values_.at(bits); }
  std::span<const double> values() const noexcept { return values_; }

 private:
  int d_ = 0;
  std::vector<double> values_{0.0};
  GameKind kind_ = GameKind::raw;
};

// m(S) = sum_{T subset S} (-1)^{|S|-|T|} v(T), via the O(d 2^d) subset-sum transform.
GameTensor moebius_transform(const GameTensor& game);

// Inverse of moebius_transform: v(T) = sum_{S subset T} m(S).
GameTensor zeta_transform(const GameTensor& moebius);

// Co-Moebius m~(S) = Delta_S(-S) = sum_{T superset S} m(T).
GameTensor co_moebius_transform(const GameTensor& game);

// Delta_S(T) = sum_{L subset S} (-1)^{|S|-|L|} v(T u L); requires S and T disjoint.
double discrete_derivative(const GameTensor& game, Coalition s, Coalition t);

enum class IndexKind {
  moebius,
  co_moebius,
  sv,
  gv,
  sii,
  k_sii,
  pure,
  full,
  sobol_closed,
  sobol_total,
  upsilon,
};

const char* to_string(IndexKind kind);

// Order-tagged scores keyed by coalition. Keys satisfy 1 <= |S| <= max_order;
// the empty-coalition score, when an index defines one, is baseline_value.
class InteractionValues {
 public:
  InteractionValues(IndexKind kind, int d, int max_order);

  IndexKind index_kind() const noexcept { return kind_; }
  int dim() const noexcept { return d_; }
  int max_order() const noexcept { return max_order_; }

  void set(Coalition s, double value);
  // Zero for coalitions that were never set.
  double get(Coalition s) const;
  bool contains(Coalition s) const { return entries_.count(s) != 0; }
  std::size_t size() const noexcept { return entries_.size(); }

  const std::map<Coalition, double, CanonicalOrder>& entries() const noexcept {
    return entries_;
  }

  std::optional<double> baseline_value;

 private:
  IndexKind kind_;
  int d_;
  int max_order_;
  std::map<Coalition, double, CanonicalOrder> entries_;
};

}  // namespace unifx
