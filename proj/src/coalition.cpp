#include "unifx/coalition.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "unifx/error.hpp"

namespace unifx {

namespace {

void check_dim(int d) {
  if (d < 0 || d > kMaxFeatures) {
    throw InvalidArgument("feature count " + std::to_string(d) + " outside [0, " +
                          std::to_string(kMaxFeatures) + "]");
  }
}

std::uint32_t full_mask(int d) { return d == 0 ? 0u : ((1u << d) - 1u); }

void check_feature(int feature, int d) {
  if (feature < 1 || feature > d) {
    throw InvalidArgument("feature index " + std::to_string(feature) + " outside [1, " +
                          std::to_string(d) + "]");
  }
}

}  // namespace

Coalition::Coalition(std::uint32_t bits, int d) : bits_(bits), d_(d) {
  check_dim(d);
  if ((bits & ~full_mask(d)) != 0) {
    throw InvalidArgument("coalition has a bit set above feature " + std::to_string(d));
  }
}

Coalition Coalition::full(int d) {
  check_dim(d);
  return Coalition(full_mask(d), d);
}

Coalition Coalition::of(std::initializer_list<int> features, int d) {
  return of(std::span<const int>(features.begin(), features.size()), d);
}

Coalition Coalition::of(std::span<const int> features, int d) {
  check_dim(d);
  std::uint32_t bits = 0;
  for (int f : features) {
    check_feature(f, d);
    bits |= 1u << (f - 1);
  }
  return Coalition(bits, d);
}

Coalition Coalition::singleton(int feature, int d) {
  check_dim(d);
  check_feature(feature, d);
  return Coalition(1u << (feature - 1), d);
}

int Coalition::size() const noexcept { return std::popcount(bits_); }

bool Coalition::contains(int feature) const {
  check_feature(feature, d_);
  return (bits_ >> (feature - 1)) & 1u;
}

Coalition Coalition::complement() const { return Coalition(full_mask(d_) & ~bits_, d_); }

Coalition Coalition::with(int feature) const {
  check_feature(feature, d_);
  return Coalition(bits_ | (1u << (feature - 1)), d_);
}

Coalition Coalition::without(int feature) const {
  check_feature(feature, d_);
  return Coalition(bits_ & ~(1u << (feature - 1)), d_);
}

void Coalition::check_same_dim(Coalition other) const {
  if (other.d_ != d_) {
    throw InvalidArgument("coalitions over different feature sets (d=" + std::to_string(d_) +
                          " vs d=" + std::to_string(other.d_) + ")");
  }
}

Coalition Coalition::operator|(Coalition other) const {
  check_same_dim(other);
  return Coalition(bits_ | other.bits_, d_);
}

Coalition Coalition::operator&(Coalition other) const {
  check_same_dim(other);
  return Coalition(bits_ & other.bits_, d_);
}

Coalition Coalition::operator-(Coalition other) const {
  check_same_dim(other);
  return Coalition(bits_ & ~other.bits_, d_);
}

std::vector<int> Coalition::features() const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(size()));
  for (int i = 0; i < d_; ++i) {
    if ((bits_ >> i) & 1u) out.push_back(i + 1);
  }
  return out;
}

std::string Coalition::to_string() const {
  std::string out;
  for (int f : features()) {
    if (!out.empty()) out += '+';
    out += std::to_string(f);
  }
  return out;
}

std::vector<Coalition> subsets_of(Coalition s) {
  std::vector<Coalition> out;
  out.reserve(std::size_t{1} << s.size());
  const std::uint32_t mask = s.bits();
  std::uint32_t t = 0;
  while (true) {
    out.emplace_back(t, s.dim());
    if (t == mask) break;
    t = (t - mask) & mask;
  }
  return out;
}

std::vector<Coalition> coalitions_of_size(int d, int k) {
  check_dim(d);
  std::vector<Coalition> out;
  if (k < 0 || k > d) return out;
  const std::uint32_t n = std::uint32_t{1} << d;
  for (std::uint32_t bits = 0; bits < n; ++bits) {
    if (std::popcount(bits) == k) out.emplace_back(bits, d);
  }
  return out;
}

const char* to_string(GameKind kind) {
  switch (kind) {
    case GameKind::local: return "local";
    case GameKind::sensitivity: return "sensitivity";
    case GameKind::risk: return "risk";
    case GameKind::raw: return "raw";
  }
  return "raw";
}

GameTensor::GameTensor(int d, std::vector<double> values, GameKind kind)
    : d_(d), values_(std::move(values)), kind_(kind) {
  check_dim(d);
  if (values_.size() != (std::size_t{1} << d)) {
    throw InvalidArgument("game tensor over d=" + std::to_string(d) + " needs " +
                          std::to_string(std::size_t{1} << d) + " values, got " +
                          std::to_string(values_.size()));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw NumericError("game tensor entry " + std::to_string(i) + " is not finite");
    }
  }
}

GameTensor GameTensor::zeros(int d, GameKind kind) {
  check_dim(d);
  return GameTensor(d, std::vector<double>(std::size_t{1} << d, 0.0), kind);
}

double GameTensor::operator()(Coalition s) const {
  if (s.dim() != d_) {
    throw InvalidArgument("coalition over d=" + std::to_string(s.dim()) +
                          " used with a game over d=" + std::to_string(d_));
  }
  return values_[s.bits()];
}

GameTensor moebius_transform(const GameTensor& game) {
  std::vector<double> m(game.values().begin(), game.values().end());
  const std::size_t n = m.size();
  for (int i = 0; i < game.dim(); ++i) {
    const std::size_t bit = std::size_t{1} << i;
    for (std::size_t mask = 0; mask < n; ++mask) {
      if (mask & bit) m[mask] -= m[mask ^ bit];
    }
  }
  return GameTensor(game.dim(), std::move(m), GameKind::raw);
}

GameTensor zeta_transform(const GameTensor& moebius) {
  std::vector<double> v(moebius.values().begin(), moebius.values().end());
  const std::size_t n = v.size();
  for (int i = 0; i < moebius.dim(); ++i) {
    const std::size_t bit = std::size_t{1} << i;
    for (std::size_t mask = 0; mask < n; ++mask) {
      if (mask & bit) v[mask] += v[mask ^ bit];
    }
  }
  return GameTensor(moebius.dim(), std::move(v), GameKind::raw);
}

GameTensor co_moebius_transform(const GameTensor& game) {
  const GameTensor m = moebius_transform(game);
  std::vector<double> c(m.values().begin(), m.values().end());
  const std::size_t n = c.size();
  for (int i = 0; i < game.dim(); ++i) {
    const std::size_t bit = std::size_t{1} << i;
    for (std::size_t mask = 0; mask < n; ++mask) {
      if (!(mask & bit)) c[mask] += c[mask | bit];
    }
  }
  return GameTensor(game.dim(), std::move(c), GameKind::raw);
}

double discrete_derivative(const GameTensor& game, Coalition s, Coalition t) {
  if (s.dim() != game.dim() || t.dim() != game.dim()) {
    throw InvalidArgument("discrete derivative: coalition dimension does not match the game");
  }
  if (s.intersects(t)) {
    throw InvalidArgument("discrete derivative requires disjoint S and T (S=" + s.to_string() +
                          ", T=" + t.to_string() + ")");
  }
  double total = 0.0;
  const int s_size = s.size();
  for (Coalition l : subsets_of(s)) {
    const double sign = ((s_size - l.size()) % 2 == 0) ? 1.0 : -1.0;
    total += sign * game(t | l);
  }
  return total;
}

const char* to_string(IndexKind kind) {
  switch (kind) {
    case IndexKind::moebius: return "moebius";
    case IndexKind::co_moebius: return "co_moebius";
    case IndexKind::sv: return "sv";
    case IndexKind::gv: return "gv";
    case IndexKind::sii: return "sii";
    case IndexKind::k_sii: return "k_sii";
    case IndexKind::pure: return "pure";
    case IndexKind::full: return "full";
    case IndexKind::sobol_closed: return "sobol_closed";
    case IndexKind::sobol_total: return "sobol_total";
    case IndexKind::upsilon: return "upsilon";
  }
  return "moebius";
}

InteractionValues::InteractionValues(IndexKind kind, int d, int max_order)
    : kind_(kind), d_(d), max_order_(max_order) {
  check_dim(d);
  if (max_order < 1 || max_order > std::max(d, 1)) {
    throw InvalidArgument("interaction order " + std::to_string(max_order) + " outside [1, " +
                          std::to_string(d) + "]");
  }
  if (kind == IndexKind::sv && max_order != 1) {
    throw InvalidArgument("Shapley values carry order 1 only");
  }
}

void InteractionValues::set(Coalition s, double value) {
  if (s.dim() != d_) throw InvalidArgument("coalition dimension does not match the index");
  if (s.size() < 1 || s.size() > max_order_) {
    throw InvalidArgument("coalition {" + s.to_string() + "} outside order range [1, " +
                          std::to_string(max_order_) + "]");
  }
  entries_[s] = value;
}

double InteractionValues::get(Coalition s) const {
  auto it = entries_.find(s);
  return it == entries_.end() ? 0.0 : it->second;
}

}  // namespace unifx
