#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "ideaevo/error.hpp"
#include "ideaevo/random.hpp"

namespace ideaevo {

inline constexpr int kMaxBits = 24;

/// An M-bit idea. The integer index reads the bit string as binary notation,
/// so bit i of the index is locus i of the idea.
class Idea {
 public:
  Idea(std::uint32_t index, int bits) : index_(index), bits_(bits) {
    detail::require(bits >= 1 && bits <= kMaxBits, "idea width must be in [1, 24]");
    detail::require(index < space_size(bits), "idea index out of range for width");
  }

  static std::uint32_t space_size(int bits) { return std::uint32_t{1} << bits; }

  /// Parses a string of '0'/'1' characters, most significant locus first.
  static Idea from_string(const std::string& s) {
    detail::require(!s.empty() && s.size() <= kMaxBits, "bad idea string width");
    std::uint32_t idx = 0;
    for (char c : s) {
      detail::require(c == '0' || c == '1', "idea string must be binary");
      idx = (idx << 1) | static_cast<std::uint32_t>(c == '1');
    }
    return Idea(idx, static_cast<int>(s.size()));
  }

  std::uint32_t index() const noexcept { return index_; }
  int bits() const noexcept { return bits_; }
  bool bit(int locus) const noexcept { return (index_ >> locus) & 1U; }

  std::string to_string() const {
    std::string s(static_cast<std::size_t>(bits_), '0');
    for (int i = 0; i < bits_; ++i)
      if (bit(i)) s[static_cast<std::size_t>(bits_ - 1 - i)] = '1';
    return s;
  }

  friend bool operator==(const Idea&, const Idea&) = default;

 private:
  std::uint32_t index_;
  int bits_;
};

inline std::ostream& operator<<(std::ostream& os, const Idea& v) { return os << v.to_string(); }

inline int hamming(const Idea& a, const Idea& b) {
  detail::require(a.bits() == b.bits(), "hamming: idea widths differ");
  return std::popcount(a.index() ^ b.index());
}

struct Representative {
  Idea idea;
  double utility;
};

/// The n anchor ideas whose utilities define a landscape by interpolation.
class RepresentativeSet {
 public:
  RepresentativeSet(int bits, std::vector<Representative> entries)
      : bits_(bits), entries_(std::move(entries)) {
    detail::require(entries_.size() >= 2, "representative set needs at least two entries");
    std::unordered_set<std::uint32_t> seen;
    for (const auto& e : entries_) {
      detail::require(e.idea.bits() == bits_, "representative width mismatch");
      detail::require(e.utility >= 0.0 && e.utility <= 1.0, "representative utility outside [0,1]");
      detail::require(seen.insert(e.idea.index()).second, "representative ideas must be distinct");
    }
  }

  int bits() const noexcept { return bits_; }
  std::size_t size() const noexcept { return entries_.size(); }
  std::span<const Representative> entries() const noexcept { return entries_; }
  const Representative& operator[](std::size_t i) const { return entries_[i]; }

  friend bool operator==(const RepresentativeSet& a, const RepresentativeSet& b) {
    if (a.bits_ != b.bits_ || a.entries_.size() != b.entries_.size()) return false;
    for (std::size_t i = 0; i < a.entries_.size(); ++i)
      if (a.entries_[i].idea != b.entries_[i].idea || a.entries_[i].utility != b.entries_[i].utility)
        return false;
    return true;
  }

 private:
  int bits_;
  std::vector<Representative> entries_;
};

enum class TableKind { True, Master, Individual };

/// Utilities for every idea in the 2^M space, indexed by idea index.
class UtilityTable {
 public:
  UtilityTable(int bits, TableKind kind, std::vector<double> values)
      : bits_(bits), kind_(kind), values_(std::move(values)) {
    detail::require(values_.size() == Idea::space_size(bits_), "table size must be 2^M");
  }

  int bits() const noexcept { return bits_; }
  TableKind kind() const noexcept { return kind_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }

  double operator[](std::uint32_t idx) const { return values_[idx]; }
  double at(const Idea& v) const {
    detail::require(v.bits() == bits_, "table lookup width mismatch");
    return values_[v.index()];
  }

 private:
  int bits_;
  TableKind kind_;
  std::vector<double> values_;
};

/// Draws n distinct random ideas; one gets utility 1, another 0, the rest
/// independent uniform values strictly inside (0, 1).
template <class URBG>
RepresentativeSet generate_representatives(URBG& rng, int bits, int n) {
  detail::require(bits >= 1 && bits <= kMaxBits, "M must be in [1, 24]");
  detail::require(n >= 2, "need at least two representatives");
  detail::require(static_cast<std::uint64_t>(n) <= Idea::space_size(bits),
                  "more representatives than ideas in the space");

  const std::uint64_t space = Idea::space_size(bits);
  std::vector<std::uint32_t> ideas;
  std::unordered_set<std::uint32_t> seen;
  while (ideas.size() < static_cast<std::size_t>(n)) {
    auto idx = static_cast<std::uint32_t>(detail::uniform_below(rng, space));
    if (seen.insert(idx).second) ideas.push_back(idx);
  }

  const auto hi = static_cast<std::size_t>(detail::uniform_below(rng, static_cast<std::uint64_t>(n)));
  auto lo = static_cast<std::size_t>(detail::uniform_below(rng, static_cast<std::uint64_t>(n - 1)));
  if (lo >= hi) ++lo;

  std::vector<Representative> entries;
  entries.reserve(ideas.size());
  for (std::size_t i = 0; i < ideas.size(); ++i) {
    double u;
    if (i == hi) {
      u = 1.0;
    } else if (i == lo) {
      u = 0.0;
    } else {
      do {
        u = detail::uniform01(rng);
      } while (u == 0.0);
    }
    entries.push_back({Idea(ideas[i], bits), u});
  }
  return RepresentativeSet(bits, std::move(entries));
}

/// Inverse-square Hamming-distance weighted average of the representative
/// utilities. Representatives return their stored utility.
inline double interpolate(const RepresentativeSet& set, const Idea& v) {
  detail::require(v.bits() == set.bits(), "interpolate: idea width mismatch");
  double num = 0.0;
  double den = 0.0;
  for (const auto& r : set.entries()) {
    const int d = hamming(r.idea, v);
    if (d == 0) return r.utility;
    const double w = 1.0 / static_cast<double>(d * d);
    num += r.utility * w;
    den += w;
  }
  return num / den;
}

inline UtilityTable build_table(const RepresentativeSet& set, TableKind kind) {
  const std::uint32_t space = Idea::space_size(set.bits());
  std::vector<double> values(space);
  for (std::uint32_t i = 0; i < space; ++i) values[i] = interpolate(set, Idea(i, set.bits()));
  return UtilityTable(set.bits(), kind, std::move(values));
}

namespace detail {

inline constexpr int kBiasRedrawLimit = 10000;

template <class URBG>
std::uint32_t flip_bits(URBG& rng, std::uint32_t idx, int bits, double prob) {
  for (int i = 0; i < bits; ++i)
    if (bernoulli(rng, prob)) idx ^= std::uint32_t{1} << i;
  return idx;
}

}  // namespace detail

/// Group-level bias: per-bit flips at 0.25*beta on every representative idea,
/// utility jitter uniform in [-beta, beta], then min-max rescale to [0, 1].
/// A representative that lands on an earlier one redraws its flips.
template <class URBG>
RepresentativeSet apply_bias(const RepresentativeSet& set, double beta, URBG& rng) {
  detail::require(detail::is_probability(beta), "bias must be in [0,1]");
  if (beta == 0.0) return set;

  const int bits = set.bits();
  const double flip_prob = 0.25 * beta;
  std::unordered_set<std::uint32_t> taken;
  std::vector<std::uint32_t> ideas;
  ideas.reserve(set.size());
  for (const auto& r : set.entries()) {
    std::uint32_t idx = detail::flip_bits(rng, r.idea.index(), bits, flip_prob);
    int attempts = 0;
    while (taken.contains(idx) && attempts++ < detail::kBiasRedrawLimit)
      idx = detail::flip_bits(rng, r.idea.index(), bits, flip_prob);
    // Tiny flip probabilities can make redraws hopeless; fall back to a free idea.
    while (taken.contains(idx))
      idx = static_cast<std::uint32_t>(detail::uniform_below(rng, Idea::space_size(bits)));
    taken.insert(idx);
    ideas.push_back(idx);
  }

  std::vector<double> utils;
  utils.reserve(set.size());
  for (const auto& r : set.entries()) utils.push_back(r.utility + beta * (2.0 * detail::uniform01(rng) - 1.0));

  const auto [mn, mx] = std::minmax_element(utils.begin(), utils.end());
  const double lo = *mn;
  const double span = *mx - *mn;
  for (auto& u : utils) u = span > 0.0 ? std::clamp((u - lo) / span, 0.0, 1.0) : 0.5;

  std::vector<Representative> entries;
  entries.reserve(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) entries.push_back({Idea(ideas[i], bits), utils[i]});
  return RepresentativeSet(bits, std::move(entries));
}

/// Per-idea uniform noise inside [max(U-xi, 0), min(U+xi, 1)].
template <class URBG>
UtilityTable derive_individual(const UtilityTable& master, double xi, URBG& rng) {
  detail::require(detail::is_probability(xi), "noise must be in [0,1]");
  std::vector<double> values(master.size());
  for (std::size_t i = 0; i < master.size(); ++i) {
    const double m = master.values()[i];
    const double lo = std::max(m - xi, 0.0);
    const double hi = std::min(m + xi, 1.0);
    const double u = detail::uniform01(rng);
    values[i] = xi == 0.0 ? m : std::min(lo + u * (hi - lo), hi);
  }
  return UtilityTable(master.bits(), TableKind::Individual, std::move(values));
}

struct LandscapeBundle {
  UtilityTable true_table;
  UtilityTable master_table;
  double bias;
  double noise;
  std::vector<UtilityTable> individual_tables;
};

/// True set -> biased master set -> master table -> one noisy table per agent.
template <class URBG>
LandscapeBundle make_landscape(URBG& rng, int bits, int n_representatives, double beta, double xi,
                               int n_agents) {
  detail::require(n_agents >= 0, "agent count must be nonnegative");
  detail::require(detail::is_probability(xi), "noise must be in [0,1]");
  const auto true_set = generate_representatives(rng, bits, n_representatives);
  const auto master_set = apply_bias(true_set, beta, rng);
  LandscapeBundle bundle{build_table(true_set, TableKind::True), build_table(master_set, TableKind::Master),
                         beta, xi, {}};
  bundle.individual_tables.reserve(static_cast<std::size_t>(n_agents));
  for (int j = 0; j < n_agents; ++j) bundle.individual_tables.push_back(derive_individual(bundle.master_table, xi, rng));
  return bundle;
}

/// CSV: idea_index,true_utility,master_utility,individual_0_utility
inline void write_landscape_csv(std::ostream& os, const LandscapeBundle& b) {
  detail::require(!b.individual_tables.empty(), "landscape dump needs one individual table");
  os << "idea_index,true_utility,master_utility,individual_0_utility\n";
  char buf[128];
  const auto& ind = b.individual_tables.front();
  for (std::uint32_t i = 0; i < b.true_table.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%u,%.17g,%.17g,%.17g\n", i, b.true_table[i], b.master_table[i], ind[i]);
    os << buf;
  }
}

}  // namespace ideaevo
