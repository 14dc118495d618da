#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "ideaevo/error.hpp"
#include "ideaevo/landscape.hpp"
#include "ideaevo/population.hpp"

namespace ideaevo {

/// Idea-type counts gathered from every agent's mind at the end of a run.
class PooledPopulation {
 public:
  explicit PooledPopulation(int bits) : bits_(bits), counts_(Idea::space_size(bits), 0) {}

  template <class Agents>
  static PooledPopulation from_agents(int bits, const Agents& agents) {
    PooledPopulation pool(bits);
    for (const auto& a : agents)
      for (const auto& e : a.ideas.entries()) pool.add(e.idea, e.count);
    return pool;
  }

  void add(std::uint32_t idea, std::uint64_t copies = 1) {
    detail::require(idea < counts_.size(), "pooled idea index out of range");
    counts_[idea] += copies;
    total_ += copies;
  }

  int bits() const noexcept { return bits_; }
  std::uint64_t total() const noexcept { return total_; }
  std::span<const std::uint64_t> counts() const noexcept { return counts_; }

  std::size_t distinct() const {
    return static_cast<std::size_t>(std::count_if(counts_.begin(), counts_.end(), [](auto c) { return c > 0; }));
  }

 private:
  int bits_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

/// Shannon entropy in bits of the idea-type distribution.
inline double entropy(const PooledPopulation& pool) {
  detail::require(pool.total() > 0, "entropy of an empty pool");
  const double total = static_cast<double>(pool.total());
  double h = 0.0;
  for (auto c : pool.counts()) {
    if (c == 0) continue;
    const double q = static_cast<double>(c) / total;
    h -= q * std::log2(q);
  }
  return h;
}

/// (M - H) / M. Round-off of a few ulps past either end is absorbed.
inline double convergence(double h, int bits) {
  detail::require(bits >= 1, "M must be positive");
  const double m = static_cast<double>(bits);
  constexpr double slack = 1e-9;
  detail::require(h >= -slack && h <= m + slack, "entropy outside [0, M]");
  return std::clamp((m - h) / m, 0.0, 1.0);
}

// Most supported idea; the lowest index wins ties.
inline Idea mode_idea(const PooledPopulation& pool) {
  detail::require(pool.total() > 0, "mode of an empty pool");
  const auto counts = pool.counts();
  const auto it = std::max_element(counts.begin(), counts.end());
  return Idea(static_cast<std::uint32_t>(it - counts.begin()), pool.bits());
}

inline double decision_quality(const PooledPopulation& pool, const UtilityTable& true_table) {
  detail::require(true_table.kind() == TableKind::True, "decision quality needs the true utility table");
  return true_table.at(mode_idea(pool));
}

}  // namespace ideaevo
