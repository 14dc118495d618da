#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "ideaevo/error.hpp"
#include "ideaevo/landscape.hpp"
#include "ideaevo/network.hpp"
#include "ideaevo/random.hpp"

namespace ideaevo {

/// Multiset of ideas held by one agent. Entries are (idea index, copies),
/// kept sorted by index with no zero counts.
class IdeaPopulation {
 public:
  struct Entry {
    std::uint32_t idea;
    std::uint64_t count;
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  std::uint64_t total() const noexcept { return total_; }
  bool empty() const noexcept { return total_ == 0; }
  std::size_t distinct() const noexcept { return entries_.size(); }
  std::span<const Entry> entries() const noexcept { return entries_; }

  std::uint64_t count(std::uint32_t idea) const {
    auto it = find(idea);
    return it != entries_.end() && it->idea == idea ? it->count : 0;
  }

  void add(std::uint32_t idea, std::uint64_t copies = 1) {
    if (copies == 0) return;
    auto it = find(idea);
    if (it != entries_.end() && it->idea == idea)
      it->count += copies;
    else
      entries_.insert(it, Entry{idea, copies});
    total_ += copies;
  }

  /// Removes one copy if present; returns whether anything was removed.
  bool remove_one(std::uint32_t idea) {
    auto it = find(idea);
    if (it == entries_.end() || it->idea != idea) return false;
    if (--it->count == 0) entries_.erase(it);
    --total_;
    return true;
  }

  /// One copy drawn uniformly, so popular ideas come up proportionally more.
  template <class URBG>
  std::uint32_t sample_copy(URBG& rng) const {
    if (empty()) throw EmptyPopulation("cannot sample from an empty idea population");
    std::uint64_t r = detail::uniform_below(rng, total_);
    for (const auto& e : entries_) {
      if (r < e.count) return e.idea;
      r -= e.count;
    }
    return entries_.back().idea;
  }

  friend bool operator==(const IdeaPopulation&, const IdeaPopulation&) = default;

 private:
  std::vector<Entry>::iterator find(std::uint32_t idea) {
    return std::lower_bound(entries_.begin(), entries_.end(), idea,
                            [](const Entry& e, std::uint32_t x) { return e.idea < x; });
  }
  std::vector<Entry>::const_iterator find(std::uint32_t idea) const {
    return std::lower_bound(entries_.begin(), entries_.end(), idea,
                            [](const Entry& e, std::uint32_t x) { return e.idea < x; });
  }

  std::vector<Entry> entries_;
  std::uint64_t total_ = 0;
};

struct AgentState {
  NodeId id;
  UtilityTable perceived;
  IdeaPopulation ideas;
};

enum class OperatorKind { Replication, SubtractiveSelection, RandomMutation, IntelligentMutation, Recombination };

inline constexpr std::array<OperatorKind, 5> kAllOperators = {
    OperatorKind::Replication, OperatorKind::SubtractiveSelection, OperatorKind::RandomMutation,
    OperatorKind::IntelligentMutation, OperatorKind::Recombination};

inline constexpr bool is_selection_oriented(OperatorKind k) {
  return k == OperatorKind::Replication || k == OperatorKind::SubtractiveSelection;
}

inline std::string_view operator_name(OperatorKind k) {
  switch (k) {
    case OperatorKind::Replication: return "replication";
    case OperatorKind::SubtractiveSelection: return "subtractive_selection";
    case OperatorKind::RandomMutation: return "random_mutation";
    case OperatorKind::IntelligentMutation: return "intelligent_mutation";
    case OperatorKind::Recombination: return "recombination";
  }
  return "?";
}

struct OperatorParams {
  int sample_size = 5;        // r_p
  int mutation_offspring = 5; // r_m
  double mutation_rate = 0.2; // p_m, per bit
  double switch_prob = 0.4;   // p_s, per locus
};

/// p/2 each for the two selection operators, (1-p)/3 for each variation one.
inline std::array<double, 5> action_probabilities(double p) {
  detail::require(detail::is_probability(p), "selection probability p must be in [0,1]");
  const double v = (1.0 - p) / 3.0;
  return {p / 2.0, p / 2.0, v, v, v};
}

template <class URBG>
OperatorKind choose_action(double p, URBG& rng) {
  detail::require(detail::is_probability(p), "selection probability p must be in [0,1]");
  const double u = detail::uniform01(rng);
  if (u < p) return u < 0.5 * p ? OperatorKind::Replication : OperatorKind::SubtractiveSelection;
  const double third = (1.0 - p) / 3.0;
  const auto slot = std::min(2, static_cast<int>((u - p) / third));
  return kAllOperators[static_cast<std::size_t>(2 + slot)];
}

enum class PickMode { Best, Worst };

/// Preferential random search: rank up to r_p copies sampled without
/// replacement by perceived utility. Ties go to the lower idea index.
template <class URBG>
std::uint32_t preferential_pick(const IdeaPopulation& pop, const UtilityTable& table, int sample_size, PickMode mode,
                                URBG& rng) {
  if (pop.empty()) throw EmptyPopulation("preferential pick on an empty idea population");
  detail::require(sample_size >= 1, "preferential sample size must be >= 1");

  const auto entries = pop.entries();
  std::vector<std::uint64_t> left(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) left[i] = entries[i].count;

  std::uint64_t remaining = pop.total();
  const auto draws = std::min<std::uint64_t>(static_cast<std::uint64_t>(sample_size), remaining);
  bool have = false;
  std::uint32_t chosen = 0;
  for (std::uint64_t s = 0; s < draws; ++s) {
    std::uint64_t r = detail::uniform_below(rng, remaining);
    std::size_t i = 0;
    while (r >= left[i]) r -= left[i++];
    --left[i];
    --remaining;

    const std::uint32_t idea = entries[i].idea;
    if (!have) {
      chosen = idea;
      have = true;
      continue;
    }
    const double u = table[idea];
    const double c = table[chosen];
    const bool better = mode == PickMode::Best ? u > c : u < c;
    if (better || (u == c && idea < chosen)) chosen = idea;
  }
  return chosen;
}

/// What one agent's turn did to the pooled population.
struct ActionOutcome {
  OperatorKind kind;
  std::int64_t pooled_delta = 0;
  bool reseeded = false;
};

namespace detail {

inline std::int64_t broadcast(std::span<AgentState> agents, NodeId actor, std::span<const NodeId> neighbors,
                              std::uint32_t idea) {
  agents[actor].ideas.add(idea);
  for (NodeId nb : neighbors) agents[nb].ideas.add(idea);
  return 1 + static_cast<std::int64_t>(neighbors.size());
}

template <class URBG>
std::uint32_t mutate(URBG& rng, std::uint32_t idea, int bits, double rate) {
  for (int i = 0; i < bits; ++i)
    if (bernoulli(rng, rate)) idea ^= std::uint32_t{1} << i;
  return idea;
}

inline void check_actor(std::span<AgentState> agents, NodeId actor) {
  require(actor < agents.size(), "acting agent out of range");
  if (agents[actor].ideas.empty()) throw EmptyPopulation("acting agent has no ideas");
}

}  // namespace detail

/// Advocacy: copy the best of r_p sampled ideas to self and every neighbor.
template <class URBG>
ActionOutcome op_replicate(std::span<AgentState> agents, NodeId actor, std::span<const NodeId> neighbors,
                           int sample_size, URBG& rng) {
  detail::check_actor(agents, actor);
  const auto& self = agents[actor];
  const auto idea = preferential_pick(self.ideas, self.perceived, sample_size, PickMode::Best, rng);
  return {OperatorKind::Replication, detail::broadcast(agents, actor, neighbors, idea)};
}

/// Criticism: drop one copy of the worst sampled idea from self and from
/// each neighbor that holds it.
template <class URBG>
ActionOutcome op_subtract(std::span<AgentState> agents, NodeId actor, std::span<const NodeId> neighbors,
                          int sample_size, URBG& rng) {
  detail::check_actor(agents, actor);
  auto& self = agents[actor];
  const auto idea = preferential_pick(self.ideas, self.perceived, sample_size, PickMode::Worst, rng);
  std::int64_t delta = 0;
  if (self.ideas.remove_one(idea)) --delta;
  for (NodeId nb : neighbors)
    if (agents[nb].ideas.remove_one(idea)) --delta;
  return {OperatorKind::SubtractiveSelection, delta};
}

/// Best of `offspring` independently mutated copies of one random parent,
/// judged by the actor's perceived utility. The parent is not a candidate.
template <class URBG>
ActionOutcome op_intelligent_mutation(std::span<AgentState> agents, NodeId actor, std::span<const NodeId> neighbors,
                                      int offspring, double rate, URBG& rng) {
  detail::check_actor(agents, actor);
  detail::require(offspring >= 1, "intelligent mutation needs at least one offspring");
  detail::require(detail::is_probability(rate), "mutation rate must be in [0,1]");
  const auto& self = agents[actor];
  const int bits = self.perceived.bits();
  const auto parent = self.ideas.sample_copy(rng);
  std::uint32_t best = detail::mutate(rng, parent, bits, rate);
  for (int i = 1; i < offspring; ++i) {
    const auto child = detail::mutate(rng, parent, bits, rate);
    const double u = self.perceived[child];
    const double b = self.perceived[best];
    if (u > b || (u == b && child < best)) best = child;
  }
  return {OperatorKind::IntelligentMutation, detail::broadcast(agents, actor, neighbors, best)};
}

template <class URBG>
ActionOutcome op_random_mutation(std::span<AgentState> agents, NodeId actor, std::span<const NodeId> neighbors,
                                 double rate, URBG& rng) {
  auto out = op_intelligent_mutation(agents, actor, neighbors, 1, rate, rng);
  out.kind = OperatorKind::RandomMutation;
  return out;
}

/// Multi-point crossover of two parents drawn with replacement; each locus
/// swaps between the offspring with probability p_s. Both offspring spread.
template <class URBG>
ActionOutcome op_recombine(std::span<AgentState> agents, NodeId actor, std::span<const NodeId> neighbors,
                           double switch_prob, URBG& rng) {
  detail::check_actor(agents, actor);
  detail::require(detail::is_probability(switch_prob), "switch probability must be in [0,1]");
  const auto& self = agents[actor];
  const int bits = self.perceived.bits();
  std::uint32_t a = self.ideas.sample_copy(rng);
  std::uint32_t b = self.ideas.sample_copy(rng);
  for (int i = 0; i < bits; ++i) {
    if (!detail::bernoulli(rng, switch_prob)) continue;
    const std::uint32_t mask = std::uint32_t{1} << i;
    if (((a ^ b) & mask) != 0) {
      a ^= mask;
      b ^= mask;
    }
  }
  std::int64_t delta = detail::broadcast(agents, actor, neighbors, a);
  delta += detail::broadcast(agents, actor, neighbors, b);
  return {OperatorKind::Recombination, delta};
}

template <class URBG>
ActionOutcome apply_operator(OperatorKind kind, std::span<AgentState> agents, NodeId actor,
                             std::span<const NodeId> neighbors, const OperatorParams& params, URBG& rng) {
  switch (kind) {
    case OperatorKind::Replication: return op_replicate(agents, actor, neighbors, params.sample_size, rng);
    case OperatorKind::SubtractiveSelection: return op_subtract(agents, actor, neighbors, params.sample_size, rng);
    case OperatorKind::RandomMutation: return op_random_mutation(agents, actor, neighbors, params.mutation_rate, rng);
    case OperatorKind::IntelligentMutation:
      return op_intelligent_mutation(agents, actor, neighbors, params.mutation_offspring, params.mutation_rate, rng);
    case OperatorKind::Recombination: return op_recombine(agents, actor, neighbors, params.switch_prob, rng);
  }
  throw InvalidInput("unknown operator");
}

}  // namespace ideaevo
