#pragma once

#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "ideaevo/error.hpp"
#include "ideaevo/landscape.hpp"
#include "ideaevo/metrics.hpp"
#include "ideaevo/network.hpp"
#include "ideaevo/population.hpp"
#include "ideaevo/random.hpp"

namespace ideaevo {

/// Parameters of one simulation run. Defaults follow the published settings
/// table; p, N, topology, bias and noise are the experimental axes.
struct SimConfig {
  int bits = 10;               // M
  int representatives = 10;    // n
  OperatorParams ops{};        // r_p, r_m, p_m, p_s
  double p = 0.5;
  int n_agents = 5;            // N
  Topology topology = Topology::Complete;
  int initial_ideas = 5;       // k
  double bias = 0.0;           // beta
  double noise = 0.2;          // xi
  int iterations = 60;         // T
  std::uint64_t seed = 0;

  void validate() const {
    detail::require(bits >= 1 && bits <= kMaxBits, "M must be in [1, 24]");
    detail::require(representatives >= 2 && static_cast<std::uint64_t>(representatives) <= Idea::space_size(bits),
                    "n must be in [2, 2^M]");
    detail::require(ops.sample_size >= 1, "r_p must be >= 1");
    detail::require(ops.mutation_offspring >= 1, "r_m must be >= 1");
    detail::require(detail::is_probability(ops.mutation_rate), "p_m must be in [0,1]");
    detail::require(detail::is_probability(ops.switch_prob), "p_s must be in [0,1]");
    detail::require(detail::is_probability(p), "p must be in [0,1]");
    detail::require(detail::is_probability(bias), "beta must be in [0,1]");
    detail::require(detail::is_probability(noise), "xi must be in [0,1]");
    detail::require(n_agents >= 2, "N must be >= 2");
    detail::require(topology == Topology::Complete || n_agents >= 5, "sparse topologies need N >= 5");
    detail::require(initial_ideas >= 0, "k must be >= 0");
    detail::require(iterations >= 0, "T must be >= 0");
  }
};

struct SimState {
  SimConfig config;
  UtilityTable true_table;
  UtilityTable master_table;
  Graph graph;
  std::vector<AgentState> agents;
  int iteration = 0;
  std::uint64_t actions = 0;
  std::int64_t pooled_delta = 0;  // sum of per-action pooled-count changes
};

struct RunResult {
  double convergence = 0.0;
  double mode_utility = 0.0;
  std::uint32_t mode_idea_index = 0;
  std::uint64_t pooled_total = 0;
  std::uint64_t distinct_types = 0;
  bool graph_connected = false;
  std::uint64_t seed = 0;
  std::uint64_t actions = 0;

  friend bool operator==(const RunResult&, const RunResult&) = default;
};

/// Draw order: landscape, graph, initial ideas. Each agent keeps only its own
/// noisy table; the true table stays with the state for scoring.
template <class URBG>
SimState init_run(const SimConfig& cfg, URBG& rng) {
  cfg.validate();
  auto bundle = make_landscape(rng, cfg.bits, cfg.representatives, cfg.bias, cfg.noise, cfg.n_agents);
  auto graph = make_graph(cfg.topology, static_cast<std::size_t>(cfg.n_agents), rng);

  std::vector<AgentState> agents;
  agents.reserve(static_cast<std::size_t>(cfg.n_agents));
  const std::uint64_t space = Idea::space_size(cfg.bits);
  for (int j = 0; j < cfg.n_agents; ++j) {
    AgentState a{static_cast<NodeId>(j), std::move(bundle.individual_tables[static_cast<std::size_t>(j)]), {}};
    for (int i = 0; i < cfg.initial_ideas; ++i) a.ideas.add(static_cast<std::uint32_t>(detail::uniform_below(rng, space)));
    agents.push_back(std::move(a));
  }
  return SimState{cfg, std::move(bundle.true_table), std::move(bundle.master_table), std::move(graph),
                  std::move(agents)};
}

/// One agent's turn. An agent with no ideas left adds one random idea to its
/// own mind instead of acting.
template <class URBG>
ActionOutcome act(SimState& s, NodeId actor, URBG& rng) {
  auto& self = s.agents[actor];
  if (self.ideas.empty()) {
    self.ideas.add(static_cast<std::uint32_t>(detail::uniform_below(rng, Idea::space_size(s.config.bits))));
    return {OperatorKind::Replication, 1, true};
  }
  const auto kind = choose_action(s.config.p, rng);
  return apply_operator(kind, std::span<AgentState>(s.agents), actor, s.graph.neighbors(actor), s.config.ops, rng);
}

// Uniform random permutation of 0..n-1 (Fisher-Yates).
template <class URBG>
std::vector<NodeId> turn_order(std::size_t n, URBG& rng) {
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), NodeId{0});
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(detail::uniform_below(rng, i));
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

/// One iteration: every agent acts exactly once, in a freshly shuffled order.
template <class URBG>
void step(SimState& s, URBG& rng) {
  detail::require(s.iteration < s.config.iterations, "step past the configured iteration count");
  for (NodeId actor : turn_order(s.agents.size(), rng)) {
    const auto out = act(s, actor, rng);
    s.pooled_delta += out.pooled_delta;
    ++s.actions;
  }
  ++s.iteration;
}

inline RunResult evaluate(const SimState& s) {
  const auto pool = PooledPopulation::from_agents(s.config.bits, s.agents);
  RunResult r;
  r.pooled_total = pool.total();
  r.distinct_types = pool.distinct();
  r.graph_connected = is_connected(s.graph);
  r.seed = s.config.seed;
  r.actions = s.actions;
  if (pool.total() > 0) {
    r.convergence = convergence(entropy(pool), s.config.bits);
    const auto mode = mode_idea(pool);
    r.mode_idea_index = mode.index();
    r.mode_utility = s.true_table.at(mode);
  }
  return r;
}

inline RunResult run(const SimConfig& cfg) {
  Rng rng(cfg.seed);
  auto state = init_run(cfg, rng);
  while (state.iteration < cfg.iterations) step(state, rng);
  auto result = evaluate(state);
#ifdef IDEAEVO_CHECK_INVARIANTS
  if (result.actions != static_cast<std::uint64_t>(cfg.n_agents) * static_cast<std::uint64_t>(cfg.iterations))
    throw std::logic_error("action count differs from N*T");
  if (static_cast<std::int64_t>(result.pooled_total) !=
      static_cast<std::int64_t>(cfg.n_agents) * cfg.initial_ideas + state.pooled_delta)
    throw std::logic_error("pooled total differs from N*k plus summed deltas");
#endif
  return result;
}

}  // namespace ideaevo
