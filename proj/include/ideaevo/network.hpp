#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <queue>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ideaevo/error.hpp"
#include "ideaevo/random.hpp"

namespace ideaevo {

using NodeId = std::uint32_t;

/// Simple undirected graph. Edges are stored as (lo, hi) pairs in sorted
/// order; neighbor lists are sorted ascending.
class Graph {
 public:
  using Edge = std::pair<NodeId, NodeId>;

  explicit Graph(std::size_t n_nodes) : adj_(n_nodes) {}

  std::size_t n_nodes() const noexcept { return adj_.size(); }
  std::size_t n_edges() const noexcept { return edges_.size(); }
  const std::set<Edge>& edges() const noexcept { return edges_; }
  std::span<const NodeId> neighbors(NodeId u) const { return adj_[u]; }
  std::size_t degree(NodeId u) const { return adj_[u].size(); }

  double average_degree() const {
    return n_nodes() == 0 ? 0.0 : 2.0 * static_cast<double>(n_edges()) / static_cast<double>(n_nodes());
  }

  bool has_edge(NodeId u, NodeId v) const { return edges_.contains(key(u, v)); }

  /// Returns false (and changes nothing) for self-loops and duplicates.
  bool add_edge(NodeId u, NodeId v) {
    detail::require(u < n_nodes() && v < n_nodes(), "edge endpoint out of range");
    if (u == v || !edges_.insert(key(u, v)).second) return false;
    insert_sorted(adj_[u], v);
    insert_sorted(adj_[v], u);
    return true;
  }

  bool remove_edge(NodeId u, NodeId v) {
    if (edges_.erase(key(u, v)) == 0) return false;
    erase_sorted(adj_[u], v);
    erase_sorted(adj_[v], u);
    return true;
  }

  friend bool operator==(const Graph& a, const Graph& b) { return a.adj_.size() == b.adj_.size() && a.edges_ == b.edges_; }

 private:
  static Edge key(NodeId u, NodeId v) { return u < v ? Edge{u, v} : Edge{v, u}; }
  static void insert_sorted(std::vector<NodeId>& xs, NodeId x) { xs.insert(std::lower_bound(xs.begin(), xs.end(), x), x); }
  static void erase_sorted(std::vector<NodeId>& xs, NodeId x) { xs.erase(std::lower_bound(xs.begin(), xs.end(), x)); }

  std::vector<std::vector<NodeId>> adj_;
  std::set<Edge> edges_;
};

enum class Topology { Complete, Random, SmallWorld, ScaleFree };

inline std::string_view topology_name(Topology t) {
  switch (t) {
    case Topology::Complete: return "complete";
    case Topology::Random: return "rd";
    case Topology::SmallWorld: return "sw";
    case Topology::ScaleFree: return "sf";
  }
  return "?";
}

inline Topology parse_topology(std::string_view s) {
  if (s == "complete") return Topology::Complete;
  if (s == "rd" || s == "random") return Topology::Random;
  if (s == "sw" || s == "small_world") return Topology::SmallWorld;
  if (s == "sf" || s == "scale_free") return Topology::ScaleFree;
  throw InvalidInput("unknown topology: " + std::string(s));
}

inline Graph complete_graph(std::size_t n) {
  detail::require(n >= 2, "complete graph needs N >= 2");
  Graph g(n);
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v) g.add_edge(u, v);
  return g;
}

/// 2N distinct edges between uniformly chosen node pairs.
template <class URBG>
Graph random_graph(std::size_t n, URBG& rng) {
  detail::require(n >= 5, "random graph needs N >= 5 so that 2N edges fit");
  Graph g(n);
  while (g.n_edges() < 2 * n) {
    const auto u = static_cast<NodeId>(detail::uniform_below(rng, n));
    const auto v = static_cast<NodeId>(detail::uniform_below(rng, n));
    g.add_edge(u, v);
  }
  return g;
}

/// Node i linked to i+-1 and i+-2 (mod N).
inline Graph ring_lattice(std::size_t n) {
  detail::require(n >= 5, "ring lattice needs N >= 5");
  Graph g(n);
  for (NodeId i = 0; i < n; ++i) {
    g.add_edge(i, static_cast<NodeId>((i + 1) % n));
    g.add_edge(i, static_cast<NodeId>((i + 2) % n));
  }
  return g;
}

inline constexpr double kSmallWorldRewireFraction = 0.1;
inline constexpr int kRewireRetries = 100;

/// Ring lattice, then round(fraction * 2N) lattice edges picked without
/// replacement each get one endpoint (coin flip) moved to a random node.
/// Targets forming self-loops or duplicates are redrawn; a rewire that finds
/// no valid target in kRewireRetries attempts is skipped.
template <class URBG>
Graph small_world(std::size_t n, URBG& rng, double rewire_fraction = kSmallWorldRewireFraction) {
  detail::require(detail::is_probability(rewire_fraction), "rewire fraction must be in [0,1]");
  Graph g = ring_lattice(n);
  std::vector<Graph::Edge> lattice(g.edges().begin(), g.edges().end());
  const auto n_rewire = static_cast<std::size_t>(std::llround(rewire_fraction * static_cast<double>(lattice.size())));

  // partial Fisher-Yates: the first n_rewire slots become the chosen edges
  for (std::size_t i = 0; i < n_rewire; ++i) {
    const auto j = i + static_cast<std::size_t>(detail::uniform_below(rng, lattice.size() - i));
    std::swap(lattice[i], lattice[j]);
  }

  for (std::size_t i = 0; i < n_rewire; ++i) {
    auto [a, b] = lattice[i];
    if (detail::uniform_below(rng, 2) == 0) std::swap(a, b);  // a stays, b moves
    for (int attempt = 0; attempt < kRewireRetries; ++attempt) {
      const auto w = static_cast<NodeId>(detail::uniform_below(rng, n));
      if (w == a || g.has_edge(a, w)) continue;
      g.remove_edge(a, b);
      g.add_edge(a, w);
      break;
    }
  }
  return g;
}

inline constexpr std::size_t kScaleFreeSeedSize = 5;
inline constexpr std::size_t kScaleFreeLinks = 2;

/// Preferential attachment grown from K5; each arrival links to two distinct
/// existing nodes drawn by degree as it stood when the node arrived.
template <class URBG>
Graph scale_free(std::size_t n, URBG& rng) {
  detail::require(n >= kScaleFreeSeedSize, "scale-free graph needs N >= 5");
  Graph g(n);
  for (NodeId u = 0; u < kScaleFreeSeedSize; ++u)
    for (NodeId v = u + 1; v < kScaleFreeSeedSize; ++v) g.add_edge(u, v);

  std::vector<std::uint64_t> degree(n, 0);
  for (NodeId u = 0; u < kScaleFreeSeedSize; ++u) degree[u] = kScaleFreeSeedSize - 1;
  std::uint64_t degree_sum = kScaleFreeSeedSize * (kScaleFreeSeedSize - 1);

  for (auto node = static_cast<NodeId>(kScaleFreeSeedSize); node < n; ++node) {
    std::vector<NodeId> targets;
    std::uint64_t remaining = degree_sum;
    while (targets.size() < kScaleFreeLinks) {
      std::uint64_t r = detail::uniform_below(rng, remaining);
      NodeId pick = 0;
      for (NodeId u = 0; u < node; ++u) {
        if (std::find(targets.begin(), targets.end(), u) != targets.end()) continue;
        if (r < degree[u]) {
          pick = u;
          break;
        }
        r -= degree[u];
      }
      targets.push_back(pick);
      remaining -= degree[pick];
    }
    for (NodeId t : targets) {
      g.add_edge(node, t);
      ++degree[t];
    }
    degree[node] = kScaleFreeLinks;
    degree_sum += 2 * kScaleFreeLinks;
  }
  return g;
}

template <class URBG>
Graph make_graph(Topology t, std::size_t n, URBG& rng) {
  switch (t) {
    case Topology::Complete: return complete_graph(n);
    case Topology::Random: return random_graph(n, rng);
    case Topology::SmallWorld: return small_world(n, rng);
    case Topology::ScaleFree: return scale_free(n, rng);
  }
  throw InvalidInput("unknown topology");
}

inline bool is_connected(const Graph& g) {
  if (g.n_nodes() == 0) return true;
  std::vector<bool> seen(g.n_nodes(), false);
  std::queue<NodeId> frontier;
  frontier.push(0);
  seen[0] = true;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const NodeId u = frontier.front();
    frontier.pop();
    for (NodeId v : g.neighbors(u)) {
      if (seen[v]) continue;
      seen[v] = true;
      ++reached;
      frontier.push(v);
    }
  }
  return reached == g.n_nodes();
}

// Edge list export, one "u v" pair per line.
inline void write_edge_list(std::ostream& os, const Graph& g) {
  for (const auto& [u, v] : g.edges()) os << u << ' ' << v << '\n';
}

}  // namespace ideaevo
