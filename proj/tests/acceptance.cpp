// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "ideaevo/ideaevo.hpp"
#include "oracles.hpp"

using namespace ideaevo;

namespace {

constexpr std::uint64_t kMasterSeed = 1;

struct Verdict {
  bool ok = true;
  std::string detail;

  template <class... Args>
  void check(bool cond, const char* fmt, Args... args) {
    char buf[256];
    if constexpr (sizeof...(Args) == 0)
      std::snprintf(buf, sizeof buf, "%s", fmt);
    else
      std::snprintf(buf, sizeof buf, fmt, args...);
    if (!detail.empty()) detail += "; ";
    if (!cond) detail += "FAILED ";
    detail += buf;
    ok = ok && cond;
  }
};

int g_failures = 0;

void report(int id, const char* name, const Verdict& v, double seconds) {
  std::printf("%s criterion %d (%s) [%.1fs]: %s\n", v.ok ? "PASS" : "FAIL", id, name, seconds, v.detail.c_str());
  std::fflush(stdout);
  if (!v.ok) ++g_failures;
}

template <class F>
void timed(int id, const char* name, F&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    body(v);
  } catch (const std::exception& e) {
    v.check(false, "exception: %s", e.what());
  }
  report(id, name, v, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
}

ExperimentSpec desk_spec(int runs) {
  ExperimentSpec s;
  s.seed = kMasterSeed;
  s.runs = runs;
  s.workers = 1;
  return s;
}

const CellSummary& find_cell(const std::vector<CellSummary>& cells, auto pred) {
  for (const auto& c : cells)
    if (pred(c.cell)) return c;
  throw std::runtime_error("cell not found");
}

bool same(double a, double b) { return std::abs(a - b) < 1e-9; }

std::vector<ResultRow> g_all_rows;

void keep_rows(const std::vector<ResultRow>& rows) { g_all_rows.insert(g_all_rows.end(), rows.begin(), rows.end()); }

void criterion1(Verdict& v) {
  auto s = desk_spec(100);
  s.grid_step = 0.25;
  const auto out = run_experiment_1(s);
  keep_rows(out.rows);
  const auto grid = unit_grid(0.25);

  double worst_gap = 1e9;
  for (double beta : grid) {
    const auto& lo = find_cell(out.cells, [&](const Cell& c) { return same(c.beta, beta) && same(c.xi, 0.0); });
    const auto& hi = find_cell(out.cells, [&](const Cell& c) { return same(c.beta, beta) && same(c.xi, 1.0); });
    worst_gap = std::min(worst_gap, lo.convergence.mean - hi.convergence.mean);
  }
  v.check(worst_gap >= 0.15, "a: min over beta of conv(xi=0)-conv(xi=1) = %.4f (>= 0.15)", worst_gap);

  double worst_spread = 0.0;
  for (double xi : grid) {
    double mn = 1e9, mx = -1e9;
    for (double beta : grid) {
      const auto& c = find_cell(out.cells, [&](const Cell& x) { return same(x.beta, beta) && same(x.xi, xi); });
      mn = std::min(mn, c.convergence.mean);
      mx = std::max(mx, c.convergence.mean);
    }
    worst_spread = std::max(worst_spread, mx - mn);
  }
  v.check(worst_spread <= 0.05, "b: max convergence spread across beta = %.4f (<= 0.05)", worst_spread);

  const double u_b1 =
      find_cell(out.cells, [](const Cell& c) { return same(c.beta, 1.0) && same(c.xi, 0.5); }).mode_utility.mean;
  const double u_x1 =
      find_cell(out.cells, [](const Cell& c) { return same(c.beta, 0.5) && same(c.xi, 1.0); }).mode_utility.mean;
  const double u_00 =
      find_cell(out.cells, [](const Cell& c) { return same(c.beta, 0.0) && same(c.xi, 0.0); }).mode_utility.mean;
  v.check(std::abs(u_b1 - 0.5) <= 0.15 && std::abs(u_x1 - 0.5) <= 0.15,
          "c: utility(1,0.5) = %.4f, utility(0.5,1) = %.4f (0.5 +- 0.15)", u_b1, u_x1);
  v.check(u_00 - std::max(u_b1, u_x1) >= 0.2, "c: utility(0,0) = %.4f exceeds both by >= 0.2", u_00);
}

void criterion2(Verdict& v) {
  auto s = desk_spec(100);
  s.beta_step = 0.25;
  s.p_step = 0.1;
  const auto out = run_experiment_2(s);
  keep_rows(out.rows);

  std::vector<double> ps, conv, util;
  for (const auto& c : out.cells) {
    if (!same(c.cell.beta, 0.0)) continue;
    ps.push_back(c.cell.p);
    conv.push_back(c.convergence.mean);
    util.push_back(c.mode_utility.mean);
  }
  const double rho = spearman(ps, conv);
  v.check(rho >= 0.9, "a: Spearman(p, convergence) at beta=0 = %.4f (>= 0.9)", rho);

  const auto best = static_cast<std::size_t>(std::max_element(util.begin(), util.end()) - util.begin());
  const double p_best = ps[best];
  v.check(p_best >= 0.6 - 1e-9 && p_best <= 0.95, "b: argmax p = %.1f (in [0.6, 0.95])", p_best);
  v.check(util[best] > util.front() && util[best] > util.back(),
          "b: utility at argmax %.4f vs p=0 %.4f and p=1 %.4f", util[best], util.front(), util.back());
}

void criterion3(Verdict& v) {
  auto s = desk_spec(100);
  s.sizes = {5, 20, 80, 320, 640};
  const auto out = run_experiment_3(s);
  keep_rows(out.rows);

  for (auto t : s.topologies) {
    std::vector<double> ns, conv, util;
    for (const auto& c : out.cells) {
      if (c.cell.topology != t) continue;
      ns.push_back(c.cell.n_agents);
      conv.push_back(c.convergence.mean);
      util.push_back(c.mode_utility.mean);
    }
    bool strict = true;
    for (std::size_t i = 1; i < conv.size(); ++i) strict = strict && conv[i] < conv[i - 1];
    const double rho = spearman(ns, conv);
    v.check(strict && rho <= -0.9, "a[%s]: convergence %.3f..%.3f strictly decreasing=%d, rho = %.3f",
            std::string(topology_name(t)).c_str(), conv.front(), conv.back(), static_cast<int>(strict), rho);
    v.check(util.back() > util.front(), "b[%s]: utility N=640 %.4f > N=5 %.4f",
            std::string(topology_name(t)).c_str(), util.back(), util.front());
  }
}

void criterion4(Verdict& v) {
  auto s = desk_spec(500);
  s.histogram_size = 640;
  const auto h = run_histogram(s);
  keep_rows(h.sweep.rows);

  std::map<Topology, double> frac;
  for (const auto& c : h.sweep.cells) frac[c.cell.topology] = c.max_utility_fraction;
  for (const auto& pr : h.pairs) {
    const double ma = summarize(h.utilities.at(pr.first)).mean;
    const double mb = summarize(h.utilities.at(pr.second)).mean;
    const auto a = std::string(topology_name(pr.first));
    const auto b = std::string(topology_name(pr.second));
    if (pr.first == Topology::SmallWorld && pr.second == Topology::ScaleFree) {
      v.check(pr.test.p_two_sided < 0.05 && pr.test.u > pr.test.u_other,
              "%s vs %s: p = %.3g, U = %.0f vs %.0f, means %.4f vs %.4f", a.c_str(), b.c_str(), pr.test.p_two_sided,
              pr.test.u, pr.test.u_other, ma, mb);
    } else {
      v.check(true, "%s vs %s: p = %.3g (reported)", a.c_str(), b.c_str(), pr.test.p_two_sided);
    }
  }
  const double sw = frac[Topology::SmallWorld];
  v.check(sw > frac[Topology::Random] && sw > frac[Topology::ScaleFree],
          "fraction at utility 1.0: sw %.3f, rd %.3f, sf %.3f", sw, frac[Topology::Random], frac[Topology::ScaleFree]);
}

void criterion5(Verdict& v) {
  Rng rng(kMasterSeed);
  double max_diff = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto set = generate_representatives(rng, 10, 10);
    std::vector<std::pair<std::uint32_t, double>> anchors;
    for (const auto& r : set.entries()) anchors.emplace_back(r.idea.index(), r.utility);
    const auto table = build_table(set, TableKind::True);
    for (std::uint32_t i = 0; i < 1024; ++i)
      max_diff = std::max(max_diff, std::abs(table[i] - oracle::weighted_utility(anchors, i, 10)));
  }
  v.check(max_diff < 1e-12, "interpolation max |diff| over 100 landscapes = %.3g", max_diff);

  double max_h = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    PooledPopulation pool(10);
    std::vector<std::uint32_t> labels;
    const auto kinds = 1 + detail::uniform_below(rng, 40);
    for (std::uint64_t k = 0; k < kinds; ++k) {
      const auto idea = static_cast<std::uint32_t>(detail::uniform_below(rng, 1024));
      const auto copies = 1 + detail::uniform_below(rng, 30);
      pool.add(idea, copies);
      labels.insert(labels.end(), copies, idea);
    }
    max_h = std::max(max_h, std::abs(entropy(pool) - oracle::label_entropy(labels)));
  }
  v.check(max_h < 1e-9, "entropy max |diff| over 1000 pools = %.3g", max_h);

  int agree = 0, total = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto na = 3 + detail::uniform_below(rng, 6);
    const auto nb = 3 + detail::uniform_below(rng, 6);
    const double shift = detail::uniform01(rng) * 3.0;
    const bool coarse = detail::bernoulli(rng, 0.3);
    auto draw = [&](double offset) {
      const double x = detail::uniform01(rng) * 4.0 + offset;
      return coarse ? std::floor(x) : x;
    };
    std::vector<double> a, b;
    for (std::uint64_t i = 0; i < na; ++i) a.push_back(draw(shift));
    for (std::uint64_t i = 0; i < nb; ++i) b.push_back(draw(0.0));
    const bool all_equal = std::all_of(a.begin(), a.end(), [&](double x) { return x == a[0]; }) &&
                           std::all_of(b.begin(), b.end(), [&](double x) { return x == a[0]; });
    if (all_equal) continue;
    const bool approx = mann_whitney(a, b).p_two_sided < 0.05;
    const bool exact = oracle::exact_mann_whitney_p(a, b) < 0.05;
    agree += approx == exact;
    ++total;
  }
  const double rate = static_cast<double>(agree) / total;
  v.check(rate >= 0.95, "Mann-Whitney decision agreement %d/%d = %.3f (>= 0.95)", agree, total, rate);
}

void criterion6(Verdict& v) {
  bool edges_ok = true;
  for (std::size_t n : {5u, 20u, 640u}) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      for (auto t : {Topology::Random, Topology::SmallWorld, Topology::ScaleFree}) {
        Rng rng(seed);
        const auto g = make_graph(t, n, rng);
        edges_ok = edges_ok && g.n_edges() == 2 * n && g.average_degree() == 4.0;
      }
    }
  }
  v.check(edges_ok, "edges = 2N, average degree 4 (3 generators x 100 seeds x N in {5,20,640})");

  // Random actions on random states, each checked against a before/after snapshot.
  Rng rng(kMasterSeed);
  std::uint64_t bad_delta = 0, actions = 0;
  std::map<OperatorKind, std::uint64_t> per_kind;
  while (actions < 100000) {
    SimConfig cfg;
    cfg.n_agents = 5 + static_cast<int>(detail::uniform_below(rng, 16));
    cfg.topology = static_cast<Topology>(detail::uniform_below(rng, 4));
    cfg.initial_ideas = 1 + static_cast<int>(detail::uniform_below(rng, 5));
    cfg.p = detail::uniform01(rng);
    auto state = init_run(cfg, rng);
    for (int a = 0; a < 200; ++a, ++actions) {
      const auto actor = static_cast<NodeId>(detail::uniform_below(rng, state.agents.size()));
      if (state.agents[actor].ideas.empty()) {
        act(state, actor, rng);
        continue;
      }
      const auto before = state.agents;
      const auto nbrs = state.graph.neighbors(actor);
      const auto kind = kAllOperators[detail::uniform_below(rng, 5)];
      const auto out = apply_operator(kind, std::span<AgentState>(state.agents), actor, nbrs, cfg.ops, rng);
      ++per_kind[kind];

      std::int64_t observed = 0;
      for (std::size_t j = 0; j < before.size(); ++j)
        observed += static_cast<std::int64_t>(state.agents[j].ideas.total()) -
                    static_cast<std::int64_t>(before[j].ideas.total());
      const auto reach = static_cast<std::int64_t>(1 + nbrs.size());
      std::int64_t expected = 0;
      switch (kind) {
        case OperatorKind::Replication:
        case OperatorKind::RandomMutation:
        case OperatorKind::IntelligentMutation: expected = reach; break;
        case OperatorKind::Recombination: expected = 2 * reach; break;
        case OperatorKind::SubtractiveSelection: {
          // The removed idea is whichever one the actor lost a copy of.
          std::uint32_t removed = 0;
          for (const auto& e : before[actor].ideas.entries())
            if (state.agents[actor].ideas.count(e.idea) < e.count) removed = e.idea;
          expected = -1;
          for (NodeId nb : nbrs) expected -= before[nb].ideas.count(removed) > 0;
          break;
        }
      }
      if (observed != expected || out.pooled_delta != expected) ++bad_delta;
    }
  }
  v.check(bad_delta == 0 && per_kind.size() == 5, "operator deltas: %llu mismatches in %llu actions",
          static_cast<unsigned long long>(bad_delta), static_cast<unsigned long long>(actions));

  std::uint64_t bad_actions = 0;
  for (const auto& r : g_all_rows)
    bad_actions += r.result.actions != static_cast<std::uint64_t>(r.cell.n_agents) * 60u;
  v.check(bad_actions == 0 && !g_all_rows.empty(), "action count = N*T on %zu sweep runs (%llu mismatches)",
          g_all_rows.size(), static_cast<unsigned long long>(bad_actions));

  std::uint64_t nondet = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    SimConfig cfg;
    cfg.seed = seed;
    cfg.n_agents = 5 + static_cast<int>(seed % 40);
    cfg.topology = static_cast<Topology>(seed % 4);
    cfg.bias = 0.25 * static_cast<double>(seed % 5);
    nondet += !(run(cfg) == run(cfg));
  }
  v.check(nondet == 0, "bit-identical RunResult on repeated seeds (%llu of 200 differ)",
          static_cast<unsigned long long>(nondet));

  // chi-square goodness of fit, 0.999 quantiles by degrees of freedom
  const std::map<int, double> critical = {{1, 10.828}, {2, 13.816}, {4, 18.467}};
  double worst = 0.0;
  bool fit = true;
  for (double p : {0.0, 0.3, 0.5, 0.8, 1.0}) {
    const auto probs = action_probabilities(p);
    std::array<double, 5> counts{};
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) counts[static_cast<std::size_t>(choose_action(p, rng))] += 1;
    double chi2 = 0.0;
    int cats = 0;
    for (std::size_t k = 0; k < 5; ++k) {
      if (probs[k] == 0.0) {
        fit = fit && counts[k] == 0;
        continue;
      }
      const double e = probs[k] * draws;
      chi2 += (counts[k] - e) * (counts[k] - e) / e;
      ++cats;
    }
    fit = fit && chi2 < critical.at(cats - 1);
    worst = std::max(worst, chi2 / critical.at(cats - 1));
  }
  v.check(fit, "choose_action chi-square within 0.999 critical values (worst ratio %.3f)", worst);
}

}  // namespace

int main() {
  timed(5, "oracle suites", criterion5);
  timed(1, "experiment 1: bias and noise", criterion1);
  timed(2, "experiment 2: selection pressure", criterion2);
  timed(3, "experiment 3: group size and topology", criterion3);
  timed(4, "topology comparison at N=640", criterion4);
  timed(6, "invariant suites", criterion6);
  std::printf("%s: %d criteria failed\n", g_failures == 0 ? "ACCEPTED" : "REJECTED", g_failures);
  return g_failures == 0 ? 0 : 1;
}
