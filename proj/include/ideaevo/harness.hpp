#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "ideaevo/engine.hpp"
#include "ideaevo/error.hpp"
#include "ideaevo/landscape.hpp"
#include "ideaevo/random.hpp"
#include "ideaevo/stats.hpp"
#include "ideaevo/version.hpp"

namespace ideaevo {

inline constexpr const char* kResultHeader =
    "experiment,beta,xi,p,n_agents,topology,run_index,seed,convergence,mode_utility,mode_idea_index,pooled_total,"
    "distinct_types,graph_connected,wall_ms";

/// One point of a sweep.
struct Cell {
  std::size_t id = 0;
  double beta = 0.0;
  double xi = 0.2;
  double p = 0.5;
  int n_agents = 5;
  Topology topology = Topology::Complete;
};

struct ResultRow {
  std::string experiment;
  Cell cell;
  int run_index = 0;
  RunResult result;
  double wall_ms = 0.0;
};

/// What to run and where to put it. `base` carries the fixed parameters; the
/// step fields control the [0, 1] grids of the swept probability axes.
struct ExperimentSpec {
  std::string experiment = "run";
  SimConfig base{};
  std::uint64_t seed = 1;
  int runs = 500;
  double grid_step = 0.1;
  double beta_step = 0.0;  // 0 means "use grid_step"
  double xi_step = 0.0;
  double p_step = 0.0;
  std::vector<int> sizes{5, 10, 20, 40, 80, 160, 320, 640};
  std::vector<Topology> topologies{Topology::Random, Topology::SmallWorld, Topology::ScaleFree};
  int histogram_size = 640;
  std::string out;
  int workers = 1;

  double step_for(double axis_step) const { return axis_step > 0.0 ? axis_step : grid_step; }

  void validate() const {
    detail::require(runs >= 1, "runs must be >= 1");
    detail::require(workers >= 1, "workers must be >= 1");
    for (double s : {grid_step, step_for(beta_step), step_for(xi_step), step_for(p_step)})
      detail::require(s > 0.0 && s <= 1.0, "grid step must be in (0, 1]");
    for (int n : sizes) detail::require(n >= 5, "group sizes must be >= 5");
    detail::require(histogram_size >= 5, "histogram group size must be >= 5");
    detail::require(!sizes.empty() && !topologies.empty(), "size and topology lists must be nonempty");
  }
};

/// Stable mix of (master seed, cell, run) into one run seed.
constexpr std::uint64_t seed_for_run(std::uint64_t master_seed, std::uint64_t cell_id, std::uint64_t run_index) {
  std::uint64_t h = mix64(master_seed);
  h = mix64(h ^ (cell_id * 0xd1b54a32d192ed03ULL));
  h = mix64(h ^ (run_index * 0x8cb92ba72f3d8dd7ULL));
  return h;
}

/// 0, step, 2*step, ... up to 1 inclusive; the last point snaps to 1 when
/// the step does not divide the interval.
inline std::vector<double> unit_grid(double step) {
  detail::require(step > 0.0 && step <= 1.0, "grid step must be in (0, 1]");
  const auto n = static_cast<int>(std::floor(1.0 / step + 1e-9));
  std::vector<double> out;
  for (int i = 0; i <= n; ++i) out.push_back(std::round(i * step * 1e12) / 1e12);
  if (out.back() < 1.0 - 1e-12) out.push_back(1.0);
  return out;
}

inline std::vector<Cell> experiment1_cells(const ExperimentSpec& s) {
  std::vector<Cell> cells;
  for (double beta : unit_grid(s.step_for(s.beta_step)))
    for (double xi : unit_grid(s.step_for(s.xi_step)))
      cells.push_back({cells.size(), beta, xi, s.base.p, s.base.n_agents, s.base.topology});
  return cells;
}

inline std::vector<Cell> experiment2_cells(const ExperimentSpec& s) {
  std::vector<Cell> cells;
  for (double beta : unit_grid(s.step_for(s.beta_step)))
    for (double p : unit_grid(s.step_for(s.p_step)))
      cells.push_back({cells.size(), beta, s.base.noise, p, s.base.n_agents, s.base.topology});
  return cells;
}

inline std::vector<Cell> experiment3_cells(const ExperimentSpec& s) {
  std::vector<Cell> cells;
  for (int n : s.sizes)
    for (Topology t : s.topologies) cells.push_back({cells.size(), s.base.bias, s.base.noise, s.base.p, n, t});
  return cells;
}

inline std::vector<Cell> histogram_cells(const ExperimentSpec& s) {
  std::vector<Cell> cells;
  for (Topology t : s.topologies) cells.push_back({cells.size(), s.base.bias, s.base.noise, s.base.p, s.histogram_size, t});
  return cells;
}

inline SimConfig config_for(const ExperimentSpec& s, const Cell& c, int run_index) {
  SimConfig cfg = s.base;
  cfg.bias = c.beta;
  cfg.noise = c.xi;
  cfg.p = c.p;
  cfg.n_agents = c.n_agents;
  cfg.topology = c.topology;
  cfg.seed = seed_for_run(s.seed, c.id, static_cast<std::uint64_t>(run_index));
  return cfg;
}

/// Runs cells x runs simulations on a worker pool. Rows come back ordered by
/// (cell, run index) regardless of the worker count.
inline std::vector<ResultRow> run_cells(const ExperimentSpec& s, const std::vector<Cell>& cells) {
  s.validate();
  for (const auto& c : cells) config_for(s, c, 0).validate();

  const std::size_t runs = static_cast<std::size_t>(s.runs);
  std::vector<ResultRow> rows(cells.size() * runs);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;

  auto worker = [&] {
    for (std::size_t job = next++; job < rows.size(); job = next++) {
      try {
        const auto& cell = cells[job / runs];
        const int run_index = static_cast<int>(job % runs);
        const auto t0 = std::chrono::steady_clock::now();
        auto result = run(config_for(s, cell, run_index));
        const auto t1 = std::chrono::steady_clock::now();
        rows[job] = ResultRow{s.experiment, cell, run_index, result,
                              std::chrono::duration<double, std::milli>(t1 - t0).count()};
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  const auto n_workers = std::min<std::size_t>(static_cast<std::size_t>(s.workers), std::max<std::size_t>(rows.size(), 1));
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < n_workers; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return rows;
}

inline std::string format_row(const ResultRow& r, bool with_wall = true) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%s,%.10g,%.10g,%.10g,%d,%s,%d,%llu,%.17g,%.17g,%u,%llu,%llu,%d", r.experiment.c_str(),
                r.cell.beta, r.cell.xi, r.cell.p, r.cell.n_agents, std::string(topology_name(r.cell.topology)).c_str(),
                r.run_index, static_cast<unsigned long long>(r.result.seed), r.result.convergence,
                r.result.mode_utility, r.result.mode_idea_index,
                static_cast<unsigned long long>(r.result.pooled_total),
                static_cast<unsigned long long>(r.result.distinct_types), r.result.graph_connected ? 1 : 0);
  std::string line(buf);
  if (with_wall) {
    std::snprintf(buf, sizeof buf, ",%.3f", r.wall_ms);
    line += buf;
  }
  return line;
}

inline nlohmann::json row_to_json(const ResultRow& r) {
  return {{"experiment", r.experiment},
          {"beta", r.cell.beta},
          {"xi", r.cell.xi},
          {"p", r.cell.p},
          {"n_agents", r.cell.n_agents},
          {"topology", std::string(topology_name(r.cell.topology))},
          {"run_index", r.run_index},
          {"seed", r.result.seed},
          {"convergence", r.result.convergence},
          {"mode_utility", r.result.mode_utility},
          {"mode_idea_index", r.result.mode_idea_index},
          {"pooled_total", r.result.pooled_total},
          {"distinct_types", r.result.distinct_types},
          {"graph_connected", r.result.graph_connected},
          {"wall_ms", r.wall_ms}};
}

namespace detail {

inline std::ofstream open_for_write(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError(path.string(), "cannot create output directory");
  }
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError(path.string(), "cannot open for writing");
  return os;
}

inline void finish(std::ofstream& os, const std::filesystem::path& path) {
  os.flush();
  if (!os) throw IoError(path.string(), "write failed");
}

inline std::filesystem::path sibling(const std::filesystem::path& out, const std::string& suffix) {
  auto p = out;
  p.replace_extension();
  p += suffix;
  return p;
}

}  // namespace detail

inline void write_results_csv(const std::filesystem::path& path, const std::vector<ResultRow>& rows) {
  auto os = detail::open_for_write(path);
  os << kResultHeader << '\n';
  for (const auto& r : rows) os << format_row(r) << '\n';
  detail::finish(os, path);
}

struct CellSummary {
  Cell cell;
  SampleSummary convergence;
  SampleSummary mode_utility;
  double max_utility_fraction = 0.0;  // share of runs whose mode idea has utility exactly 1
};

/// Per-cell aggregates, in cell order. Rows must be grouped by cell.
inline std::vector<CellSummary> summarize_cells(const std::vector<ResultRow>& rows) {
  std::vector<CellSummary> out;
  for (std::size_t i = 0; i < rows.size();) {
    std::size_t j = i;
    std::vector<double> conv, util;
    std::size_t ones = 0;
    while (j < rows.size() && rows[j].cell.id == rows[i].cell.id) {
      conv.push_back(rows[j].result.convergence);
      util.push_back(rows[j].result.mode_utility);
      ones += rows[j].result.mode_utility == 1.0 ? 1 : 0;
      ++j;
    }
    out.push_back({rows[i].cell, summarize(conv), summarize(util),
                   static_cast<double>(ones) / static_cast<double>(conv.size())});
    i = j;
  }
  return out;
}

inline void write_cell_summary_csv(const std::filesystem::path& path, const std::string& experiment,
                                   const std::vector<CellSummary>& cells) {
  auto os = detail::open_for_write(path);
  os << "experiment,beta,xi,p,n_agents,topology,runs,convergence_mean,convergence_se,mode_utility_mean,"
        "mode_utility_se,max_utility_fraction\n";
  char buf[512];
  for (const auto& c : cells) {
    std::snprintf(buf, sizeof buf, "%s,%.10g,%.10g,%.10g,%d,%s,%zu,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  experiment.c_str(), c.cell.beta, c.cell.xi, c.cell.p, c.cell.n_agents,
                  std::string(topology_name(c.cell.topology)).c_str(), c.convergence.count, c.convergence.mean,
                  c.convergence.std_error, c.mode_utility.mean, c.mode_utility.std_error, c.max_utility_fraction);
    os << buf;
  }
  detail::finish(os, path);
}

inline nlohmann::json config_to_json(const SimConfig& c) {
  return {{"M", c.bits},
          {"n", c.representatives},
          {"r_p", c.ops.sample_size},
          {"r_m", c.ops.mutation_offspring},
          {"p_m", c.ops.mutation_rate},
          {"p_s", c.ops.switch_prob},
          {"p", c.p},
          {"N", c.n_agents},
          {"topology", std::string(topology_name(c.topology))},
          {"k", c.initial_ideas},
          {"beta", c.bias},
          {"xi", c.noise},
          {"T", c.iterations},
          {"seed", c.seed}};
}

inline nlohmann::json spec_to_json(const ExperimentSpec& s, std::size_t n_cells, std::size_t n_rows) {
  nlohmann::json topo = nlohmann::json::array();
  for (auto t : s.topologies) topo.push_back(std::string(topology_name(t)));
  return {{"software", "ideaevo"},
          {"version", kVersion},
          {"experiment", s.experiment},
          {"master_seed", s.seed},
          {"runs_per_cell", s.runs},
          {"beta_step", s.step_for(s.beta_step)},
          {"xi_step", s.step_for(s.xi_step)},
          {"p_step", s.step_for(s.p_step)},
          {"sizes", s.sizes},
          {"topologies", topo},
          {"cells", n_cells},
          {"rows", n_rows},
          {"base_config", config_to_json(s.base)}};
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  auto os = detail::open_for_write(path);
  os << j.dump(2) << '\n';
  detail::finish(os, path);
}

struct SweepOutput {
  std::vector<ResultRow> rows;
  std::vector<CellSummary> cells;
};

/// Runs the cells and, when an output path is set, writes the row CSV plus a
/// `<stem>.cells.csv` summary and a `<stem>.json` config sidecar.
inline SweepOutput run_sweep(const ExperimentSpec& s, const std::vector<Cell>& cells) {
  SweepOutput out{run_cells(s, cells), {}};
  out.cells = summarize_cells(out.rows);
  if (!s.out.empty()) {
    const std::filesystem::path path(s.out);
    write_results_csv(path, out.rows);
    write_cell_summary_csv(detail::sibling(path, ".cells.csv"), s.experiment, out.cells);
    write_json(detail::sibling(path, ".json"), spec_to_json(s, cells.size(), out.rows.size()));
  }
  return out;
}

/// Noise x bias sweep on a fully connected group of five, p = 1/2.
inline SweepOutput run_experiment_1(ExperimentSpec s) {
  s.experiment = "exp1";
  return run_sweep(s, experiment1_cells(s));
}

/// Behavioral balance p x bias sweep at xi = 0.2.
inline SweepOutput run_experiment_2(ExperimentSpec s) {
  s.experiment = "exp2";
  return run_sweep(s, experiment2_cells(s));
}

/// Group size x topology sweep.
inline SweepOutput run_experiment_3(ExperimentSpec s) {
  s.experiment = "exp3";
  return run_sweep(s, experiment3_cells(s));
}

struct PairTest {
  Topology first;
  Topology second;
  MannWhitneyResult test;
  double median_first = 0.0;
  double median_second = 0.0;
};

struct HistogramReport {
  SweepOutput sweep;
  std::map<Topology, std::vector<double>> utilities;
  std::vector<PairTest> pairs;
};

inline nlohmann::json report_to_json(const HistogramReport& h) {
  nlohmann::json j;
  j["software"] = "ideaevo";
  j["version"] = kVersion;
  nlohmann::json per = nlohmann::json::object();
  for (const auto& c : h.sweep.cells) {
    per[std::string(topology_name(c.cell.topology))] = {{"runs", c.mode_utility.count},
                                                        {"mean", c.mode_utility.mean},
                                                        {"median", c.mode_utility.median},
                                                        {"max_utility_fraction", c.max_utility_fraction}};
  }
  j["topologies"] = per;
  j["mann_whitney"] = nlohmann::json::array();
  for (const auto& p : h.pairs) {
    j["mann_whitney"].push_back({{"a", std::string(topology_name(p.first))},
                                 {"b", std::string(topology_name(p.second))},
                                 {"U", p.test.u},
                                 {"z", p.test.z},
                                 {"p_two_sided", p.test.p_two_sided},
                                 {"median_a", p.median_first},
                                 {"median_b", p.median_second}});
  }
  return j;
}

/// Mode-utility distributions at N = histogram_size (640) per topology, with pairwise
/// two-sided Mann-Whitney tests (SW,RD), (SW,SF), (RD,SF).
inline HistogramReport run_histogram(ExperimentSpec s) {
  s.experiment = "hist";
  HistogramReport h{run_sweep(s, histogram_cells(s)), {}, {}};
  for (const auto& r : h.sweep.rows) h.utilities[r.cell.topology].push_back(r.result.mode_utility);

  const std::pair<Topology, Topology> pairs[] = {{Topology::SmallWorld, Topology::Random},
                                                 {Topology::SmallWorld, Topology::ScaleFree},
                                                 {Topology::Random, Topology::ScaleFree}};
  for (const auto& [a, b] : pairs) {
    if (!h.utilities.contains(a) || !h.utilities.contains(b)) continue;
    const auto& xa = h.utilities[a];
    const auto& xb = h.utilities[b];
    h.pairs.push_back({a, b, mann_whitney(xa, xb), summarize(xa).median, summarize(xb).median});
  }
  if (!s.out.empty()) write_json(detail::sibling(s.out, ".report.json"), report_to_json(h));
  return h;
}

/// One seeded landscape bundle (a single individual table) as CSV.
inline LandscapeBundle dump_landscape(const ExperimentSpec& s, std::ostream& os) {
  SimConfig cfg = s.base;
  cfg.seed = s.seed;
  cfg.validate();
  Rng rng(cfg.seed);
  auto bundle = make_landscape(rng, cfg.bits, cfg.representatives, cfg.bias, cfg.noise, 1);
  write_landscape_csv(os, bundle);
  return bundle;
}

}  // namespace ideaevo
