// ideaevo command line: experiment sweeps, single runs and landscape dumps.
//
// Exit codes: 0 success, 2 invalid configuration, 3 I/O failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ideaevo/ideaevo.hpp"

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitIo = 3;

struct Options {
  std::uint64_t seed = 1;
  int runs = 500;
  double grid_step = 0.1;
  double beta_step = 0.0;
  double xi_step = 0.0;
  double p_step = 0.0;
  std::string out;
  int workers = 1;
  std::optional<std::string> topology;
  std::optional<int> size;
  std::optional<double> beta;
  std::optional<double> xi;
  std::optional<double> p;
  std::optional<int> iters;
  std::vector<int> sizes;
};

void add_common_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--seed", o.seed, "Master seed");
  cmd->add_option("--runs", o.runs, "Runs per grid cell");
  cmd->add_option("--grid-step", o.grid_step, "Step of the [0,1] parameter grids");
  cmd->add_option("--beta-step", o.beta_step, "Step of the bias axis (defaults to --grid-step)");
  cmd->add_option("--xi-step", o.xi_step, "Step of the noise axis (defaults to --grid-step)");
  cmd->add_option("--p-step", o.p_step, "Step of the p axis (defaults to --grid-step)");
  cmd->add_option("--out", o.out, "Output path");
  cmd->add_option("--workers", o.workers, "Worker threads");
  cmd->add_option("--topology", o.topology, "rd | sw | sf | complete");
  cmd->add_option("--size", o.size, "Number of agents N");
  cmd->add_option("--beta", o.beta, "Group-level bias");
  cmd->add_option("--xi", o.xi, "Within-group noise");
  cmd->add_option("--p", o.p, "Probability of selection-oriented actions");
  cmd->add_option("--iters", o.iters, "Iterations T");
}

ideaevo::ExperimentSpec make_spec(const std::string& name, const Options& o) {
  ideaevo::ExperimentSpec s;
  s.experiment = name;
  s.seed = o.seed;
  s.runs = o.runs;
  s.grid_step = o.grid_step;
  s.beta_step = o.beta_step;
  s.xi_step = o.xi_step;
  s.p_step = o.p_step;
  s.workers = o.workers;
  s.out = o.out.empty() && name != "run" && name != "dump-landscape" ? name + ".csv" : o.out;

  auto& b = s.base;
  if (o.topology) {
    const auto t = ideaevo::parse_topology(*o.topology);
    b.topology = t;
    if (name == "exp3" || name == "hist") s.topologies = {t};
  }
  if (o.size) {
    b.n_agents = *o.size;
    s.histogram_size = *o.size;
    if (name == "exp3") s.sizes = {*o.size};
  }
  if (!o.sizes.empty()) s.sizes = o.sizes;
  if (o.beta) b.bias = *o.beta;
  if (o.xi) b.noise = *o.xi;
  if (o.p) b.p = *o.p;
  if (o.iters) b.iterations = *o.iters;
  s.validate();
  b.seed = s.seed;
  return s;
}

void print_cells(const std::vector<ideaevo::CellSummary>& cells) {
  for (const auto& c : cells) {
    std::printf("beta=%.3g xi=%.3g p=%.3g N=%d %-8s conv=%.4f util=%.4f max=%.3f\n", c.cell.beta, c.cell.xi, c.cell.p,
                c.cell.n_agents, std::string(ideaevo::topology_name(c.cell.topology)).c_str(), c.convergence.mean,
                c.mode_utility.mean, c.max_utility_fraction);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Agent-based collective decision making as idea evolution"};
  app.require_subcommand(1);
  Options o;

  auto* exp1 = app.add_subcommand("exp1", "Sweep noise and bias (N=5, complete, p=0.5)");
  auto* exp2 = app.add_subcommand("exp2", "Sweep p and bias (xi=0.2)");
  auto* exp3 = app.add_subcommand("exp3", "Sweep group size and topology");
  auto* hist = app.add_subcommand("hist", "Mode-utility distributions at N=640 plus Mann-Whitney tests");
  auto* single = app.add_subcommand("run", "Single run; prints one result row as JSON");
  auto* dump = app.add_subcommand("dump-landscape", "Write a seeded landscape as CSV");
  for (auto* cmd : {exp1, exp2, exp3, hist, single, dump}) add_common_flags(cmd, o);
  exp3->add_option("--sizes", o.sizes, "Group sizes to sweep")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  try {
    if (exp1->parsed() || exp2->parsed() || exp3->parsed()) {
      const auto name = exp1->parsed() ? "exp1" : exp2->parsed() ? "exp2" : "exp3";
      const auto spec = make_spec(name, o);
      const auto out = exp1->parsed()   ? ideaevo::run_experiment_1(spec)
                       : exp2->parsed() ? ideaevo::run_experiment_2(spec)
                                        : ideaevo::run_experiment_3(spec);
      print_cells(out.cells);
      std::printf("wrote %zu rows to %s\n", out.rows.size(), spec.out.c_str());
    } else if (hist->parsed()) {
      if (!o.size) o.size = 640;
      const auto spec = make_spec("hist", o);
      const auto report = ideaevo::run_histogram(spec);
      print_cells(report.sweep.cells);
      for (const auto& pt : report.pairs) {
        std::printf("mann-whitney %s vs %s: U=%.1f z=%.3f p=%.3g\n",
                    std::string(ideaevo::topology_name(pt.first)).c_str(),
                    std::string(ideaevo::topology_name(pt.second)).c_str(), pt.test.u, pt.test.z,
                    pt.test.p_two_sided);
      }
      std::printf("wrote %zu rows to %s\n", report.sweep.rows.size(), spec.out.c_str());
    } else if (single->parsed()) {
      auto spec = make_spec("run", o);
      spec.runs = 1;
      ideaevo::Cell cell{0, spec.base.bias, spec.base.noise, spec.base.p, spec.base.n_agents, spec.base.topology};
      const auto rows = ideaevo::run_cells(spec, {cell});
      std::cout << ideaevo::row_to_json(rows.front()).dump() << '\n';
    } else if (dump->parsed()) {
      const auto spec = make_spec("dump-landscape", o);
      if (spec.out.empty()) {
        ideaevo::dump_landscape(spec, std::cout);
      } else {
        std::ofstream os(spec.out, std::ios::binary | std::ios::trunc);
        if (!os) throw ideaevo::IoError(spec.out, "cannot open for writing");
        ideaevo::dump_landscape(spec, os);
        os.flush();
        if (!os) throw ideaevo::IoError(spec.out, "write failed");
      }
    }
  } catch (const ideaevo::InvalidInput& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const ideaevo::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  }
  return 0;
}
