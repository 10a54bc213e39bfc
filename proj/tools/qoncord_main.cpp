// SPDX-License-Identifier: Apache-2.0
// Command-line experiment runner. Every subcommand is a pure function of its
// flags and input files; results go to --out (written atomically) or stdout.

#include "qoncord/config.hpp"
#include "qoncord/errors.hpp"
#include "qoncord/experiments.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace qoncord;

struct OptimizerFlags {
  int max_iters = SpsaConfig{}.max_iters;
  double a = SpsaConfig{}.a;
  double c = SpsaConfig{}.c;
  ConvergenceConfig conv;
  OrchestratorOptions orchestrator;

  void attach(CLI::App* cmd) {
    cmd->add_option("--max-iters", max_iters, "SPSA iteration budget per restart")->check(CLI::PositiveNumber);
    cmd->add_option("--spsa-a", a, "SPSA step gain a")->check(CLI::PositiveNumber);
    cmd->add_option("--spsa-c", c, "SPSA perturbation gain c")->check(CLI::PositiveNumber);
    cmd->add_option("--strict-window", conv.strict_window, "final-tier convergence window (iterations)");
    cmd->add_option("--relaxed-window", conv.relaxed_window, "intermediate-tier convergence window (iterations)");
    cmd->add_option("--tol-expectation", conv.tol_expectation, "expectation improvement tolerance");
    cmd->add_option("--tol-entropy", conv.tol_entropy, "entropy change tolerance (bits)");
    cmd->add_option("--checkpoint-fraction", orchestrator.checkpoint_fraction,
                    "fraction of the budget after which restarts are pruned");
    cmd->add_option("--threshold", orchestrator.threshold, "minimum estimated fidelity for a device");
  }

  SpsaConfig spsa() const {
    SpsaConfig s;
    s.max_iters = max_iters;
    s.a = a;
    s.c = c;
    return s;
  }
};

struct Output {
  std::string path;
  std::string format;

  void attach(CLI::App* cmd, const std::string& default_format) {
    format = default_format;
    cmd->add_option("--out", path, "output file (stdout when omitted)");
    cmd->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  }

  void emit(const std::string& text) const {
    if (path.empty()) {
      std::cout << text;
    } else {
      write_file_atomically(path, text);
    }
  }
};

struct QaoaFlags {
  int nodes = 7;
  double edge_prob = 0.5;
  std::optional<std::uint64_t> graph_seed;
  std::string graph_file;
  int layers = 3;
  std::uint64_t seed = 1;
  std::string fleet_file;

  void attach(CLI::App* cmd) {
    cmd->add_option("--nodes", nodes, "Erdos-Renyi graph size")->check(CLI::Range(2, kMaxSimQubits));
    cmd->add_option("--edge-prob", edge_prob, "Erdos-Renyi edge probability")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--graph-seed", graph_seed, "graph seed (defaults to --seed)");
    cmd->add_option("--graph", graph_file, "graph file; overrides --nodes")->check(CLI::ExistingFile);
    cmd->add_option("--layers", layers, "QAOA layers")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", seed, "run seed");
    cmd->add_option("--fleet", fleet_file, "device fleet file")->required()->check(CLI::ExistingFile);
  }

  QaoaExperiment experiment(const OptimizerFlags& opt) const {
    QaoaExperiment ex;
    ex.nodes = nodes;
    ex.edge_prob = edge_prob;
    ex.graph_seed = graph_seed;
    if (!graph_file.empty()) ex.graph = load_graph(graph_file);
    ex.layers = layers;
    ex.seed = seed;
    ex.fleet = load_fleet(fleet_file);
    ex.spsa = opt.spsa();
    ex.conv = opt.conv;
    ex.options = opt.orchestrator;
    return ex;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-device variational algorithm scheduling experiments"};
  app.require_subcommand(1);

  // queue-sim
  auto* queue = app.add_subcommand("queue-sim", "policy comparison in the discrete-event cloud model");
  std::string scenario_file;
  std::vector<std::string> policies;
  std::vector<double> fractions;
  std::vector<std::uint64_t> queue_seeds;
  Output queue_out;
  queue->add_option("--scenario", scenario_file, "scenario file")->required()->check(CLI::ExistingFile);
  queue->add_option("--policies", policies, "policy names (default: scenario list)")->delimiter(',');
  queue->add_option("--runtime-fractions", fractions, "runtime-session fractions")->delimiter(',');
  queue->add_option("--seeds", queue_seeds, "run seeds")->delimiter(',');
  queue_out.attach(queue, "csv");

  // multirestart
  auto* multi = app.add_subcommand("multirestart", "QAOA restarts: tiered orchestration vs single devices");
  QaoaFlags multi_qaoa;
  OptimizerFlags multi_opt;
  int restarts = 50;
  Output multi_out;
  multi_qaoa.attach(multi);
  multi_opt.attach(multi);
  multi->add_option("--restarts", restarts, "number of restarts")->check(CLI::PositiveNumber);
  multi_out.attach(multi, "json");

  // single-restart
  auto* single = app.add_subcommand("single-restart", "one QAOA restart traced per configuration");
  QaoaFlags single_qaoa;
  OptimizerFlags single_opt;
  Output single_out;
  single_qaoa.attach(single);
  single_opt.attach(single);
  single_out.attach(single, "json");

  // vqe
  auto* vqe = app.add_subcommand("vqe", "two-local VQE restarts over a Pauli Hamiltonian");
  std::string hamiltonian_file;
  std::string vqe_fleet;
  int reps = 1;
  int vqe_restarts = 10;
  std::uint64_t vqe_seed = 1;
  OptimizerFlags vqe_opt;
  vqe_opt.a = kVqeStepGain;
  Output vqe_out;
  vqe->add_option("--hamiltonian", hamiltonian_file, "Hamiltonian file")->required()->check(CLI::ExistingFile);
  vqe->add_option("--reps", reps, "two-local repetitions")->check(CLI::PositiveNumber);
  vqe->add_option("--fleet", vqe_fleet, "device fleet file")->required()->check(CLI::ExistingFile);
  vqe->add_option("--restarts", vqe_restarts, "number of restarts")->check(CLI::PositiveNumber);
  vqe->add_option("--seed", vqe_seed, "run seed");
  vqe_opt.attach(vqe);
  vqe_out.attach(vqe, "json");

  // p-correct
  auto* pc = app.add_subcommand("p-correct", "estimated success probability per device and circuit depth");
  std::string circuit_file;
  std::string pc_fleet;
  double pc_threshold = OrchestratorOptions{}.threshold;
  Output pc_out;
  pc->add_option("--circuit", circuit_file, "circuit family file")->required()->check(CLI::ExistingFile);
  pc->add_option("--fleet", pc_fleet, "device fleet file")->required()->check(CLI::ExistingFile);
  pc->add_option("--threshold", pc_threshold, "eligibility threshold");
  pc_out.attach(pc, "csv");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*queue) {
      Scenario sc = load_scenario(scenario_file);
      if (!policies.empty()) {
        sc.policies.clear();
        for (const auto& p : policies) sc.policies.push_back(cloud::parse_policy(p));
      }
      if (!fractions.empty()) sc.runtime_fractions = fractions;
      if (!queue_seeds.empty()) sc.seeds = queue_seeds;
      queue_out.emit(queue_sim_report(sc, parse_output_format(queue_out.format)));
    } else if (*multi) {
      QaoaExperiment ex = multi_qaoa.experiment(multi_opt);
      ex.restarts = restarts;
      multi_out.emit(multirestart_report(ex, parse_output_format(multi_out.format)));
    } else if (*single) {
      single_out.emit(single_restart_report(single_qaoa.experiment(single_opt), parse_output_format(single_out.format)));
    } else if (*vqe) {
      VqeExperiment ex;
      ex.hamiltonian = load_hamiltonian(hamiltonian_file);
      ex.reps = reps;
      ex.restarts = vqe_restarts;
      ex.seed = vqe_seed;
      ex.fleet = load_fleet(vqe_fleet);
      ex.spsa = vqe_opt.spsa();
      ex.conv = vqe_opt.conv;
      ex.options = vqe_opt.orchestrator;
      vqe_out.emit(vqe_report(ex, parse_output_format(vqe_out.format)));
    } else if (*pc) {
      const auto rows = p_correct_table(load_circuit_family(circuit_file), load_fleet(pc_fleet), pc_threshold);
      std::cout << p_correct_text(rows);
      if (!pc_out.path.empty()) write_file_atomically(pc_out.path, p_correct_report(rows, parse_output_format(pc_out.format)));
    }
  } catch (const std::exception& e) {
    std::cerr << "qoncord: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
