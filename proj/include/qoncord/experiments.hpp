// SPDX-License-Identifier: Apache-2.0
#pragma once

// The experiment runners behind the command-line tool. Each returns the full
// output document as a string so that runs are byte-comparable.

#include "qoncord/config.hpp"
#include "qoncord/scheduler.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace qoncord {

enum class OutputFormat { Csv, Json };

OutputFormat parse_output_format(const std::string& name);

struct QaoaExperiment {
  int nodes = 7;
  double edge_prob = 0.5;
  std::optional<std::uint64_t> graph_seed;  // defaults to `seed`
  std::optional<MaxCutProblem> graph;       // overrides the random graph
  int layers = 3;
  int restarts = 50;
  std::uint64_t seed = 1;
  std::vector<DeviceProfile> fleet;
  SpsaConfig spsa;
  ConvergenceConfig conv;
  OrchestratorOptions options;

  MaxCutProblem problem() const;
};

/// Qoncord over the whole fleet plus each device alone.
/// JSON schema "qoncord.multirestart/1"; CSV has one row per (configuration, restart).
std::string multirestart_report(const QaoaExperiment& experiment, OutputFormat format);

/// One restart, no pruning, with the per-iteration trace of every configuration.
/// JSON schema "qoncord.single_restart/1"; CSV has one row per (configuration, iteration).
std::string single_restart_report(const QaoaExperiment& experiment, OutputFormat format);

/// Hamiltonian energies are O(1) rather than O(|E|), so the library's default
/// SPSA step gain barely moves the angles within the budget.
inline constexpr double kVqeStepGain = 1.0;

inline SpsaConfig vqe_spsa_defaults() {
  SpsaConfig s;
  s.a = kVqeStepGain;
  return s;
}

struct VqeExperiment {
  PauliHamiltonian hamiltonian;
  int reps = 1;
  int restarts = 10;
  std::uint64_t seed = 1;
  std::vector<DeviceProfile> fleet;
  SpsaConfig spsa = vqe_spsa_defaults();
  ConvergenceConfig conv;
  OrchestratorOptions options;
};

/// JSON schema "qoncord.vqe/1"; CSV has one row per (configuration, restart).
std::string vqe_report(const VqeExperiment& experiment, OutputFormat format);

struct QueueSimRow {
  cloud::Policy policy = cloud::Policy::LeastBusy;
  double runtime_fraction = 0.0;
  std::uint64_t seed = 0;
  cloud::SimMetrics metrics;
};

/// Every (seed, runtime fraction, policy) run of the scenario, in that nesting
/// order. Policies within one (seed, fraction) share the fleet and workload.
std::vector<QueueSimRow> queue_sim_rows(const Scenario& scenario);

/// queue_sim_rows rendered as CSV or JSON schema "qoncord.queue_sim/1".
std::string queue_sim_report(const Scenario& scenario, OutputFormat format);

struct PCorrectRow {
  DeviceId device;
  int depth = 0;  // layers or reps
  CircuitStats stats;
  double p_correct = 0.0;
  bool eligible = false;
};

std::vector<PCorrectRow> p_correct_table(const CircuitFamily& family, const std::vector<DeviceProfile>& fleet,
                                         double threshold = 0.1);
std::string p_correct_report(const std::vector<PCorrectRow>& rows, OutputFormat format);
/// Fixed-width table for terminals.
std::string p_correct_text(const std::vector<PCorrectRow>& rows);

/// Writes to a sibling temporary file and renames it over `path`, so a
/// failed run never leaves a partial file at the target.
void write_file_atomically(const std::filesystem::path& path, const std::string& contents);

}  // namespace qoncord
