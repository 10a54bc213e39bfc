// SPDX-License-Identifier: Apache-2.0
#pragma once

// Readers for the experiment input files. Fleets, scenarios and circuit specs
// are JSON; graphs and Hamiltonians use the line formats below. All readers
// throw ValidationError with the offending location on malformed input.
//
// Graph:        first data line is the node count, then one "u v" edge per line.
// Hamiltonian:  one "coefficient PAULIS" term per line, character q acting on qubit q.
// Text after '#' and blank lines are ignored in both.

#include "qoncord/cloudsim.hpp"
#include "qoncord/scheduler.hpp"
#include "qoncord/vqa.hpp"

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace qoncord {

MaxCutProblem parse_graph(std::istream& in, const std::string& source = "<graph>");
MaxCutProblem load_graph(const std::filesystem::path& path);

PauliHamiltonian parse_hamiltonian(std::istream& in, const std::string& source = "<hamiltonian>");
PauliHamiltonian load_hamiltonian(const std::filesystem::path& path);

/// {"devices": [{"id", "p1", "p2", "readout", "t_g1", "t_g2", "t1", "t2",
///               "display_fidelity"?, "pending_load"?}, ...]}
std::vector<DeviceProfile> parse_fleet(const std::string& text, const std::string& source = "<fleet>");
std::vector<DeviceProfile> load_fleet(const std::filesystem::path& path);

/// Queue-simulation scenario. Either "fleet" (generated) or "devices"
/// (explicit) describes the cloud.
struct Scenario {
  cloud::FleetConfig fleet;
  std::optional<std::uint64_t> fleet_seed;  // fixed fleet across runs when set
  std::vector<cloud::SimDevice> devices;  // explicit fleet; generated when empty
  int num_jobs = 1000;
  cloud::WorkloadConfig workload;
  cloud::QoncordCloudConfig qoncord;
  std::vector<cloud::Policy> policies;
  std::vector<double> runtime_fractions;
  std::vector<std::uint64_t> seeds;

  /// Explicit devices, else the generated fleet drawn from fleet_seed or,
  /// failing that, from `run_seed`.
  std::vector<cloud::SimDevice> build_fleet(std::uint64_t run_seed) const;
};

Scenario parse_scenario(const std::string& text, const std::string& source = "<scenario>");
Scenario load_scenario(const std::filesystem::path& path);

/// Circuit family for fidelity tables:
/// {"kind": "qaoa", "nodes", "edge_prob"?, "graph_seed"?, "layers": [..]}
/// {"kind": "twolocal", "qubits", "reps": [..]}
struct CircuitFamily {
  enum class Kind { Qaoa, TwoLocal } kind = Kind::Qaoa;
  int nodes = 7;
  double edge_prob = 0.5;
  std::uint64_t graph_seed = 7;
  std::vector<int> depths;  // QAOA layers or two-local reps

  /// Label and gate/depth statistics of each family member.
  std::vector<std::pair<int, CircuitStats>> members() const;
};

CircuitFamily parse_circuit_family(const std::string& text, const std::string& source = "<circuit>");
CircuitFamily load_circuit_family(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace qoncord
