// SPDX-License-Identifier: Apache-2.0
#pragma once

// Discrete-event model of a shared quantum cloud. Devices serve one circuit
// at a time from a FIFO queue; an admitted runtime session jumps the FIFO
// with its follow-up circuits but never preempts a running execution.

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace qoncord::cloud {

struct SimDevice {
  int id = 0;
  double fidelity = 0.9;
  double min_exec_time = 1.0;
  double max_exec_time = 3.0;
  double busy_until = 0.0;

  /// min > 0 and max >= min. The generated fleet uses max = 3 min; equal
  /// bounds give fixed-duration devices.
  void validate() const;
};

struct FleetConfig {
  int num_devices = 10;
  double min_fidelity = 0.3;
  double max_fidelity = 0.9;
  double base_exec_time = 1.0;  // per-device min is drawn from [0.5, 1.5] x base
  double exec_spread = 3.0;     // max / min
};

/// Fidelities evenly spaced on [min_fidelity, max_fidelity] in id order.
std::vector<SimDevice> make_fleet(const FleetConfig& config, std::uint64_t seed);

enum class JobKind { Independent, RuntimeSession };

struct JobSpec {
  int job_id = 0;
  JobKind kind = JobKind::Independent;
  int num_executions = 1;
  std::vector<double> inter_execution_delays;  // num_executions - 1 entries
  double arrival_time = 0.0;

  void validate() const;
};

struct WorkloadConfig {
  double horizon = 1000.0;  // arrivals uniform on [0, horizon)
  int min_session_length = 5;
  int max_session_length = 20;
  double min_delay = 0.5;
  double max_delay = 2.0;

  void validate() const;
};

/// floor(fraction * n) runtime sessions at random positions, ids in arrival order.
std::vector<JobSpec> generate_workload(int n_jobs, double runtime_fraction, std::uint64_t seed,
                                       const WorkloadConfig& config = {});

enum class Policy { LeastBusy, LoadWeighted, FidelityWeighted, BestFidelity, EQC, Qoncord };

inline constexpr Policy kAllPolicies[] = {Policy::LeastBusy,    Policy::LoadWeighted, Policy::FidelityWeighted,
                                          Policy::BestFidelity, Policy::EQC,          Policy::Qoncord};

std::string to_string(Policy policy);
/// Accepts the snake_case names produced by to_string. Throws ValidationError.
Policy parse_policy(const std::string& name);

/// What a policy sees of a device when placing a circuit.
struct DeviceLoad {
  int index = 0;  // position in the fleet
  double fidelity = 0.0;
  int pending = 0;  // queued plus running
};

using PolicyRng = std::mt19937_64;

// Placement rules. Inputs are non-empty; ties go to the lowest index.
int select_least_busy(std::span<const DeviceLoad> loads);
int select_load_weighted(std::span<const DeviceLoad> loads, PolicyRng& rng);
int select_fidelity_weighted(std::span<const DeviceLoad> loads, PolicyRng& rng);
int select_best_fidelity(std::span<const DeviceLoad> loads);

struct QoncordCloudConfig {
  double checkpoint_fraction = 0.4;
  double fidelity_floor = 0.5;  // exploration devices need fidelity >= floor * max
  double prune_fraction = 0.6;

  void validate() const;
  /// clamp(floor(fraction * n), 1, n)
  int exploration_executions(int num_executions) const;
};

/// Session ids that stop after exploration: the lowest round(prune_fraction * S)
/// by seeded hash rank.
std::vector<int> pruned_sessions(std::span<const JobSpec> jobs, double prune_fraction, std::uint64_t seed);

enum class EventKind { JobArrival, ExecutionFinished, SessionNextCircuit };

struct SimEvent {
  double time = 0.0;
  EventKind kind = EventKind::JobArrival;
  int job_id = 0;
  int device = -1;  // fleet index for ExecutionFinished
};

struct SimMetrics {
  double throughput = 0.0;
  double mean_relative_fidelity = 0.0;          // over jobs
  double mean_relative_fidelity_circuits = 0.0;  // over executed circuits
  double completion_time = 0.0;
  std::vector<double> per_device_utilization;
  std::vector<long> per_device_executions;
  long circuits_completed = 0;
  long circuits_generated = 0;
};

/// Circuits per time unit; zero when nothing ran.
double throughput(long num_circuits, double completion_time);

/// Runs the workload to completion. `trace`, when given, receives every
/// processed event in order.
SimMetrics run_sim(std::span<const JobSpec> jobs, std::span<const SimDevice> fleet, Policy policy,
                   std::uint64_t seed, const QoncordCloudConfig& qoncord = {},
                   std::vector<SimEvent>* trace = nullptr);

}  // namespace qoncord::cloud
