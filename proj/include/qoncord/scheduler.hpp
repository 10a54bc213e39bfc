// SPDX-License-Identifier: Apache-2.0
#pragma once

// Multi-device VQA scheduling: fidelity estimation, device tiering, the joint
// expectation/entropy convergence checker, checkpoint pruning of restarts and
// the tiered multi-restart orchestrator.

#include "qoncord/qsim.hpp"
#include "qoncord/spsa.hpp"
#include "qoncord/vqa.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace qoncord {

struct DeviceProfile {
  DeviceId id;
  NoiseModel noise;
  double display_fidelity = 1.0;
  int pending_load = 0;
};

struct ConvergenceConfig {
  int strict_window = 10;
  int relaxed_window = 5;
  double tol_expectation = 0.05;
  double tol_entropy = 0.1;  // bits

  void validate() const;
};

/// Eligible devices ordered by ascending estimated fidelity; tier 0 explores.
struct TierPlan {
  std::vector<DeviceProfile> tiers;
  double checkpoint_fraction = 0.4;

  void validate() const;
  int checkpoint_iteration(int max_iters) const;
};

/// A variational task as the orchestrator sees it: a parameter count, the
/// circuit statistics used for fidelity estimation, and a noisy evaluator.
struct VqaTask {
  int num_params = 0;
  CircuitStats stats;
  std::function<EvaluationResult(const ParameterVector&, const NoiseModel&)> evaluate;
};

VqaTask make_qaoa_task(const MaxCutProblem& problem, int layers);
VqaTask make_vqe_task(const PauliHamiltonian& hamiltonian, int reps);

struct RestartRecord {
  int restart_id = 0;
  ParameterVector initial_params;
  Trajectory trajectory;  // concatenated across tiers
  TrajectoryStatus status = TrajectoryStatus::Running;
  double final_expectation = 0.0;
  double checkpoint_expectation = 0.0;  // value at the end of exploration
  long probes = 0;                      // tier-advance probe evaluations
  std::map<DeviceId, long> executions;  // trajectory evaluations plus probes

  long total_executions() const;
};

struct MultiRestartResult {
  std::vector<RestartRecord> per_restart;
  std::vector<DeviceId> tier_order;
  double best_expectation = 0.0;
  std::map<DeviceId, long> executions_per_device;

  long total_executions() const;
  std::vector<const RestartRecord*> survivors() const;
};

struct OrchestratorOptions {
  double threshold = 0.1;
  double checkpoint_fraction = 0.4;
  bool pruning = true;
};

/// exp(-CD * mean(t_g1, t_g2) / (T1 * T2)) (1-p1)^G1 (1-p2)^G2 (1-readout)^M
double estimate_p_correct(const CircuitStats& stats, const NoiseModel& noise);
double estimate_p_correct(const CircuitStats& stats, const DeviceProfile& device);

/// Devices with estimate >= threshold, ascending by estimate (ties by id).
/// Throws NoEligibleDeviceError when none qualify.
std::vector<DeviceProfile> filter_devices(const CircuitStats& stats, std::span<const DeviceProfile> fleet,
                                          double threshold = 0.1);

enum class Convergence { Continue, Converged };

/// Converged iff there are at least `window` records, the best expectation in
/// the last `window` records improves on the best before them (or on the
/// window's first record when nothing precedes it) by less than tol_e, and
/// the entropy range inside the window is below tol_h.
Convergence check_convergence(std::span<const IterationRecord> records, int window, double tol_e, double tol_h);
inline Convergence check_convergence(const Trajectory& trajectory, int window, double tol_e, double tol_h) {
  return check_convergence(std::span<const IterationRecord>(trajectory.records), window, tol_e, tol_h);
}

/// True iff the probe on the next tier lowers entropy by more than tol_h.
bool should_advance_tier(double last_entropy_current, double probe_entropy_next, double tol_h);

/// Largest-gap split of checkpoint expectations. Returns promoted ids, ascending.
std::vector<int> prune_restarts(std::span<const std::pair<int, double>> intermediate);

/// Uniform draw in [-pi, pi]^dim for each restart.
std::vector<ParameterVector> initial_parameters(int num_restarts, int dim, std::uint64_t seed);

/// SPSA seed for restart i derived from the run seed.
std::uint64_t restart_seed(std::uint64_t seed, int restart_id);

MultiRestartResult run_multirestart(const VqaTask& task, std::span<const DeviceProfile> fleet, int num_restarts,
                                    const SpsaConfig& spsa, const ConvergenceConfig& conv, std::uint64_t seed,
                                    const OrchestratorOptions& options = {});

MultiRestartResult run_multirestart(const MaxCutProblem& problem, int layers, std::span<const DeviceProfile> fleet,
                                    int num_restarts, const SpsaConfig& spsa, const ConvergenceConfig& conv,
                                    std::uint64_t seed, const OrchestratorOptions& options = {});

/// One restart, no pruning.
RestartRecord run_single_restart(const VqaTask& task, std::span<const DeviceProfile> fleet, const SpsaConfig& spsa,
                                 const ConvergenceConfig& conv, std::uint64_t seed,
                                 const OrchestratorOptions& options = {});

RestartRecord run_single_restart(const MaxCutProblem& problem, int layers, std::span<const DeviceProfile> fleet,
                                 const SpsaConfig& spsa, const ConvergenceConfig& conv, std::uint64_t seed,
                                 const OrchestratorOptions& options = {});

}  // namespace qoncord
