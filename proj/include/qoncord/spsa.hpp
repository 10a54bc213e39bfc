// SPDX-License-Identifier: Apache-2.0
#pragma once

// First-order SPSA with an observation hook.
//
// Each iteration k costs three objective evaluations: the two gradient probes
// at x_k +/- c_k * delta_k and one evaluation at the updated point, which is
// what the monitor sees. The perturbation for iteration k depends only on
// (seed, k), so a run stopped at iteration k and resumed with start_iter = k
// reproduces the uninterrupted trajectory.

#include "qoncord/vqa.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qoncord {

using DeviceId = std::string;

struct SpsaConfig {
  double a = 0.2;
  double c = 0.1;
  double alpha = 0.602;
  double gamma_gain = 0.101;
  std::optional<double> stability;  // A; defaults to 0.1 * max_iters
  int max_iters = 100;
  std::uint64_t seed = 0;

  void validate() const;
  double stability_constant() const { return stability.value_or(0.1 * max_iters); }
  double step_gain(int k) const;
  double perturbation_gain(int k) const;
};

struct IterationRecord {
  int iter = 0;
  ParameterVector params;
  double expectation = 0.0;
  double entropy = 0.0;
  DeviceId device_id;
};

enum class TrajectoryStatus { Running, ConvergedRelaxed, ConvergedStrict, Pruned, BudgetExhausted };

std::string to_string(TrajectoryStatus status);

struct Trajectory {
  std::vector<IterationRecord> records;
  TrajectoryStatus status = TrajectoryStatus::Running;
  std::optional<DeviceId> requested_device;  // set when the monitor asked for a device switch

  int iterations() const { return static_cast<int>(records.size()); }
  const IterationRecord& last() const { return records.back(); }
};

struct MonitorVerdict {
  enum class Kind { Continue, Stop, SwitchDevice };
  Kind kind = Kind::Continue;
  DeviceId device;

  static MonitorVerdict proceed() { return {Kind::Continue, {}}; }
  static MonitorVerdict stop() { return {Kind::Stop, {}}; }
  static MonitorVerdict switch_to(DeviceId id) { return {Kind::SwitchDevice, std::move(id)}; }
};

using Objective = std::function<EvaluationResult(const ParameterVector&)>;
using Monitor = std::function<MonitorVerdict(const Trajectory&)>;

/// Where a (possibly resumed) run begins: global iteration index and the
/// device that evaluates it.
struct SpsaStart {
  int iteration = 0;
  DeviceId device_id;
};

/// Raised when the objective returns a non-finite expectation. Carries the
/// records completed before the failure.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, Trajectory partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const Trajectory& trajectory() const { return partial_; }

 private:
  Trajectory partial_;
};

/// Runs iterations start.iteration .. max_iters-1 unless the monitor stops
/// earlier. Stop yields ConvergedStrict, SwitchDevice leaves the status
/// Running with requested_device set, running out of iterations yields
/// BudgetExhausted.
Trajectory spsa_minimize(const Objective& objective, const ParameterVector& x0, const SpsaConfig& config,
                         const Monitor& monitor, const SpsaStart& start = {});

inline constexpr int kEvaluationsPerIteration = 3;

int evaluation_count(const Trajectory& trajectory);

/// Circuit executions per device, from each record's device_id.
std::map<DeviceId, long> executions_by_device(const Trajectory& trajectory);

/// Rademacher vector for iteration k (entries +/-1).
Eigen::VectorXd spsa_perturbation(std::uint64_t seed, int k, Eigen::Index dim);

}  // namespace qoncord
