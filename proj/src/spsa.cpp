// SPDX-License-Identifier: Apache-2.0
#include "qoncord/spsa.hpp"

#include "qoncord/errors.hpp"
#include "qoncord/random.hpp"

#include <cmath>
#include <random>

namespace qoncord {

void SpsaConfig::validate() const {
  if (!(a > 0.0) || !(c > 0.0)) throw ValidationError("SPSA gains a and c must be positive");
  if (!(gamma_gain > 0.0 && gamma_gain < alpha && alpha <= 1.0)) {
    throw ValidationError("SPSA exponents need 0 < gamma < alpha <= 1");
  }
  if (max_iters < 1) throw ValidationError("max_iters must be at least 1");
  if (!(stability_constant() >= 0.0)) throw ValidationError("stability constant must be non-negative");
}

double SpsaConfig::step_gain(int k) const { return a / std::pow(k + 1 + stability_constant(), alpha); }

double SpsaConfig::perturbation_gain(int k) const { return c / std::pow(k + 1, gamma_gain); }

std::string to_string(TrajectoryStatus status) {
  switch (status) {
    case TrajectoryStatus::Running: return "running";
    case TrajectoryStatus::ConvergedRelaxed: return "converged_relaxed";
    case TrajectoryStatus::ConvergedStrict: return "converged_strict";
    case TrajectoryStatus::Pruned: return "pruned";
    case TrajectoryStatus::BudgetExhausted: return "budget_exhausted";
  }
  return "unknown";
}

Eigen::VectorXd spsa_perturbation(std::uint64_t seed, int k, Eigen::Index dim) {
  std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(k)));
  Eigen::VectorXd delta(dim);
  for (Eigen::Index i = 0; i < dim; ++i) delta[i] = (rng() >> 63) ? 1.0 : -1.0;
  return delta;
}

Trajectory spsa_minimize(const Objective& objective, const ParameterVector& x0, const SpsaConfig& config,
                         const Monitor& monitor, const SpsaStart& start) {
  config.validate();
  if (x0.size() == 0) throw ValidationError("SPSA needs a non-empty parameter vector");
  if (start.iteration < 0) throw ValidationError("start iteration must be non-negative");

  Trajectory traj;
  ParameterVector x = x0;
  for (int k = start.iteration; k < config.max_iters; ++k) {
    const double ck = config.perturbation_gain(k);
    const Eigen::VectorXd delta = spsa_perturbation(config.seed, k, x.size());
    const double f_plus = objective(x + ck * delta).expectation;
    const double f_minus = objective(x - ck * delta).expectation;
    if (!std::isfinite(f_plus) || !std::isfinite(f_minus)) {
      throw NumericalError("non-finite objective at iteration " + std::to_string(k), traj);
    }
    // delta entries are +/-1, so dividing by delta is multiplying by it.
    const Eigen::VectorXd grad = ((f_plus - f_minus) / (2.0 * ck)) * delta;
    x -= config.step_gain(k) * grad;

    EvaluationResult here = objective(x);
    if (!std::isfinite(here.expectation) || !std::isfinite(here.entropy)) {
      throw NumericalError("non-finite objective at iteration " + std::to_string(k), traj);
    }
    traj.records.push_back({k, x, here.expectation, here.entropy, start.device_id});

    const MonitorVerdict verdict = monitor ? monitor(traj) : MonitorVerdict::proceed();
    if (verdict.kind == MonitorVerdict::Kind::Stop) {
      traj.status = TrajectoryStatus::ConvergedStrict;
      return traj;
    }
    if (verdict.kind == MonitorVerdict::Kind::SwitchDevice) {
      traj.requested_device = verdict.device;
      return traj;
    }
  }
  traj.status = TrajectoryStatus::BudgetExhausted;
  return traj;
}

int evaluation_count(const Trajectory& trajectory) {
  return kEvaluationsPerIteration * trajectory.iterations();
}

std::map<DeviceId, long> executions_by_device(const Trajectory& trajectory) {
  std::map<DeviceId, long> out;
  for (const auto& r : trajectory.records) out[r.device_id] += kEvaluationsPerIteration;
  return out;
}

}  // namespace qoncord
