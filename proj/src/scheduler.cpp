// SPDX-License-Identifier: Apache-2.0
#include "qoncord/scheduler.hpp"

#include "qoncord/errors.hpp"
#include "qoncord/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace qoncord {

namespace {

using Records = std::span<const IterationRecord>;

Monitor window_monitor(int window, const ConvergenceConfig& conv, int cap) {
  return [=](const Trajectory& t) {
    if (cap > 0 && t.iterations() >= cap) return MonitorVerdict::stop();
    if (check_convergence(t, window, conv.tol_expectation, conv.tol_entropy) == Convergence::Converged) {
      return MonitorVerdict::stop();
    }
    return MonitorVerdict::proceed();
  };
}

Monitor fixed_length_monitor(int length) {
  return [=](const Trajectory& t) {
    return t.iterations() >= length ? MonitorVerdict::stop() : MonitorVerdict::proceed();
  };
}

Objective bind_device(const VqaTask& task, const DeviceProfile& device) {
  return [&task, &device](const ParameterVector& x) { return task.evaluate(x, device.noise); };
}

// Appends one stage and books its executions.
void append_segment(RestartRecord& rec, Trajectory&& seg) {
  for (const auto& [dev, n] : executions_by_device(seg)) rec.executions[dev] += n;
  for (auto& r : seg.records) rec.trajectory.records.push_back(std::move(r));
}

struct StageResult {
  bool budget_exhausted = false;
  bool stopped_by_monitor = false;
};

StageResult run_stage(RestartRecord& rec, const VqaTask& task, const DeviceProfile& device, const SpsaConfig& spsa,
                      const Monitor& monitor) {
  const int start = rec.trajectory.iterations();
  if (start >= spsa.max_iters) return {true, false};
  const ParameterVector x = rec.trajectory.records.empty() ? rec.initial_params : rec.trajectory.last().params;
  Trajectory seg = spsa_minimize(bind_device(task, device), x, spsa, monitor, {start, device.id});
  const StageResult out{seg.status == TrajectoryStatus::BudgetExhausted,
                        seg.status == TrajectoryStatus::ConvergedStrict};
  append_segment(rec, std::move(seg));
  return out;
}

// Exploration on tier 0. A single-tier plan runs to strict convergence.
void explore(RestartRecord& rec, const VqaTask& task, const TierPlan& plan, const SpsaConfig& spsa,
             const ConvergenceConfig& conv) {
  const DeviceProfile& tier0 = plan.tiers.front();
  if (plan.tiers.size() == 1) {
    const StageResult r = run_stage(rec, task, tier0, spsa, window_monitor(conv.strict_window, conv, 0));
    rec.status = r.budget_exhausted ? TrajectoryStatus::BudgetExhausted : TrajectoryStatus::ConvergedStrict;
  } else {
    const int cap = plan.checkpoint_iteration(spsa.max_iters);
    const StageResult r = run_stage(rec, task, tier0, spsa, window_monitor(conv.relaxed_window, conv, cap));
    if (r.budget_exhausted) {
      rec.status = TrajectoryStatus::BudgetExhausted;
    } else {
      const bool relaxed = check_convergence(rec.trajectory, conv.relaxed_window, conv.tol_expectation,
                                             conv.tol_entropy) == Convergence::Converged;
      rec.status = relaxed ? TrajectoryStatus::ConvergedRelaxed : TrajectoryStatus::Running;
    }
  }
  rec.checkpoint_expectation = rec.trajectory.last().expectation;
}

// Walks a surviving restart up the tier list. Each advance is gated by a
// one-evaluation entropy probe on the next device; a failed probe buys one
// more relaxed window on the current device.
void fine_tune(RestartRecord& rec, const VqaTask& task, const TierPlan& plan, const SpsaConfig& spsa,
               const ConvergenceConfig& conv) {
  const std::size_t last_tier = plan.tiers.size() - 1;
  std::size_t current = 0;
  while (current < last_tier) {
    if (rec.trajectory.iterations() >= spsa.max_iters) {
      rec.status = TrajectoryStatus::BudgetExhausted;
      return;
    }
    const DeviceProfile& next = plan.tiers[current + 1];
    const IterationRecord& here = rec.trajectory.last();
    const EvaluationResult probe = task.evaluate(here.params, next.noise);
    ++rec.probes;
    ++rec.executions[next.id];

    if (should_advance_tier(here.entropy, probe.entropy, conv.tol_entropy)) {
      ++current;
      const bool final_tier = current == last_tier;
      const int window = final_tier ? conv.strict_window : conv.relaxed_window;
      const StageResult r = run_stage(rec, task, plan.tiers[current], spsa, window_monitor(window, conv, 0));
      if (r.budget_exhausted) {
        rec.status = TrajectoryStatus::BudgetExhausted;
        return;
      }
      rec.status = final_tier ? TrajectoryStatus::ConvergedStrict : TrajectoryStatus::ConvergedRelaxed;
    } else {
      const StageResult r =
          run_stage(rec, task, plan.tiers[current], spsa, fixed_length_monitor(conv.relaxed_window));
      if (r.budget_exhausted) {
        rec.status = TrajectoryStatus::BudgetExhausted;
        return;
      }
    }
  }
}

void finalize(RestartRecord& rec) {
  rec.final_expectation = rec.trajectory.last().expectation;
  rec.trajectory.status = rec.status;
}

}  // namespace

void ConvergenceConfig::validate() const {
  if (relaxed_window < 1 || strict_window < 1) throw ValidationError("convergence windows must be >= 1");
  if (relaxed_window >= strict_window) throw ValidationError("relaxed window must be shorter than strict window");
  if (!(tol_expectation > 0.0) || !(tol_entropy > 0.0)) throw ValidationError("tolerances must be positive");
}

void TierPlan::validate() const {
  if (tiers.empty()) throw ValidationError("tier plan is empty");
  if (!(checkpoint_fraction > 0.0 && checkpoint_fraction < 1.0)) {
    throw ValidationError("checkpoint fraction must lie in (0, 1)");
  }
}

int TierPlan::checkpoint_iteration(int max_iters) const {
  return std::max(1, static_cast<int>(std::floor(checkpoint_fraction * max_iters)));
}

VqaTask make_qaoa_task(const MaxCutProblem& problem, int layers) {
  problem.validate();
  const ParameterVector zeros = ParameterVector::Zero(qaoa_parameter_count(layers));
  return {qaoa_parameter_count(layers), circuit_stats(build_qaoa(problem, zeros, layers)),
          [problem, layers](const ParameterVector& x, const NoiseModel& noise) {
            return evaluate_qaoa(problem, layers, x, noise);
          }};
}

VqaTask make_vqe_task(const PauliHamiltonian& hamiltonian, int reps) {
  hamiltonian.validate();
  const int n = hamiltonian.num_qubits();
  const ParameterVector zeros = ParameterVector::Zero(twolocal_parameter_count(n, reps));
  return {twolocal_parameter_count(n, reps), circuit_stats(build_twolocal(n, zeros, reps)),
          [hamiltonian, reps](const ParameterVector& x, const NoiseModel& noise) {
            return evaluate_vqe(hamiltonian, reps, x, noise);
          }};
}

long RestartRecord::total_executions() const {
  long total = 0;
  for (const auto& [dev, n] : executions) total += n;
  return total;
}

long MultiRestartResult::total_executions() const {
  long total = 0;
  for (const auto& [dev, n] : executions_per_device) total += n;
  return total;
}

std::vector<const RestartRecord*> MultiRestartResult::survivors() const {
  std::vector<const RestartRecord*> out;
  for (const auto& r : per_restart) {
    if (r.status != TrajectoryStatus::Pruned) out.push_back(&r);
  }
  return out;
}

double estimate_p_correct(const CircuitStats& stats, const NoiseModel& noise) {
  noise.validate();
  const double decoherence = stats.depth * ((noise.t_g1 + noise.t_g2) / 2.0) / (noise.t1 * noise.t2);
  return std::exp(-decoherence) * std::pow(1.0 - noise.p1, stats.one_qubit_gates) *
         std::pow(1.0 - noise.p2, stats.two_qubit_gates) * std::pow(1.0 - noise.readout, stats.measurements);
}

double estimate_p_correct(const CircuitStats& stats, const DeviceProfile& device) {
  return estimate_p_correct(stats, device.noise);
}

std::vector<DeviceProfile> filter_devices(const CircuitStats& stats, std::span<const DeviceProfile> fleet,
                                          double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw ValidationError("fidelity threshold must lie in (0, 1)");
  std::vector<std::pair<double, const DeviceProfile*>> scored;
  for (const auto& d : fleet) {
    const double p = estimate_p_correct(stats, d);
    if (p >= threshold) scored.emplace_back(p, &d);
  }
  if (scored.empty()) {
    throw NoEligibleDeviceError("no device reaches the minimum estimated fidelity of " + std::to_string(threshold));
  }
  std::stable_sort(scored.begin(), scored.end(), [](const auto& x, const auto& y) {
    if (x.first != y.first) return x.first < y.first;
    return x.second->id < y.second->id;
  });
  std::vector<DeviceProfile> out;
  out.reserve(scored.size());
  for (const auto& [p, d] : scored) out.push_back(*d);
  return out;
}

Convergence check_convergence(Records records, int window, double tol_e, double tol_h) {
  if (window < 1) throw ValidationError("convergence window must be >= 1");
  const auto n = records.size();
  if (n < static_cast<std::size_t>(window)) return Convergence::Continue;
  const Records recent = records.subspan(n - static_cast<std::size_t>(window));
  const Records before = records.first(n - static_cast<std::size_t>(window));

  auto best_of = [](Records rs) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& r : rs) best = std::min(best, r.expectation);
    return best;
  };
  const double baseline = before.empty() ? recent.front().expectation : best_of(before);
  if (baseline - best_of(recent) >= tol_e) return Convergence::Continue;

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& r : recent) {
    lo = std::min(lo, r.entropy);
    hi = std::max(hi, r.entropy);
  }
  return (hi - lo) < tol_h ? Convergence::Converged : Convergence::Continue;
}

bool should_advance_tier(double last_entropy_current, double probe_entropy_next, double tol_h) {
  return probe_entropy_next < last_entropy_current - tol_h;
}

std::vector<int> prune_restarts(std::span<const std::pair<int, double>> intermediate) {
  std::vector<std::pair<int, double>> sorted(intermediate.begin(), intermediate.end());
  std::sort(sorted.begin(), sorted.end(), [](const auto& x, const auto& y) {
    if (x.second != y.second) return x.second < y.second;
    return x.first < y.first;
  });
  std::vector<int> promoted;
  auto promote_all = [&] {
    for (const auto& [id, e] : sorted) promoted.push_back(id);
    std::sort(promoted.begin(), promoted.end());
    return promoted;
  };
  constexpr std::size_t kMinRestartsForClustering = 4;
  constexpr double kGapFloor = 0.05;
  if (sorted.size() < kMinRestartsForClustering) return promote_all();
  const double range = sorted.back().second - sorted.front().second;
  if (!(range > 0.0)) return promote_all();

  std::size_t split = 0;  // gap sits between sorted[split] and sorted[split + 1]
  double widest = -1.0;
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    const double gap = sorted[i + 1].second - sorted[i].second;
    if (gap > widest) {
      widest = gap;
      split = i;
    }
  }
  if (widest < kGapFloor * range) return promote_all();
  for (std::size_t i = 0; i <= split; ++i) promoted.push_back(sorted[i].first);
  std::sort(promoted.begin(), promoted.end());
  return promoted;
}

std::vector<ParameterVector> initial_parameters(int num_restarts, int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  std::vector<ParameterVector> out;
  out.reserve(static_cast<std::size_t>(num_restarts));
  for (int r = 0; r < num_restarts; ++r) {
    ParameterVector x(dim);
    for (int i = 0; i < dim; ++i) x[i] = angle(rng);
    out.push_back(std::move(x));
  }
  return out;
}

std::uint64_t restart_seed(std::uint64_t seed, int restart_id) {
  return mix_seed(seed, 0x5eed0000ULL + static_cast<std::uint64_t>(restart_id));
}

MultiRestartResult run_multirestart(const VqaTask& task, std::span<const DeviceProfile> fleet, int num_restarts,
                                    const SpsaConfig& spsa, const ConvergenceConfig& conv, std::uint64_t seed,
                                    const OrchestratorOptions& options) {
  if (num_restarts < 1) throw ValidationError("need at least one restart");
  spsa.validate();
  conv.validate();
  TierPlan plan{filter_devices(task.stats, fleet, options.threshold), options.checkpoint_fraction};
  plan.validate();

  MultiRestartResult result;
  for (const auto& d : plan.tiers) result.tier_order.push_back(d.id);

  const auto starts = initial_parameters(num_restarts, task.num_params, seed);
  result.per_restart.resize(static_cast<std::size_t>(num_restarts));
  for (int i = 0; i < num_restarts; ++i) {
    RestartRecord& rec = result.per_restart[static_cast<std::size_t>(i)];
    rec.restart_id = i;
    rec.initial_params = starts[static_cast<std::size_t>(i)];
    SpsaConfig cfg = spsa;
    cfg.seed = restart_seed(seed, i);
    explore(rec, task, plan, cfg, conv);
  }

  // Barrier: every restart has reached its checkpoint.
  const bool multi_tier = plan.tiers.size() > 1;
  std::vector<int> promoted;
  if (multi_tier) {
    if (options.pruning) {
      std::vector<std::pair<int, double>> checkpoints;
      for (const auto& rec : result.per_restart) checkpoints.emplace_back(rec.restart_id, rec.checkpoint_expectation);
      promoted = prune_restarts(checkpoints);
    } else {
      for (const auto& rec : result.per_restart) promoted.push_back(rec.restart_id);
    }
  }

  for (auto& rec : result.per_restart) {
    if (multi_tier) {
      const bool keep = std::binary_search(promoted.begin(), promoted.end(), rec.restart_id);
      if (!keep) {
        rec.status = TrajectoryStatus::Pruned;
      } else if (rec.status != TrajectoryStatus::BudgetExhausted) {
        SpsaConfig cfg = spsa;
        cfg.seed = restart_seed(seed, rec.restart_id);
        fine_tune(rec, task, plan, cfg, conv);
      }
    }
    finalize(rec);
  }

  result.best_expectation = std::numeric_limits<double>::infinity();
  for (const auto& rec : result.per_restart) {
    for (const auto& [dev, n] : rec.executions) result.executions_per_device[dev] += n;
    if (rec.status != TrajectoryStatus::Pruned) {
      result.best_expectation = std::min(result.best_expectation, rec.final_expectation);
    }
  }
  for (const auto& d : plan.tiers) result.executions_per_device.try_emplace(d.id, 0);
  return result;
}

MultiRestartResult run_multirestart(const MaxCutProblem& problem, int layers, std::span<const DeviceProfile> fleet,
                                    int num_restarts, const SpsaConfig& spsa, const ConvergenceConfig& conv,
                                    std::uint64_t seed, const OrchestratorOptions& options) {
  return run_multirestart(make_qaoa_task(problem, layers), fleet, num_restarts, spsa, conv, seed, options);
}

RestartRecord run_single_restart(const VqaTask& task, std::span<const DeviceProfile> fleet, const SpsaConfig& spsa,
                                 const ConvergenceConfig& conv, std::uint64_t seed,
                                 const OrchestratorOptions& options) {
  OrchestratorOptions opts = options;
  opts.pruning = false;
  return run_multirestart(task, fleet, 1, spsa, conv, seed, opts).per_restart.front();
}

RestartRecord run_single_restart(const MaxCutProblem& problem, int layers, std::span<const DeviceProfile> fleet,
                                 const SpsaConfig& spsa, const ConvergenceConfig& conv, std::uint64_t seed,
                                 const OrchestratorOptions& options) {
  return run_single_restart(make_qaoa_task(problem, layers), fleet, spsa, conv, seed, options);
}

}  // namespace qoncord
