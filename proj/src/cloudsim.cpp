// SPDX-License-Identifier: Apache-2.0
#include "qoncord/cloudsim.hpp"

#include "qoncord/errors.hpp"
#include "qoncord/random.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <queue>
#include <tuple>

namespace qoncord::cloud {

void SimDevice::validate() const {
  if (!(fidelity > 0.0 && fidelity <= 1.0)) throw ValidationError("device fidelity must lie in (0, 1]");
  if (!(min_exec_time > 0.0) || !(max_exec_time >= min_exec_time)) {
    throw ValidationError("device execution times need 0 < min <= max");
  }
}

std::vector<SimDevice> make_fleet(const FleetConfig& config, std::uint64_t seed) {
  if (config.num_devices < 1) throw ValidationError("fleet needs at least one device");
  if (!(config.min_fidelity > 0.0 && config.min_fidelity <= config.max_fidelity && config.max_fidelity <= 1.0)) {
    throw ValidationError("fleet fidelities need 0 < min <= max <= 1");
  }
  if (!(config.base_exec_time > 0.0) || !(config.exec_spread >= 1.0)) {
    throw ValidationError("fleet execution times need base > 0 and spread >= 1");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> scale(0.5, 1.5);
  std::vector<SimDevice> fleet(static_cast<std::size_t>(config.num_devices));
  const int n = config.num_devices;
  for (int i = 0; i < n; ++i) {
    SimDevice& d = fleet[static_cast<std::size_t>(i)];
    d.id = i;
    d.fidelity = n == 1 ? config.max_fidelity
                        : config.min_fidelity + (config.max_fidelity - config.min_fidelity) * i / (n - 1);
    d.min_exec_time = config.base_exec_time * scale(rng);
    d.max_exec_time = config.exec_spread * d.min_exec_time;
  }
  return fleet;
}

void JobSpec::validate() const {
  if (num_executions < 1) throw ValidationError("job needs at least one execution");
  if (kind == JobKind::Independent && num_executions != 1) {
    throw ValidationError("independent jobs execute exactly once");
  }
  if (inter_execution_delays.size() != static_cast<std::size_t>(num_executions - 1)) {
    throw ValidationError("job needs one delay between each pair of executions");
  }
  for (double d : inter_execution_delays) {
    if (!(d >= 0.0)) throw ValidationError("inter-execution delays must be non-negative");
  }
  if (!(arrival_time >= 0.0)) throw ValidationError("arrival time must be non-negative");
}

void WorkloadConfig::validate() const {
  if (!(horizon >= 0.0)) throw ValidationError("workload horizon must be non-negative");
  if (min_session_length < 2 || max_session_length < min_session_length) {
    throw ValidationError("session lengths need 2 <= min <= max");
  }
  if (!(min_delay >= 0.0) || !(max_delay >= min_delay)) throw ValidationError("delays need 0 <= min <= max");
}

std::vector<JobSpec> generate_workload(int n_jobs, double runtime_fraction, std::uint64_t seed,
                                       const WorkloadConfig& config) {
  if (n_jobs < 1) throw ValidationError("workload needs at least one job");
  if (!(runtime_fraction >= 0.1 && runtime_fraction <= 0.9)) {
    throw ValidationError("runtime fraction must lie in [0.1, 0.9]");
  }
  config.validate();
  std::mt19937_64 rng(seed);

  const auto n = static_cast<std::size_t>(n_jobs);
  // floor with a guard against 0.3 * 10 landing on 2.999...
  const auto sessions = static_cast<std::size_t>(std::floor(runtime_fraction * n_jobs + 1e-9));
  std::vector<char> is_session(n, 0);
  std::fill_n(is_session.begin(), sessions, 1);
  std::shuffle(is_session.begin(), is_session.end(), rng);

  std::uniform_real_distribution<double> arrival(0.0, config.horizon);
  std::vector<double> arrivals(n);
  for (double& a : arrivals) a = config.horizon > 0.0 ? arrival(rng) : 0.0;
  std::sort(arrivals.begin(), arrivals.end());

  std::uniform_int_distribution<int> length(config.min_session_length, config.max_session_length);
  std::uniform_real_distribution<double> delay(config.min_delay, config.max_delay);
  std::vector<JobSpec> jobs(n);
  for (std::size_t i = 0; i < n; ++i) {
    JobSpec& j = jobs[i];
    j.job_id = static_cast<int>(i);
    j.arrival_time = arrivals[i];
    if (is_session[i]) {
      j.kind = JobKind::RuntimeSession;
      j.num_executions = length(rng);
      j.inter_execution_delays.resize(static_cast<std::size_t>(j.num_executions - 1));
      for (double& d : j.inter_execution_delays) d = config.max_delay > config.min_delay ? delay(rng) : config.min_delay;
    }
  }
  return jobs;
}

std::string to_string(Policy policy) {
  switch (policy) {
    case Policy::LeastBusy: return "least_busy";
    case Policy::LoadWeighted: return "load_weighted";
    case Policy::FidelityWeighted: return "fidelity_weighted";
    case Policy::BestFidelity: return "best_fidelity";
    case Policy::EQC: return "eqc";
    case Policy::Qoncord: return "qoncord";
  }
  return "unknown";
}

Policy parse_policy(const std::string& name) {
  for (Policy p : kAllPolicies) {
    if (to_string(p) == name) return p;
  }
  throw ValidationError("unknown policy '" + name + "'");
}

namespace {

int sample_weighted(std::span<const DeviceLoad> loads, std::span<const double> weights, PolicyRng& rng) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double u = unit_interval(rng()) * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (u < weights[i]) return loads[i].index;
    u -= weights[i];
  }
  return loads.back().index;  // round-off
}

}  // namespace

int select_least_busy(std::span<const DeviceLoad> loads) {
  const DeviceLoad* best = &loads.front();
  for (const auto& d : loads) {
    if (d.pending < best->pending || (d.pending == best->pending && d.index < best->index)) best = &d;
  }
  return best->index;
}

int select_load_weighted(std::span<const DeviceLoad> loads, PolicyRng& rng) {
  std::vector<double> w;
  w.reserve(loads.size());
  for (const auto& d : loads) w.push_back(1.0 / (1.0 + d.pending));
  return sample_weighted(loads, w, rng);
}

int select_fidelity_weighted(std::span<const DeviceLoad> loads, PolicyRng& rng) {
  std::vector<double> w;
  w.reserve(loads.size());
  for (const auto& d : loads) w.push_back(d.fidelity);
  return sample_weighted(loads, w, rng);
}

int select_best_fidelity(std::span<const DeviceLoad> loads) {
  const DeviceLoad* best = &loads.front();
  for (const auto& d : loads) {
    const bool better = d.fidelity > best->fidelity ||
                        (d.fidelity == best->fidelity &&
                         (d.pending < best->pending || (d.pending == best->pending && d.index < best->index)));
    if (better) best = &d;
  }
  return best->index;
}

void QoncordCloudConfig::validate() const {
  if (!(checkpoint_fraction > 0.0 && checkpoint_fraction < 1.0)) {
    throw ValidationError("checkpoint fraction must lie in (0, 1)");
  }
  if (!(fidelity_floor >= 0.0 && fidelity_floor <= 1.0)) throw ValidationError("fidelity floor must lie in [0, 1]");
  if (!(prune_fraction >= 0.0 && prune_fraction < 1.0)) throw ValidationError("prune fraction must lie in [0, 1)");
}

int QoncordCloudConfig::exploration_executions(int num_executions) const {
  const int k = static_cast<int>(std::floor(checkpoint_fraction * num_executions + 1e-9));
  return std::clamp(k, 1, num_executions);
}

std::vector<int> pruned_sessions(std::span<const JobSpec> jobs, double prune_fraction, std::uint64_t seed) {
  std::vector<std::pair<std::uint64_t, int>> ranked;
  for (const auto& j : jobs) {
    if (j.kind == JobKind::RuntimeSession) ranked.emplace_back(mix_seed(seed, static_cast<std::uint64_t>(j.job_id)), j.job_id);
  }
  std::sort(ranked.begin(), ranked.end());
  const auto cut = static_cast<std::size_t>(std::llround(prune_fraction * static_cast<double>(ranked.size())));
  std::vector<int> out;
  for (std::size_t i = 0; i < cut && i < ranked.size(); ++i) out.push_back(ranked[i].second);
  std::sort(out.begin(), out.end());
  return out;
}

double throughput(long num_circuits, double completion_time) {
  if (num_circuits <= 0 || !(completion_time > 0.0)) return 0.0;
  return static_cast<double>(num_circuits) / completion_time;
}

namespace {

constexpr std::uint64_t kExecStream = 1;
constexpr std::uint64_t kPolicyStream = 2;
constexpr std::uint64_t kPruneStream = 3;

struct EventOrder {
  // std::priority_queue pops the largest; invert for earliest-first.
  bool operator()(const std::pair<SimEvent, long>& a, const std::pair<SimEvent, long>& b) const {
    const auto key = [](const std::pair<SimEvent, long>& e) {
      return std::tuple(e.first.time, static_cast<int>(e.first.kind), e.first.job_id, e.first.device, e.second);
    };
    return key(a) > key(b);
  }
};

struct DeviceState {
  std::deque<int> fifo;
  std::deque<int> priority;  // follow-up circuits of admitted sessions
  bool busy = false;
  int running_job = -1;
  double busy_time = 0.0;

  int pending() const { return static_cast<int>(fifo.size() + priority.size()) + (busy ? 1 : 0); }
};

struct JobState {
  int submitted = 0;  // executions handed to a device
  int finished = 0;   // executions fully completed
  int outstanding = 0;  // EQC tasks of the current execution still running
  int device = -1;    // admitted device for session follow-ups
  int explore = 0;    // Qoncord: executions before fine-tuning
  bool pruned = false;
  int last_device = -1;
};

class Simulation {
 public:
  Simulation(std::span<const JobSpec> jobs, std::span<const SimDevice> fleet, Policy policy, std::uint64_t seed,
             const QoncordCloudConfig& qoncord, std::vector<SimEvent>* trace)
      : jobs_(jobs), fleet_(fleet.begin(), fleet.end()), policy_(policy), qoncord_(qoncord), trace_(trace),
        exec_rng_(mix_seed(seed, kExecStream)), policy_rng_(mix_seed(seed, kPolicyStream)),
        devices_(fleet.size()), state_(jobs.size()) {
    for (std::size_t i = 0; i < jobs_.size(); ++i) {
      if (!index_of_.emplace(jobs_[i].job_id, i).second) throw ValidationError("duplicate job id");
    }
    for (const auto& d : fleet_) max_fidelity_ = std::max(max_fidelity_, d.fidelity);
    if (policy_ == Policy::Qoncord) {
      for (int id : pruned_sessions(jobs, qoncord_.prune_fraction, mix_seed(seed, kPruneStream))) {
        state_[index_of_.at(id)].pruned = true;
      }
    }
  }

  SimMetrics run();

 private:
  void push(double time, EventKind kind, int job_id, int device = -1) {
    events_.emplace(SimEvent{time, kind, job_id, device}, seq_++);
  }

  std::vector<DeviceLoad> loads(bool eligible_only) const {
    std::vector<DeviceLoad> out;
    for (std::size_t i = 0; i < fleet_.size(); ++i) {
      if (eligible_only && fleet_[i].fidelity < qoncord_.fidelity_floor * max_fidelity_) continue;
      out.push_back({static_cast<int>(i), fleet_[i].fidelity, devices_[i].pending()});
    }
    return out;
  }

  int place(Policy rule) {
    const auto all = loads(false);
    switch (rule) {
      case Policy::LoadWeighted: return select_load_weighted(all, policy_rng_);
      case Policy::FidelityWeighted: return select_fidelity_weighted(all, policy_rng_);
      case Policy::BestFidelity: return select_best_fidelity(all);
      default: return select_least_busy(all);
    }
  }

  int place_exploration() {
    const auto eligible = loads(true);
    return select_least_busy(eligible);  // never empty: the max device always qualifies
  }

  void submit(int job, int device, bool priority) {
    DeviceState& d = devices_[static_cast<std::size_t>(device)];
    (priority ? d.priority : d.fifo).push_back(job);
    ++generated_;
    try_start(device);
  }

  void try_start(int device) {
    DeviceState& d = devices_[static_cast<std::size_t>(device)];
    if (d.busy) return;
    std::deque<int>& q = d.priority.empty() ? d.fifo : d.priority;
    if (q.empty()) return;
    const int job = q.front();
    q.pop_front();
    const SimDevice& dev = fleet_[static_cast<std::size_t>(device)];
    double duration = dev.min_exec_time;
    if (dev.max_exec_time > dev.min_exec_time) {
      duration = std::uniform_real_distribution<double>(dev.min_exec_time, dev.max_exec_time)(exec_rng_);
    }
    d.busy = true;
    d.running_job = job;
    d.busy_time += duration;
    fleet_[static_cast<std::size_t>(device)].busy_until = now_ + duration;
    push(now_ + duration, EventKind::ExecutionFinished, job, device);
  }

  // Places execution `state.submitted` of a job.
  void submit_next(std::size_t j) {
    const JobSpec& job = jobs_[j];
    JobState& s = state_[j];
    const int exec = s.submitted++;
    if (policy_ == Policy::EQC && job.kind == JobKind::RuntimeSession) {
      s.outstanding = 2;
      submit(job.job_id, place(Policy::LeastBusy), false);
      submit(job.job_id, place(Policy::LeastBusy), false);
      return;
    }
    if (job.kind == JobKind::Independent) {
      submit(job.job_id, place(policy_ == Policy::Qoncord || policy_ == Policy::EQC ? Policy::LeastBusy : policy_),
             false);
      return;
    }
    if (policy_ == Policy::Qoncord) {
      if (exec == 0) {
        s.device = place_exploration();
        submit(job.job_id, s.device, false);
        return;
      }
      if (exec == s.explore) {
        s.device = place(Policy::BestFidelity);
        submit(job.job_id, s.device, false);
        return;
      }
    } else if (exec == 0) {
      s.device = place(policy_);
      submit(job.job_id, s.device, false);
      return;
    }
    submit(job.job_id, s.device, true);
  }

  void on_finished(const SimEvent& e) {
    DeviceState& d = devices_[static_cast<std::size_t>(e.device)];
    d.busy = false;
    d.running_job = -1;
    ++completed_;
    ++executions_[static_cast<std::size_t>(e.device)];
    circuit_fidelity_sum_ += fleet_[static_cast<std::size_t>(e.device)].fidelity / max_fidelity_;
    completion_ = std::max(completion_, e.time);

    const std::size_t j = index_of_.at(e.job_id);
    JobState& s = state_[j];
    s.last_device = e.device;
    bool execution_done = true;
    if (s.outstanding > 0) execution_done = --s.outstanding == 0;
    if (execution_done) {
      ++s.finished;
      const JobSpec& job = jobs_[j];
      const int target = (policy_ == Policy::Qoncord && s.pruned) ? s.explore : job.num_executions;
      if (s.finished >= target) {
        job_fidelity_sum_ += fleet_[static_cast<std::size_t>(s.last_device)].fidelity / max_fidelity_;
        ++jobs_done_;
      } else {
        push(e.time + job.inter_execution_delays[static_cast<std::size_t>(s.finished - 1)],
             EventKind::SessionNextCircuit, job.job_id);
      }
    }
    try_start(e.device);
  }

  std::span<const JobSpec> jobs_;
  std::vector<SimDevice> fleet_;
  Policy policy_;
  QoncordCloudConfig qoncord_;
  std::vector<SimEvent>* trace_;
  std::mt19937_64 exec_rng_;
  PolicyRng policy_rng_;
  std::vector<DeviceState> devices_;
  std::vector<JobState> state_;
  std::map<int, std::size_t> index_of_;
  std::priority_queue<std::pair<SimEvent, long>, std::vector<std::pair<SimEvent, long>>, EventOrder> events_;
  long seq_ = 0;
  double now_ = 0.0;
  double max_fidelity_ = 0.0;
  long generated_ = 0;
  long completed_ = 0;
  long jobs_done_ = 0;
  double completion_ = 0.0;
  double job_fidelity_sum_ = 0.0;
  double circuit_fidelity_sum_ = 0.0;
  std::vector<long> executions_ = std::vector<long>(fleet_.size(), 0);
};

SimMetrics Simulation::run() {
  for (std::size_t j = 0; j < jobs_.size(); ++j) {
    if (policy_ == Policy::Qoncord) state_[j].explore = qoncord_.exploration_executions(jobs_[j].num_executions);
    push(jobs_[j].arrival_time, EventKind::JobArrival, jobs_[j].job_id);
  }
  while (!events_.empty()) {
    const SimEvent e = events_.top().first;
    events_.pop();
    now_ = e.time;
    if (trace_) trace_->push_back(e);
    switch (e.kind) {
      case EventKind::JobArrival:
      case EventKind::SessionNextCircuit: submit_next(index_of_.at(e.job_id)); break;
      case EventKind::ExecutionFinished: on_finished(e); break;
    }
  }

  SimMetrics m;
  m.completion_time = completion_;
  m.circuits_completed = completed_;
  m.circuits_generated = generated_;
  m.throughput = throughput(completed_, completion_);
  m.mean_relative_fidelity = jobs_done_ > 0 ? job_fidelity_sum_ / static_cast<double>(jobs_done_) : 0.0;
  m.mean_relative_fidelity_circuits = completed_ > 0 ? circuit_fidelity_sum_ / static_cast<double>(completed_) : 0.0;
  m.per_device_executions = executions_;
  for (const auto& d : devices_) m.per_device_utilization.push_back(completion_ > 0.0 ? d.busy_time / completion_ : 0.0);
  return m;
}

}  // namespace

SimMetrics run_sim(std::span<const JobSpec> jobs, std::span<const SimDevice> fleet, Policy policy,
                   std::uint64_t seed, const QoncordCloudConfig& qoncord, std::vector<SimEvent>* trace) {
  if (fleet.empty()) throw ValidationError("simulation needs at least one device");
  for (const auto& d : fleet) d.validate();
  for (const auto& j : jobs) j.validate();
  qoncord.validate();
  Simulation sim(jobs, fleet, policy, seed, qoncord, trace);
  return sim.run();
}

}  // namespace qoncord::cloud
