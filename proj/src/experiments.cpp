// SPDX-License-Identifier: Apache-2.0
#include "qoncord/experiments.hpp"

#include "qoncord/errors.hpp"
#include "qoncord/random.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>

namespace qoncord {

using Json = nlohmann::ordered_json;

namespace {

constexpr std::uint64_t kWorkloadStream = 0x10;
constexpr std::uint64_t kFleetStream = 0x11;

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::string csv_line(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += fields[i];
  }
  out += '\n';
  return out;
}

std::string executions_field(const std::map<DeviceId, long>& executions) {
  std::string out;
  for (const auto& [dev, n] : executions) {
    if (!out.empty()) out += ';';
    out += dev + "=" + std::to_string(n);
  }
  return out;
}

Json executions_json(const std::map<DeviceId, long>& executions) {
  Json j = Json::object();
  for (const auto& [dev, n] : executions) j[dev] = n;
  return j;
}

Json spsa_json(const SpsaConfig& s) {
  return Json{{"a", s.a},         {"c", s.c},
              {"alpha", s.alpha}, {"gamma", s.gamma_gain},
              {"A", s.stability_constant()}, {"max_iters", s.max_iters}};
}

Json conv_json(const ConvergenceConfig& c) {
  return Json{{"strict_window", c.strict_window},
              {"relaxed_window", c.relaxed_window},
              {"tol_expectation", c.tol_expectation},
              {"tol_entropy", c.tol_entropy}};
}

Json fleet_json(const std::vector<DeviceProfile>& fleet) {
  Json arr = Json::array();
  for (const auto& d : fleet) {
    arr.push_back(Json{{"id", d.id},
                       {"p1", d.noise.p1},
                       {"p2", d.noise.p2},
                       {"readout", d.noise.readout},
                       {"t_g1", d.noise.t_g1},
                       {"t_g2", d.noise.t_g2},
                       {"t1", d.noise.t1},
                       {"t2", d.noise.t2}});
  }
  return arr;
}

// A named run: the Qoncord orchestration or one device alone.
struct Configuration {
  std::string name;
  std::vector<DeviceProfile> devices;
  OrchestratorOptions options;
};

std::vector<Configuration> configurations(const std::vector<DeviceProfile>& fleet, const OrchestratorOptions& base) {
  if (fleet.empty()) throw ValidationError("fleet has no devices");
  std::vector<Configuration> out{{"qoncord", fleet, base}};
  for (const auto& d : fleet) {
    OrchestratorOptions solo = base;
    // Baselines run on every device, eligible or not; only a zero estimate is refused.
    solo.threshold = std::numeric_limits<double>::min();
    out.push_back({"single:" + d.id, {d}, solo});
  }
  return out;
}

struct ConfigurationRun {
  const Configuration* config;
  MultiRestartResult result;
};

std::vector<ConfigurationRun> run_all(const VqaTask& task, int restarts, const SpsaConfig& spsa,
                                      const ConvergenceConfig& conv, std::uint64_t seed,
                                      const std::vector<Configuration>& configs) {
  std::vector<ConfigurationRun> runs;
  for (const auto& c : configs) {
    runs.push_back({&c, run_multirestart(task, c.devices, restarts, spsa, conv, seed, c.options)});
  }
  return runs;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace

OutputFormat parse_output_format(const std::string& name) {
  if (name == "csv") return OutputFormat::Csv;
  if (name == "json") return OutputFormat::Json;
  throw ValidationError("unknown output format '" + name + "' (expected csv or json)");
}

MaxCutProblem QaoaExperiment::problem() const {
  if (graph) {
    graph->validate();
    return *graph;
  }
  return erdos_renyi(nodes, edge_prob, graph_seed.value_or(seed));
}

std::string multirestart_report(const QaoaExperiment& ex, OutputFormat format) {
  const MaxCutProblem problem = ex.problem();
  const double ground = brute_force_maxcut(problem);
  const VqaTask task = make_qaoa_task(problem, ex.layers);
  const auto configs = configurations(ex.fleet, ex.options);
  const auto runs = run_all(task, ex.restarts, ex.spsa, ex.conv, ex.seed, configs);

  if (format == OutputFormat::Csv) {
    std::string out = csv_line({"configuration", "restart_id", "approximation_ratio", "final_expectation",
                                "checkpoint_expectation", "status", "iterations", "total_executions",
                                "executions_per_device"});
    for (const auto& run : runs) {
      for (const auto& r : run.result.per_restart) {
        out += csv_line({run.config->name, std::to_string(r.restart_id),
                         num(approximation_ratio(r.final_expectation, ground)), num(r.final_expectation),
                         num(r.checkpoint_expectation), to_string(r.status),
                         std::to_string(r.trajectory.iterations()), std::to_string(r.total_executions()),
                         executions_field(r.executions)});
      }
    }
    return out;
  }

  Json edges = Json::array();
  for (const auto& [u, v] : problem.edges) edges.push_back({u, v});
  Json doc{{"schema", "qoncord.multirestart/1"},
           {"problem", {{"nodes", problem.num_nodes}, {"edges", edges}, {"ground_truth", ground}}},
           {"layers", ex.layers},
           {"restarts", ex.restarts},
           {"seed", ex.seed},
           {"spsa", spsa_json(ex.spsa)},
           {"convergence", conv_json(ex.conv)},
           {"fleet", fleet_json(ex.fleet)}};
  Json confs = Json::array();
  for (const auto& run : runs) {
    const auto& res = run.result;
    Json rows = Json::array();
    for (const auto& r : res.per_restart) {
      rows.push_back(Json{{"restart_id", r.restart_id},
                          {"approximation_ratio", approximation_ratio(r.final_expectation, ground)},
                          {"final_expectation", r.final_expectation},
                          {"checkpoint_expectation", r.checkpoint_expectation},
                          {"status", to_string(r.status)},
                          {"iterations", r.trajectory.iterations()},
                          {"probes", r.probes},
                          {"executions_per_device", executions_json(r.executions)}});
    }
    confs.push_back(Json{{"name", run.config->name},
                         {"tier_order", res.tier_order},
                         {"best_expectation", res.best_expectation},
                         {"best_approximation_ratio", approximation_ratio(res.best_expectation, ground)},
                         {"survivors", res.survivors().size()},
                         {"total_executions", res.total_executions()},
                         {"executions_per_device", executions_json(res.executions_per_device)},
                         {"per_restart", rows}});
  }
  doc["configurations"] = confs;
  return dump(doc);
}

std::string single_restart_report(const QaoaExperiment& ex, OutputFormat format) {
  const MaxCutProblem problem = ex.problem();
  const double ground = brute_force_maxcut(problem);
  const VqaTask task = make_qaoa_task(problem, ex.layers);
  const auto configs = configurations(ex.fleet, ex.options);

  std::vector<std::pair<const Configuration*, RestartRecord>> runs;
  for (const auto& c : configs) {
    runs.emplace_back(&c, run_single_restart(task, c.devices, ex.spsa, ex.conv, ex.seed, c.options));
  }

  if (format == OutputFormat::Csv) {
    std::string out =
        csv_line({"configuration", "iteration", "device", "expectation", "entropy", "approximation_ratio"});
    for (const auto& [c, r] : runs) {
      for (const auto& rec : r.trajectory.records) {
        out += csv_line({c->name, std::to_string(rec.iter), rec.device_id, num(rec.expectation), num(rec.entropy),
                         num(approximation_ratio(rec.expectation, ground))});
      }
    }
    return out;
  }

  Json doc{{"schema", "qoncord.single_restart/1"},
           {"problem", {{"nodes", problem.num_nodes}, {"num_edges", problem.edges.size()}, {"ground_truth", ground}}},
           {"layers", ex.layers},
           {"seed", ex.seed},
           {"spsa", spsa_json(ex.spsa)},
           {"convergence", conv_json(ex.conv)},
           {"fleet", fleet_json(ex.fleet)}};
  Json confs = Json::array();
  for (const auto& [c, r] : runs) {
    Json trace = Json::array();
    for (const auto& rec : r.trajectory.records) {
      trace.push_back(Json{{"iteration", rec.iter},
                           {"device", rec.device_id},
                           {"expectation", rec.expectation},
                           {"entropy", rec.entropy}});
    }
    confs.push_back(Json{{"name", c->name},
                         {"approximation_ratio", approximation_ratio(r.final_expectation, ground)},
                         {"final_expectation", r.final_expectation},
                         {"status", to_string(r.status)},
                         {"iterations", r.trajectory.iterations()},
                         {"total_executions", r.total_executions()},
                         {"executions_per_device", executions_json(r.executions)},
                         {"trajectory", trace}});
  }
  doc["configurations"] = confs;
  return dump(doc);
}

std::string vqe_report(const VqeExperiment& ex, OutputFormat format) {
  const double ground = brute_force_eigenmin(ex.hamiltonian);
  const VqaTask task = make_vqe_task(ex.hamiltonian, ex.reps);
  const auto configs = configurations(ex.fleet, ex.options);
  const auto runs = run_all(task, ex.restarts, ex.spsa, ex.conv, ex.seed, configs);
  const auto rel_error = [&](double e) { return std::abs(e - ground) / std::abs(ground); };

  if (format == OutputFormat::Csv) {
    std::string out = csv_line({"configuration", "restart_id", "energy", "relative_error", "status", "iterations",
                                "total_executions", "executions_per_device"});
    for (const auto& run : runs) {
      for (const auto& r : run.result.per_restart) {
        out += csv_line({run.config->name, std::to_string(r.restart_id), num(r.final_expectation),
                         num(rel_error(r.final_expectation)), to_string(r.status),
                         std::to_string(r.trajectory.iterations()), std::to_string(r.total_executions()),
                         executions_field(r.executions)});
      }
    }
    return out;
  }

  Json terms = Json::array();
  for (const auto& t : ex.hamiltonian.terms) terms.push_back({t.coefficient, t.paulis});
  Json doc{{"schema", "qoncord.vqe/1"},
           {"hamiltonian", {{"num_qubits", ex.hamiltonian.num_qubits()}, {"terms", terms}, {"ground_energy", ground}}},
           {"reps", ex.reps},
           {"restarts", ex.restarts},
           {"seed", ex.seed},
           {"spsa", spsa_json(ex.spsa)},
           {"convergence", conv_json(ex.conv)},
           {"fleet", fleet_json(ex.fleet)}};
  Json confs = Json::array();
  for (const auto& run : runs) {
    const auto& res = run.result;
    Json rows = Json::array();
    for (const auto& r : res.per_restart) {
      rows.push_back(Json{{"restart_id", r.restart_id},
                          {"energy", r.final_expectation},
                          {"relative_error", rel_error(r.final_expectation)},
                          {"status", to_string(r.status)},
                          {"iterations", r.trajectory.iterations()},
                          {"executions_per_device", executions_json(r.executions)}});
    }
    confs.push_back(Json{{"name", run.config->name},
                         {"tier_order", res.tier_order},
                         {"best_energy", res.best_expectation},
                         {"best_relative_error", rel_error(res.best_expectation)},
                         {"total_executions", res.total_executions()},
                         {"executions_per_device", executions_json(res.executions_per_device)},
                         {"per_restart", rows}});
  }
  doc["configurations"] = confs;
  return dump(doc);
}

std::vector<QueueSimRow> queue_sim_rows(const Scenario& sc) {
  std::vector<QueueSimRow> rows;
  for (std::uint64_t seed : sc.seeds) {
    const auto fleet = sc.build_fleet(mix_seed(seed, kFleetStream));
    for (double fraction : sc.runtime_fractions) {
      const auto jobs = cloud::generate_workload(sc.num_jobs, fraction, mix_seed(seed, kWorkloadStream), sc.workload);
      for (cloud::Policy policy : sc.policies) {
        rows.push_back({policy, fraction, seed, cloud::run_sim(jobs, fleet, policy, seed, sc.qoncord)});
      }
    }
  }
  return rows;
}

std::string queue_sim_report(const Scenario& sc, OutputFormat format) {
  std::string csv = csv_line({"policy", "runtime_fraction", "seed", "throughput", "mean_relative_fidelity",
                              "completion_time", "mean_relative_fidelity_circuits", "circuits_completed",
                              "circuits_generated", "per_device_utilization"});
  Json rows = Json::array();
  for (const auto& [policy, fraction, seed, m] : queue_sim_rows(sc)) {
    std::string util;
    for (double u : m.per_device_utilization) util += (util.empty() ? "" : ";") + num(u);
    csv += csv_line({to_string(policy), num(fraction), std::to_string(seed), num(m.throughput),
                     num(m.mean_relative_fidelity), num(m.completion_time), num(m.mean_relative_fidelity_circuits),
                     std::to_string(m.circuits_completed), std::to_string(m.circuits_generated), util});
    rows.push_back(Json{{"policy", to_string(policy)},
                        {"runtime_fraction", fraction},
                        {"seed", seed},
                        {"throughput", m.throughput},
                        {"mean_relative_fidelity", m.mean_relative_fidelity},
                        {"completion_time", m.completion_time},
                        {"mean_relative_fidelity_circuits", m.mean_relative_fidelity_circuits},
                        {"circuits_completed", m.circuits_completed},
                        {"circuits_generated", m.circuits_generated},
                        {"per_device_utilization", m.per_device_utilization}});
  }
  if (format == OutputFormat::Csv) return csv;
  return dump(Json{{"schema", "qoncord.queue_sim/1"}, {"rows", rows}});
}

std::vector<PCorrectRow> p_correct_table(const CircuitFamily& family, const std::vector<DeviceProfile>& fleet,
                                         double threshold) {
  std::vector<PCorrectRow> rows;
  const auto members = family.members();
  for (const auto& d : fleet) {
    for (const auto& [depth, stats] : members) {
      const double p = estimate_p_correct(stats, d);
      rows.push_back({d.id, depth, stats, p, p >= threshold});
    }
  }
  return rows;
}

std::string p_correct_report(const std::vector<PCorrectRow>& rows, OutputFormat format) {
  if (format == OutputFormat::Csv) {
    std::string out = csv_line({"device", "depth", "circuit_depth", "one_qubit_gates", "two_qubit_gates",
                                "measurements", "p_correct", "eligible"});
    for (const auto& r : rows) {
      out += csv_line({r.device, std::to_string(r.depth), std::to_string(r.stats.depth),
                       std::to_string(r.stats.one_qubit_gates), std::to_string(r.stats.two_qubit_gates),
                       std::to_string(r.stats.measurements), num(r.p_correct), r.eligible ? "true" : "false"});
    }
    return out;
  }
  Json arr = Json::array();
  for (const auto& r : rows) {
    arr.push_back(Json{{"device", r.device},
                       {"depth", r.depth},
                       {"circuit_depth", r.stats.depth},
                       {"one_qubit_gates", r.stats.one_qubit_gates},
                       {"two_qubit_gates", r.stats.two_qubit_gates},
                       {"measurements", r.stats.measurements},
                       {"p_correct", r.p_correct},
                       {"eligible", r.eligible}});
  }
  return dump(Json{{"schema", "qoncord.p_correct/1"}, {"rows", arr}});
}

std::string p_correct_text(const std::vector<PCorrectRow>& rows) {
  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-16s %6s %8s %8s %8s %12s %s\n", "device", "depth", "CD", "G1", "G2", "p_correct",
                "eligible");
  out += buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-16s %6d %8d %8d %8d %12.6g %s\n", r.device.c_str(), r.depth, r.stats.depth,
                  r.stats.one_qubit_gates, r.stats.two_qubit_gates, r.p_correct, r.eligible ? "yes" : "no");
    out += buf;
  }
  return out;
}

void write_file_atomically(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw ValidationError("write failed for " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace qoncord
