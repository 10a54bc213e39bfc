// SPDX-License-Identifier: Apache-2.0
#include "qoncord/config.hpp"

#include "qoncord/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace qoncord {

using nlohmann::json;

namespace {

// Yields the non-blank lines of a stream with '#' comments removed and
// 1-based line numbers.
template <typename F>
void for_each_data_line(std::istream& in, F&& f) {
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    f(line, number);
  }
}

[[noreturn]] void fail(const std::string& source, int line, const std::string& what) {
  throw ValidationError(source + ":" + std::to_string(line) + ": " + what);
}

json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(source + ": " + e.what());
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

// Wraps nlohmann type errors so callers see one exception family.
template <typename F>
auto guarded(const std::string& source, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ValidationError(source + ": " + e.what());
  }
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

MaxCutProblem parse_graph(std::istream& in, const std::string& source) {
  MaxCutProblem p;
  bool have_count = false;
  for_each_data_line(in, [&](const std::string& line, int number) {
    std::istringstream ls(line);
    if (!have_count) {
      if (!(ls >> p.num_nodes)) fail(source, number, "expected node count");
      have_count = true;
    } else {
      int u = 0;
      int v = 0;
      if (!(ls >> u >> v)) fail(source, number, "expected edge 'u v'");
      if (u > v) std::swap(u, v);
      p.edges.emplace_back(u, v);
    }
    std::string rest;
    if (ls >> rest) fail(source, number, "trailing token '" + rest + "'");
  });
  if (!have_count) throw ValidationError(source + ": empty graph file");
  try {
    p.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(source + ": " + e.what());
  }
  return p;
}

MaxCutProblem load_graph(const std::filesystem::path& path) {
  std::istringstream in(read_text_file(path));
  return parse_graph(in, path.string());
}

PauliHamiltonian parse_hamiltonian(std::istream& in, const std::string& source) {
  PauliHamiltonian h;
  for_each_data_line(in, [&](const std::string& line, int number) {
    std::istringstream ls(line);
    PauliTerm t;
    if (!(ls >> t.coefficient >> t.paulis)) fail(source, number, "expected 'coefficient PAULIS'");
    std::string rest;
    if (ls >> rest) fail(source, number, "trailing token '" + rest + "'");
    h.terms.push_back(std::move(t));
  });
  try {
    h.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(source + ": " + e.what());
  }
  return h;
}

PauliHamiltonian load_hamiltonian(const std::filesystem::path& path) {
  std::istringstream in(read_text_file(path));
  return parse_hamiltonian(in, path.string());
}

std::vector<DeviceProfile> parse_fleet(const std::string& text, const std::string& source) {
  const json doc = parse_json(text, source);
  return guarded(source, [&] {
    std::vector<DeviceProfile> fleet;
    for (const auto& d : doc.at("devices")) {
      DeviceProfile p;
      p.id = d.at("id").get<std::string>();
      p.noise.p1 = d.at("p1").get<double>();
      p.noise.p2 = d.at("p2").get<double>();
      p.noise.readout = d.at("readout").get<double>();
      p.noise.t_g1 = d.at("t_g1").get<double>();
      p.noise.t_g2 = d.at("t_g2").get<double>();
      p.noise.t1 = d.at("t1").get<double>();
      p.noise.t2 = d.at("t2").get<double>();
      p.display_fidelity = get_or(d, "display_fidelity", 1.0);
      p.pending_load = get_or(d, "pending_load", 0);
      try {
        p.noise.validate();
      } catch (const ValidationError& e) {
        throw ValidationError(source + ": device '" + p.id + "': " + e.what());
      }
      if (!(p.display_fidelity > 0.0 && p.display_fidelity <= 1.0) || p.pending_load < 0) {
        throw ValidationError(source + ": device '" + p.id + "': bad display_fidelity or pending_load");
      }
      for (const auto& other : fleet) {
        if (other.id == p.id) throw ValidationError(source + ": duplicate device id '" + p.id + "'");
      }
      fleet.push_back(std::move(p));
    }
    if (fleet.empty()) throw ValidationError(source + ": fleet has no devices");
    return fleet;
  });
}

std::vector<DeviceProfile> load_fleet(const std::filesystem::path& path) {
  return parse_fleet(read_text_file(path), path.string());
}

std::vector<cloud::SimDevice> Scenario::build_fleet(std::uint64_t run_seed) const {
  return devices.empty() ? cloud::make_fleet(fleet, fleet_seed.value_or(run_seed)) : devices;
}

Scenario parse_scenario(const std::string& text, const std::string& source) {
  const json doc = parse_json(text, source);
  Scenario s = guarded(source, [&] {
    Scenario s;
    if (doc.contains("fleet")) {
      const json& f = doc.at("fleet");
      s.fleet.num_devices = get_or(f, "num_devices", s.fleet.num_devices);
      s.fleet.min_fidelity = get_or(f, "min_fidelity", s.fleet.min_fidelity);
      s.fleet.max_fidelity = get_or(f, "max_fidelity", s.fleet.max_fidelity);
      s.fleet.base_exec_time = get_or(f, "base_exec_time", s.fleet.base_exec_time);
      s.fleet.exec_spread = get_or(f, "exec_spread", s.fleet.exec_spread);
      if (f.contains("seed")) s.fleet_seed = f.at("seed").get<std::uint64_t>();
    }
    if (doc.contains("devices")) {
      int next_id = 0;
      for (const auto& d : doc.at("devices")) {
        cloud::SimDevice dev;
        dev.id = get_or(d, "id", next_id);
        dev.fidelity = d.at("fidelity").get<double>();
        dev.min_exec_time = d.at("min_exec_time").get<double>();
        dev.max_exec_time = get_or(d, "max_exec_time", 3.0 * dev.min_exec_time);
        dev.validate();
        s.devices.push_back(dev);
        next_id = dev.id + 1;
      }
    }
    if (doc.contains("workload")) {
      const json& w = doc.at("workload");
      s.num_jobs = get_or(w, "num_jobs", s.num_jobs);
      s.workload.horizon = get_or(w, "horizon", s.workload.horizon);
      s.workload.min_session_length = get_or(w, "min_session_length", s.workload.min_session_length);
      s.workload.max_session_length = get_or(w, "max_session_length", s.workload.max_session_length);
      s.workload.min_delay = get_or(w, "min_delay", s.workload.min_delay);
      s.workload.max_delay = get_or(w, "max_delay", s.workload.max_delay);
    }
    if (doc.contains("qoncord")) {
      const json& q = doc.at("qoncord");
      s.qoncord.checkpoint_fraction = get_or(q, "checkpoint_fraction", s.qoncord.checkpoint_fraction);
      s.qoncord.fidelity_floor = get_or(q, "fidelity_floor", s.qoncord.fidelity_floor);
      s.qoncord.prune_fraction = get_or(q, "prune_fraction", s.qoncord.prune_fraction);
    }
    if (doc.contains("policies")) {
      for (const auto& p : doc.at("policies")) s.policies.push_back(cloud::parse_policy(p.get<std::string>()));
    } else {
      s.policies.assign(std::begin(cloud::kAllPolicies), std::end(cloud::kAllPolicies));
    }
    s.runtime_fractions = get_or(doc, "runtime_fractions", std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9});
    s.seeds = get_or(doc, "seeds", std::vector<std::uint64_t>{1});
    return s;
  });
  if (s.num_jobs < 1) throw ValidationError(source + ": num_jobs must be positive");
  if (s.seeds.empty()) throw ValidationError(source + ": seeds must be non-empty");
  if (s.policies.empty()) throw ValidationError(source + ": policies must be non-empty");
  for (double f : s.runtime_fractions) {
    if (!(f >= 0.1 && f <= 0.9)) throw ValidationError(source + ": runtime fractions must lie in [0.1, 0.9]");
  }
  try {
    s.workload.validate();
    s.qoncord.validate();
    if (s.devices.empty()) (void)s.build_fleet(0);
  } catch (const ValidationError& e) {
    throw ValidationError(source + ": " + e.what());
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  return parse_scenario(read_text_file(path), path.string());
}

std::vector<std::pair<int, CircuitStats>> CircuitFamily::members() const {
  std::vector<std::pair<int, CircuitStats>> out;
  if (kind == Kind::Qaoa) {
    const MaxCutProblem problem = erdos_renyi(nodes, edge_prob, graph_seed);
    for (int layers : depths) {
      const ParameterVector zeros = ParameterVector::Zero(qaoa_parameter_count(layers));
      out.emplace_back(layers, circuit_stats(build_qaoa(problem, zeros, layers)));
    }
  } else {
    for (int reps : depths) {
      const ParameterVector zeros = ParameterVector::Zero(twolocal_parameter_count(nodes, reps));
      out.emplace_back(reps, circuit_stats(build_twolocal(nodes, zeros, reps)));
    }
  }
  return out;
}

CircuitFamily parse_circuit_family(const std::string& text, const std::string& source) {
  const json doc = parse_json(text, source);
  CircuitFamily c = guarded(source, [&] {
    CircuitFamily c;
    const std::string kind = doc.at("kind").get<std::string>();
    if (kind == "qaoa") {
      c.kind = CircuitFamily::Kind::Qaoa;
      c.nodes = doc.at("nodes").get<int>();
      c.edge_prob = get_or(doc, "edge_prob", c.edge_prob);
      c.graph_seed = get_or(doc, "graph_seed", c.graph_seed);
      c.depths = doc.at("layers").get<std::vector<int>>();
    } else if (kind == "twolocal") {
      c.kind = CircuitFamily::Kind::TwoLocal;
      c.nodes = doc.at("qubits").get<int>();
      c.depths = doc.at("reps").get<std::vector<int>>();
    } else {
      throw ValidationError(source + ": unknown circuit kind '" + kind + "'");
    }
    return c;
  });
  if (c.nodes < 1 || c.depths.empty()) throw ValidationError(source + ": circuit needs a size and depths");
  for (int d : c.depths) {
    if (d < 1) throw ValidationError(source + ": depths must be at least 1");
  }
  return c;
}

CircuitFamily load_circuit_family(const std::filesystem::path& path) {
  return parse_circuit_family(read_text_file(path), path.string());
}

}  // namespace qoncord
