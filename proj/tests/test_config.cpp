// SPDX-License-Identifier: Apache-2.0
// Input readers and the report writers behind the command-line tool.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qoncord/config.hpp"
#include "qoncord/errors.hpp"
#include "qoncord/experiments.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace qoncord;
using Json = nlohmann::json;

namespace {

MaxCutProblem graph_from(const std::string& text) {
  std::istringstream in(text);
  return parse_graph(in, "test.graph");
}

PauliHamiltonian hamiltonian_from(const std::string& text) {
  std::istringstream in(text);
  return parse_hamiltonian(in, "test.ham");
}

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ValidationError& e) {
    return e.what();
  }
  return {};
}

const char* kFleet = R"({"devices": [
  {"id": "lf", "p1": 0.0005, "p2": 0.02, "readout": 0.045, "t_g1": 0.035, "t_g2": 0.45, "t1": 100, "t2": 90},
  {"id": "hf", "p1": 0.0003, "p2": 0.011, "readout": 0.012, "t_g1": 0.035, "t_g2": 0.40, "t1": 110, "t2": 100}
]})";

std::filesystem::path scratch_dir() {
  auto dir = std::filesystem::temp_directory_path() / "qoncord_test_config";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_SUITE("graph files") {
  TEST_CASE("node count then edges, comments skipped") {
    const auto p = graph_from("# triangle\n3\n0 1\n\n1 2  # trailing comment\n0 2\n");
    CHECK(p.num_nodes == 3);
    CHECK(p.edges.size() == 3);
    CHECK(brute_force_maxcut(p) == -2.0);
  }

  TEST_CASE("edges are normalized") {
    const auto p = graph_from("2\n1 0\n");
    REQUIRE(p.edges.size() == 1);
    CHECK(p.edges[0] == std::pair{0, 1});
  }

  TEST_CASE("errors name the line") {
    CHECK(error_of([] { graph_from("3\n0 x\n"); }).find("test.graph:2") != std::string::npos);
    CHECK(error_of([] { graph_from("3\n0 1 2\n"); }).find("trailing") != std::string::npos);
    CHECK_FALSE(error_of([] { graph_from("# nothing\n"); }).empty());
    CHECK_FALSE(error_of([] { graph_from("3\n0 3\n"); }).empty());
    CHECK_FALSE(error_of([] { graph_from("3\n1 1\n"); }).empty());
  }
}

TEST_SUITE("hamiltonian files") {
  TEST_CASE("coefficient and Pauli string per line") {
    const auto h = hamiltonian_from("# sample\n-0.5 ZI\n0.25 XX\n");
    REQUIRE(h.terms.size() == 2);
    CHECK(h.terms[0].coefficient == -0.5);
    CHECK(h.terms[1].paulis == "XX");
    CHECK(h.num_qubits() == 2);
  }

  TEST_CASE("errors") {
    CHECK(error_of([] { hamiltonian_from("0.5\n"); }).find("test.ham:1") != std::string::npos);
    CHECK_FALSE(error_of([] { hamiltonian_from("0.5 ZQ\n"); }).empty());
    CHECK_FALSE(error_of([] { hamiltonian_from("0.5 Z\n0.5 ZZ\n"); }).empty());
    CHECK_FALSE(error_of([] { hamiltonian_from(""); }).empty());
  }

  TEST_CASE("the bundled sample parses") {
    const auto h = load_hamiltonian(QONCORD_CONFIG_DIR "/sample_4q.ham");
    CHECK(h.num_qubits() == 4);
    CHECK(brute_force_eigenmin(h) < 0.0);
  }
}

TEST_SUITE("fleet files") {
  TEST_CASE("all noise fields are read") {
    const auto fleet = parse_fleet(kFleet);
    REQUIRE(fleet.size() == 2);
    CHECK(fleet[0].id == "lf");
    CHECK(fleet[0].noise.p2 == 0.02);
    CHECK(fleet[1].noise.t1 == 110);
    CHECK(fleet[1].display_fidelity == 1.0);
  }

  TEST_CASE("errors") {
    CHECK_FALSE(error_of([] { parse_fleet("{"); }).empty());
    CHECK_FALSE(error_of([] { parse_fleet(R"({"devices": []})"); }).empty());
    CHECK(error_of([] {
            parse_fleet(R"({"devices": [{"id": "a", "p1": 0, "p2": 0, "readout": 0, "t_g1": 0, "t_g2": 0, "t1": 1, "t2": 1},
                                        {"id": "a", "p1": 0, "p2": 0, "readout": 0, "t_g1": 0, "t_g2": 0, "t1": 1, "t2": 1}]})");
          }).find("duplicate") != std::string::npos);
    CHECK_FALSE(error_of([] {
                  parse_fleet(R"({"devices": [{"id": "a", "p1": 2, "p2": 0, "readout": 0, "t_g1": 0, "t_g2": 0, "t1": 1, "t2": 1}]})");
                }).empty());
    CHECK_FALSE(error_of([] { parse_fleet(R"({"devices": [{"id": "a"}]})"); }).empty());
  }

  TEST_CASE("bundled fleets order low to high fidelity") {
    for (const char* name : {"/fleet_2tier.json", "/fleet_3tier.json"}) {
      const auto fleet = load_fleet(std::string(QONCORD_CONFIG_DIR) + name);
      const auto stats = circuit_stats(build_qaoa(erdos_renyi(7, 0.5, 7), ParameterVector::Zero(6), 3));
      const auto tiers = filter_devices(stats, fleet);
      CHECK(tiers.size() == fleet.size());
      CHECK(tiers.front().id == "lf");
      CHECK(tiers.back().id == "hf");
    }
  }
}

TEST_SUITE("scenario files") {
  TEST_CASE("defaults") {
    const auto s = parse_scenario(R"({"policies": ["least_busy", "qoncord"]})");
    CHECK(s.num_jobs == 1000);
    CHECK(s.runtime_fractions.size() == 9);
    CHECK(s.seeds == std::vector<std::uint64_t>{1});
    CHECK(s.policies.size() == 2);
    CHECK(s.build_fleet(5).size() == 10);
  }

  TEST_CASE("fixed fleet seed overrides the run seed") {
    const auto s = parse_scenario(R"({"policies": ["eqc"], "fleet": {"num_devices": 4, "seed": 9}})");
    const auto a = s.build_fleet(1);
    const auto b = s.build_fleet(2);
    REQUIRE(a.size() == 4);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].min_exec_time == b[i].min_exec_time);
  }

  TEST_CASE("explicit devices") {
    const auto s = parse_scenario(
        R"({"policies": ["best_fidelity"], "devices": [{"fidelity": 0.4, "min_exec_time": 1}, {"fidelity": 0.8, "min_exec_time": 2}]})");
    const auto fleet = s.build_fleet(3);
    REQUIRE(fleet.size() == 2);
    CHECK(fleet[1].id == 1);
    CHECK(fleet[1].max_exec_time == 6.0);
  }

  TEST_CASE("errors") {
    CHECK_FALSE(error_of([] { parse_scenario(R"({"policies": ["fastest"]})"); }).empty());
    CHECK_FALSE(error_of([] { parse_scenario(R"({"policies": []})"); }).empty());
    CHECK_FALSE(error_of([] { parse_scenario(R"({"policies": ["eqc"], "seeds": []})"); }).empty());
    CHECK_FALSE(error_of([] { parse_scenario(R"({"policies": ["eqc"], "runtime_fractions": [0.95]})"); }).empty());
    CHECK_FALSE(error_of([] { parse_scenario(R"({"policies": ["eqc"], "workload": {"num_jobs": 0}})"); }).empty());
  }

  TEST_CASE("bundled default scenario") {
    const auto s = load_scenario(QONCORD_CONFIG_DIR "/scenario_default.json");
    CHECK(s.policies.size() == 6);
    CHECK(s.runtime_fractions.size() == 9);
    CHECK(s.num_jobs == 1000);
  }
}

TEST_SUITE("circuit family files") {
  TEST_CASE("qaoa and two-local") {
    const auto q = parse_circuit_family(R"({"kind": "qaoa", "nodes": 5, "layers": [1, 2]})");
    const auto members = q.members();
    REQUIRE(members.size() == 2);
    CHECK(members[1].second.two_qubit_gates == 2 * members[0].second.two_qubit_gates);
    const auto t = parse_circuit_family(R"({"kind": "twolocal", "qubits": 4, "reps": [1, 3]})");
    CHECK(t.members()[1].second.two_qubit_gates == 9);
  }

  TEST_CASE("errors") {
    CHECK_FALSE(error_of([] { parse_circuit_family(R"({"kind": "uccsd", "nodes": 4, "layers": [1]})"); }).empty());
    CHECK_FALSE(error_of([] { parse_circuit_family(R"({"kind": "qaoa", "nodes": 4, "layers": []})"); }).empty());
    CHECK_FALSE(error_of([] { parse_circuit_family(R"({"kind": "twolocal", "qubits": 4, "reps": [0]})"); }).empty());
  }
}

TEST_SUITE("reports") {
  QaoaExperiment small_qaoa() {
    QaoaExperiment ex;
    ex.nodes = 5;
    ex.layers = 1;
    ex.restarts = 4;
    ex.seed = 3;
    ex.fleet = parse_fleet(kFleet);
    ex.spsa.max_iters = 30;
    return ex;
  }

  TEST_CASE("multirestart rows cover every configuration and restart") {
    const auto ex = small_qaoa();
    const Json doc = Json::parse(multirestart_report(ex, OutputFormat::Json));
    CHECK(doc["schema"] == "qoncord.multirestart/1");
    const auto& confs = doc["configurations"];
    REQUIRE(confs.size() == 1 + ex.fleet.size());
    CHECK(confs[0]["name"] == "qoncord");
    CHECK(confs[1]["name"] == "single:lf");
    std::size_t rows = 0;
    for (const auto& c : confs) {
      rows += c["per_restart"].size();
      long sum = 0;
      for (const auto& [dev, n] : c["executions_per_device"].items()) sum += n.get<long>();
      CHECK(sum == c["total_executions"].get<long>());
    }
    CHECK(rows == static_cast<std::size_t>(ex.restarts) * (1 + ex.fleet.size()));

    const std::string csv = multirestart_report(ex, OutputFormat::Csv);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + static_cast<long>(rows));
  }

  TEST_CASE("reports are byte-stable") {
    const auto ex = small_qaoa();
    CHECK(multirestart_report(ex, OutputFormat::Json) == multirestart_report(ex, OutputFormat::Json));
    CHECK(single_restart_report(ex, OutputFormat::Csv) == single_restart_report(ex, OutputFormat::Csv));
  }

  TEST_CASE("single restart carries a trajectory per configuration") {
    const Json doc = Json::parse(single_restart_report(small_qaoa(), OutputFormat::Json));
    CHECK(doc["schema"] == "qoncord.single_restart/1");
    for (const auto& c : doc["configurations"]) CHECK(c["trajectory"].size() == c["iterations"].get<std::size_t>());
  }

  TEST_CASE("vqe report") {
    VqeExperiment ex;
    ex.hamiltonian = hamiltonian_from("1.0 ZI\n0.5 XX\n");
    ex.restarts = 2;
    ex.fleet = parse_fleet(kFleet);
    ex.spsa.max_iters = 20;
    const Json doc = Json::parse(vqe_report(ex, OutputFormat::Json));
    CHECK(doc["schema"] == "qoncord.vqe/1");
    CHECK(doc["hamiltonian"]["ground_energy"].get<double>() == doctest::Approx(-std::sqrt(1.25)));
    CHECK(doc["configurations"].size() == 3);
  }

  TEST_CASE("queue-sim rows are the policy x fraction x seed product") {
    Scenario s = parse_scenario(R"({"policies": ["least_busy", "load_weighted", "fidelity_weighted",
                                                "best_fidelity", "eqc", "qoncord"],
                                   "workload": {"num_jobs": 50}})");
    const std::string csv = queue_sim_report(s, OutputFormat::Csv);
    CHECK(csv.rfind("policy,runtime_fraction,seed,throughput,mean_relative_fidelity,completion_time", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 54);
    s.seeds = {1, 2};
    const Json doc = Json::parse(queue_sim_report(s, OutputFormat::Json));
    CHECK(doc["rows"].size() == 108);
  }

  TEST_CASE("p-correct table") {
    const auto family = parse_circuit_family(R"({"kind": "qaoa", "nodes": 7, "layers": [1, 3, 5]})");
    const auto rows = p_correct_table(family, parse_fleet(kFleet));
    REQUIRE(rows.size() == 6);
    for (std::size_t i = 0; i < 3; ++i) CHECK(rows[i].p_correct < rows[i + 3].p_correct);
    CHECK(rows[0].p_correct > rows[2].p_correct);
    const std::string csv = p_correct_report(rows, OutputFormat::Csv);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
    CHECK(p_correct_text(rows).find("p_correct") != std::string::npos);
  }

  TEST_CASE("output format names") {
    CHECK(parse_output_format("csv") == OutputFormat::Csv);
    CHECK(parse_output_format("json") == OutputFormat::Json);
    CHECK_THROWS_AS(parse_output_format("xml"), ValidationError);
  }
}

TEST_SUITE("atomic writes") {
  TEST_CASE("replaces the target and leaves no temporary behind") {
    const auto dir = scratch_dir();
    const auto target = dir / "out.txt";
    write_file_atomically(target, "first\n");
    write_file_atomically(target, "second\n");
    CHECK(read_text_file(target) == "second\n");
    CHECK_FALSE(std::filesystem::exists(dir / "out.txt.partial"));
  }

  TEST_CASE("an unwritable target leaves nothing behind") {
    const auto target = scratch_dir() / "missing_dir" / "out.txt";
    CHECK_THROWS(write_file_atomically(target, "x"));
    CHECK_FALSE(std::filesystem::exists(target));
  }
}
