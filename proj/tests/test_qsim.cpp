// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "qoncord/errors.hpp"
#include "qoncord/qsim.hpp"
#include "qoncord/vqa.hpp"

#include <cmath>
#include <random>

using namespace qoncord;

namespace {

bool hermitian_unit_trace(const DensityMatrix& rho, double tol = 1e-9) {
  return (rho - rho.adjoint()).cwiseAbs().maxCoeff() < tol && std::abs(rho.trace() - Complex(1, 0)) < tol;
}

Circuit make(int n, std::vector<Gate> gates, bool measure = true) { return {n, std::move(gates), measure}; }

}  // namespace

TEST_SUITE("simulate") {
  TEST_CASE("hadamard gives a fair coin") {
    const auto d = simulate(make(1, {Gate::h(0)}), NoiseModel::noiseless());
    CHECK(d.probability("0") == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(d.probability("1") == doctest::Approx(0.5).epsilon(1e-12));
  }

  TEST_CASE("bell pair") {
    const auto d = simulate(make(2, {Gate::h(0), Gate::cx(0, 1)}), NoiseModel::noiseless());
    CHECK(d.probability("00") == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(d.probability("11") == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(d.probability("01") == doctest::Approx(0.0));
    CHECK(d.probability("10") == doctest::Approx(0.0));
  }

  TEST_CASE("readout flips the idle qubit") {
    NoiseModel noise;
    noise.readout = 0.1;
    const auto d = simulate(make(1, {}), noise);
    CHECK(d.probability("0") == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(d.probability("1") == doctest::Approx(0.1).epsilon(1e-12));
  }

  TEST_CASE("bit q of the index is character q of the bitstring") {
    const auto d = simulate(make(3, {Gate::rx(0, M_PI)}), NoiseModel::noiseless());
    CHECK(d.probability("100") == doctest::Approx(1.0));
    CHECK(d[1] == doctest::Approx(1.0));
    CHECK(to_bitstring(1, 3) == "100");
    CHECK(from_bitstring("100") == 1);
    CHECK(from_bitstring(to_bitstring(6, 3)) == 6);
  }

  TEST_CASE("noiseless evolution matches the statevector oracle on random circuits") {
    std::mt19937_64 rng(20240611);
    for (int trial = 0; trial < 60; ++trial) {
      const int n = 1 + trial % 6;
      const Circuit c = oracle::random_circuit(n, 4 + trial % 17, rng);
      const Eigen::VectorXd expected = oracle::probabilities(c);
      const auto got = simulate(c, NoiseModel::noiseless());
      CHECK((got.probabilities() - expected).cwiseAbs().maxCoeff() < 1e-9);
    }
  }

  TEST_CASE("output does not depend on any random state") {
    std::mt19937_64 rng(5);
    const Circuit c = oracle::random_circuit(4, 20, rng);
    NoiseModel noise{0.01, 0.05, 0.03};
    const auto a = simulate(c, noise);
    std::mt19937_64 unrelated(99);
    (void)unrelated();
    const auto b = simulate(c, noise);
    CHECK(a.probabilities() == b.probabilities());
  }

  TEST_CASE("raising p2 never helps the noiseless mode") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 25; ++trial) {
      const Circuit c = oracle::random_circuit(2 + trial % 4, 12, rng);
      const auto ideal = simulate(c, NoiseModel::noiseless());
      Eigen::Index mode = 0;
      ideal.probabilities().maxCoeff(&mode);
      double previous = ideal.probabilities()[mode];
      for (double p2 : {0.01, 0.05, 0.2, 0.5, 1.0}) {
        NoiseModel noise;
        noise.p2 = p2;
        const double now = simulate(c, noise).probabilities()[mode];
        CHECK(now <= previous + 1e-9);
        previous = now;
      }
    }
  }

  TEST_CASE("invalid circuits are rejected") {
    CHECK_THROWS_AS(simulate(make(15, {}), NoiseModel{}), CapacityError);
    CHECK_THROWS_AS(simulate(make(2, {Gate::cx(0, 0)}), NoiseModel{}), ValidationError);
    CHECK_THROWS_AS(simulate(make(2, {Gate::h(2)}), NoiseModel{}), ValidationError);
    CHECK_THROWS_AS(simulate(make(2, {Gate{GateKind::RZZ, {0}, 0.1}}), NoiseModel{}), ValidationError);
    CHECK_THROWS_AS(simulate(make(1, {Gate{GateKind::H, {0, 1}, 0.0}}), NoiseModel{}), ValidationError);
    CHECK_THROWS_AS(simulate(make(1, {Gate::rx(0, NAN)}), NoiseModel{}), ValidationError);
    NoiseModel bad;
    bad.readout = 0.6;
    CHECK_THROWS_AS(simulate(make(1, {}), bad), ValidationError);
    bad = {};
    bad.p2 = -0.1;
    CHECK_THROWS_AS(simulate(make(1, {}), bad), ValidationError);
    bad = {};
    bad.t1 = 0.0;
    CHECK_THROWS_AS(simulate(make(1, {}), bad), ValidationError);
  }
}

TEST_SUITE("channels") {
  TEST_CASE("each gate kernel matches the dense operator on a random mixed state") {
    std::mt19937_64 rng(3);
    const int n = 4;
    const std::vector<Gate> gates{Gate::h(2),        Gate::rx(0, 0.7),     Gate::ry(3, -1.3), Gate::rz(1, 2.2),
                                  Gate::cx(3, 1),    Gate::cx(0, 2),       Gate::rzz(1, 3, 0.9),
                                  Gate::rzz(2, 0, -2.5)};
    for (const auto& g : gates) {
      CAPTURE(to_string(g.kind));
      const oracle::Mat rho0 = oracle::random_density(n, rng);
      DensityMatrix rho = rho0;
      apply_gate(rho, g);
      const oracle::Mat u = oracle::full_unitary(g, n);
      CHECK((rho - u * rho0 * u.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    }
  }

  TEST_CASE("depolarizing matches the Pauli twirl") {
    std::mt19937_64 rng(4);
    const int n = 3;
    for (double p : {0.0, 0.03, 0.5, 1.0}) {
      for (const std::vector<int>& qs : {std::vector<int>{1}, std::vector<int>{0, 2}, std::vector<int>{2, 1}}) {
        const oracle::Mat rho0 = oracle::random_density(n, rng);
        DensityMatrix rho = rho0;
        apply_depolarizing(rho, qs, p);
        CHECK((rho - oracle::depolarize(rho0, qs, p, n)).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(hermitian_unit_trace(rho));
      }
    }
  }

  TEST_CASE("fused noisy gates equal gate followed by depolarizing") {
    std::mt19937_64 rng(8);
    const int n = 4;
    const std::vector<Gate> gates{Gate::h(0), Gate::rx(3, 1.1), Gate::ry(1, 0.4), Gate::rz(2, -0.8),
                                  Gate::cx(1, 2), Gate::rzz(0, 3, 1.7), Gate::rzz(2, 1, -0.3)};
    for (const auto& g : gates) {
      for (double p : {0.0, 0.002, 0.3, 0.999, 1.0}) {
        CAPTURE(to_string(g.kind));
        CAPTURE(p);
        const oracle::Mat rho0 = oracle::random_density(n, rng);
        DensityMatrix fused = rho0;
        apply_noisy_gate(fused, g, p);
        const oracle::Mat u = oracle::full_unitary(g, n);
        const oracle::Mat expected = oracle::depolarize(u * rho0 * u.adjoint(), g.qubits, p, n);
        CHECK((fused - expected).cwiseAbs().maxCoeff() < 1e-12);
      }
    }
  }

  TEST_CASE("noisy evolution keeps rho Hermitian with unit trace") {
    std::mt19937_64 rng(9);
    const NoiseModel noise{0.01, 0.04, 0.02};
    for (int trial = 0; trial < 10; ++trial) {
      Circuit c = oracle::random_circuit(2 + trial % 4, 25, rng);
      DensityMatrix rho = ground_state(c.num_qubits);
      for (const auto& g : c.gates) {
        apply_noisy_gate(rho, g, is_two_qubit(g.kind) ? noise.p2 : noise.p1);
        REQUIRE(hermitian_unit_trace(rho));
      }
      CHECK((evolve(c, noise) - rho).cwiseAbs().maxCoeff() < 1e-12);
    }
  }

  TEST_CASE("full depolarizing leaves the maximally mixed state") {
    DensityMatrix rho = ground_state(2);
    const std::vector<int> both{0, 1};
    apply_depolarizing(rho, both, 1.0);
    CHECK((rho - DensityMatrix::Identity(4, 4) / 4.0).cwiseAbs().maxCoeff() < 1e-15);
  }

  TEST_CASE("readout convolution is the per-qubit confusion matrix") {
    std::mt19937_64 rng(10);
    const int n = 3;
    const double e = 0.07;
    const oracle::Mat rho = oracle::random_density(n, rng);
    const auto d = measure(rho, e);
    Eigen::MatrixXd flip(2, 2);
    flip << 1 - e, e, e, 1 - e;
    Eigen::MatrixXd confusion = Eigen::MatrixXd::Identity(1, 1);
    for (int q = 0; q < n; ++q) confusion = Eigen::kroneckerProduct(confusion, flip).eval();
    const Eigen::VectorXd expected = confusion * rho.diagonal().real();
    CHECK((d.probabilities() - expected).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_SUITE("circuit_stats") {
  TEST_CASE("disjoint gates share a layer") {
    const auto s = circuit_stats(make(2, {Gate::h(0), Gate::h(1)}, false));
    CHECK(s.depth == 1);
    CHECK(s.one_qubit_gates == 2);
    CHECK(s.two_qubit_gates == 0);
    CHECK(s.measurements == 0);
  }

  TEST_CASE("dependent gates stack") {
    const auto s = circuit_stats(make(2, {Gate::h(0), Gate::cx(0, 1)}, true));
    CHECK(s.depth == 2);
    CHECK(s.one_qubit_gates == 1);
    CHECK(s.two_qubit_gates == 1);
    CHECK(s.measurements == 2);
  }

  TEST_CASE("one-layer QAOA on seven nodes matches a hand count") {
    const MaxCutProblem p = erdos_renyi(7, 0.5, 7);
    const auto s = circuit_stats(build_qaoa(p, ParameterVector::Zero(2), 1));
    const int edges = static_cast<int>(p.edges.size());
    // 7 H, then one RZZ per edge, then 7 RX.
    CHECK(s.one_qubit_gates == 14);
    CHECK(s.two_qubit_gates == edges);
    CHECK(s.measurements == 7);
    CHECK(s.depth <= s.one_qubit_gates + s.two_qubit_gates);
    CHECK(s.depth >= 3);
  }

  TEST_CASE("depth bounds hold on random circuits") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 30; ++trial) {
      const Circuit c = oracle::random_circuit(1 + trial % 6, trial, rng);
      const auto s = circuit_stats(c);
      CHECK(s.depth <= s.one_qubit_gates + s.two_qubit_gates);
      CHECK(s.one_qubit_gates + s.two_qubit_gates == static_cast<int>(c.gates.size()));
      CHECK(s.measurements == c.num_qubits);
      if (!c.gates.empty()) CHECK(s.depth >= 1);
    }
  }
}

TEST_SUITE("sample") {
  TEST_CASE("point mass") {
    const auto d = OutcomeDistribution::from_map(1, {{"0", 1.0}});
    const auto counts = sample(d, 100, 1);
    CHECK(counts.size() == 1);
    CHECK(counts.at("0") == 100);
  }

  TEST_CASE("fair coin stays within five sigma") {
    const auto d = OutcomeDistribution::from_map(1, {{"0", 0.5}, {"1", 0.5}});
    for (std::uint64_t seed : {1ULL, 2ULL, 12345ULL}) {
      const auto counts = sample(d, 1'000'000, seed);
      const double sigma = std::sqrt(1e6 * 0.25);
      CHECK(std::abs(static_cast<double>(counts.at("0")) - 5e5) < 5 * sigma);
      CHECK(counts.at("0") + counts.at("1") == 1'000'000);
    }
  }

  TEST_CASE("same seed, same counts") {
    const auto d = simulate(make(3, {Gate::h(0), Gate::h(1), Gate::ry(2, 0.4)}), NoiseModel::noiseless());
    CHECK(sample(d, 5000, 42) == sample(d, 5000, 42));
  }

  TEST_CASE("counts always sum to shots") {
    const auto d = simulate(make(4, {Gate::h(0), Gate::h(1), Gate::h(2), Gate::ry(3, 1.0)}), NoiseModel{0, 0, 0.05});
    for (std::uint64_t shots : {1ULL, 7ULL, 1000ULL}) {
      std::uint64_t total = 0;
      for (const auto& [bits, n] : sample(d, shots, shots)) total += n;
      CHECK(total == shots);
    }
  }

  TEST_CASE("zero shots is an error") {
    const auto d = OutcomeDistribution::from_map(1, {{"0", 1.0}});
    CHECK_THROWS_AS(sample(d, 0, 1), ValidationError);
  }
}

TEST_SUITE("distribution") {
  TEST_CASE("normalizes and validates") {
    const auto d = OutcomeDistribution::from_map(2, {{"00", 2.0}, {"11", 2.0}});
    CHECK(d.probabilities().sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d.to_map().size() == 2);
    CHECK_THROWS_AS(OutcomeDistribution::from_map(2, {{"0", 1.0}}), ValidationError);
    CHECK_THROWS_AS(OutcomeDistribution::from_map(1, {{"2", 1.0}}), ValidationError);
    CHECK_THROWS_AS(OutcomeDistribution(1, Eigen::VectorXd::Zero(2)), ValidationError);
  }
}
