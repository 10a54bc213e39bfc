// SPDX-License-Identifier: Apache-2.0
#pragma once

// Exact density-matrix simulation of small circuits under depolarizing gate
// noise and symmetric readout error.
//
// Basis convention: bit q of a basis index is qubit q. Bitstrings are printed
// with qubit 0 first, so "10" on two qubits means q0 = 1, q1 = 0.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qoncord {

using Complex = std::complex<double>;
using DensityMatrix = Eigen::MatrixXcd;
using Matrix2c = Eigen::Matrix2cd;

/// Largest register the dense simulator accepts (2^28 complex entries).
inline constexpr int kMaxSimQubits = 14;

enum class GateKind { H, RX, RY, RZ, CX, RZZ };

struct Gate {
  GateKind kind;
  std::vector<int> qubits;
  double angle = 0.0;  // radians, ignored for H and CX

  static Gate h(int q) { return {GateKind::H, {q}, 0.0}; }
  static Gate rx(int q, double theta) { return {GateKind::RX, {q}, theta}; }
  static Gate ry(int q, double theta) { return {GateKind::RY, {q}, theta}; }
  static Gate rz(int q, double theta) { return {GateKind::RZ, {q}, theta}; }
  static Gate cx(int control, int target) { return {GateKind::CX, {control, target}, 0.0}; }
  static Gate rzz(int a, int b, double theta) { return {GateKind::RZZ, {a, b}, theta}; }
};

bool is_two_qubit(GateKind kind);
bool is_parametric(GateKind kind);
std::string to_string(GateKind kind);

struct Circuit {
  int num_qubits = 1;
  std::vector<Gate> gates;
  bool measure_all = false;

  /// Throws ValidationError on bad arity or qubit index, CapacityError past kMaxSimQubits.
  void validate() const;
};

struct CircuitStats {
  int depth = 0;              // greedy-packed parallel layers
  int one_qubit_gates = 0;
  int two_qubit_gates = 0;
  int measurements = 0;
};

CircuitStats circuit_stats(const Circuit& circuit);

/// Per-device noise. Gate durations and coherence times share one time unit
/// (microseconds in the bundled fleet files).
struct NoiseModel {
  double p1 = 0.0;       // depolarizing probability per 1-qubit gate
  double p2 = 0.0;       // depolarizing probability per 2-qubit gate
  double readout = 0.0;  // symmetric bit-flip probability per measured qubit
  double t_g1 = 0.035;
  double t_g2 = 0.4;
  double t1 = 100.0;
  double t2 = 100.0;

  void validate() const;
  static NoiseModel noiseless() { return {}; }
};

/// Normalized probabilities over the 2^n computational basis states, indexed
/// by basis integer.
class OutcomeDistribution {
 public:
  OutcomeDistribution() = default;
  OutcomeDistribution(int num_qubits, Eigen::VectorXd probs);

  /// Builds from bitstring keys; missing outcomes get zero. Normalizes.
  static OutcomeDistribution from_map(int num_qubits, const std::map<std::string, double>& probs);

  int num_qubits() const { return num_qubits_; }
  std::size_t size() const { return static_cast<std::size_t>(probs_.size()); }
  const Eigen::VectorXd& probabilities() const { return probs_; }
  double operator[](std::uint64_t index) const { return probs_[static_cast<Eigen::Index>(index)]; }
  double probability(const std::string& bitstring) const;

  /// Non-zero entries keyed by bitstring.
  std::map<std::string, double> to_map(double cutoff = 0.0) const;

 private:
  int num_qubits_ = 0;
  Eigen::VectorXd probs_;
};

std::string to_bitstring(std::uint64_t index, int num_qubits);
std::uint64_t from_bitstring(const std::string& bits);

/// |0...0><0...0| on n qubits.
DensityMatrix ground_state(int num_qubits);

// Channel kernels. All act in place and preserve trace and hermiticity.
void apply_unitary_1q(DensityMatrix& rho, int qubit, const Matrix2c& u);
void apply_cx(DensityMatrix& rho, int control, int target);
void apply_diagonal(DensityMatrix& rho, const Eigen::VectorXcd& phases);
void apply_depolarizing(DensityMatrix& rho, std::span<const int> qubits, double p);
void apply_gate(DensityMatrix& rho, const Gate& gate);

/// apply_gate followed by depolarizing with probability p on the acted
/// qubits, fused into one pass over the upper block triangle. Requires a
/// Hermitian rho.
void apply_noisy_gate(DensityMatrix& rho, const Gate& gate, double p);

Matrix2c gate_matrix_1q(const Gate& gate);

/// Unitary evolution from |0...0> with depolarizing after every gate.
DensityMatrix evolve(const Circuit& circuit, const NoiseModel& noise);

/// Computational-basis diagonal of rho, convolved with the readout flip matrix.
OutcomeDistribution measure(const DensityMatrix& rho, double readout);

OutcomeDistribution simulate(const Circuit& circuit, const NoiseModel& noise);

/// Multinomial draw of `shots` samples. Deterministic per seed.
std::map<std::string, std::uint64_t> sample(const OutcomeDistribution& dist, std::uint64_t shots,
                                            std::uint64_t rng_seed);

}  // namespace qoncord
