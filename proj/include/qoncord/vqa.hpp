// SPDX-License-Identifier: Apache-2.0
#pragma once

// Problem definitions and measurement post-processing for QAOA max-cut and
// two-local VQE. Energies are minimized: a max-cut energy is the negative cut.

#include "qoncord/qsim.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace qoncord {

using ParameterVector = Eigen::VectorXd;

struct MaxCutProblem {
  int num_nodes = 0;
  std::vector<std::pair<int, int>> edges;  // unit weight, stored with first < second
  std::uint64_t seed = 0;

  void validate() const;
  /// Number of edges crossing the partition encoded by `assignment` (bit q = side of node q).
  int cut_value(std::uint64_t assignment) const;
};

struct PauliTerm {
  double coefficient = 0.0;
  std::string paulis;  // character q acts on qubit q
};

struct PauliHamiltonian {
  std::vector<PauliTerm> terms;

  int num_qubits() const;
  void validate() const;
};

struct EvaluationResult {
  double expectation = 0.0;
  double entropy = 0.0;  // bits
  OutcomeDistribution distribution;
};

/// G(n, p) graph. Redraws up to a fixed number of times when the draw has no edges.
MaxCutProblem erdos_renyi(int num_nodes, double edge_prob, std::uint64_t seed);

/// H on every qubit, then per layer RZZ(2 gamma_k) on every edge followed by
/// RX(2 beta_k) on every qubit. params = (gamma_1, beta_1, ..., gamma_p, beta_p).
Circuit build_qaoa(const MaxCutProblem& problem, const ParameterVector& params, int layers);

inline int qaoa_parameter_count(int layers) { return 2 * layers; }

/// RY layer, then per rep a linear CX chain followed by another RY layer.
Circuit build_twolocal(int num_qubits, const ParameterVector& params, int reps);

inline int twolocal_parameter_count(int num_qubits, int reps) { return num_qubits * (reps + 1); }

double maxcut_expectation(const OutcomeDistribution& dist, const MaxCutProblem& problem);

/// Sum_k c_k Tr(rho P_k).
double pauli_expectation(const DensityMatrix& rho, const PauliHamiltonian& hamiltonian);

double shannon_entropy(const OutcomeDistribution& dist);

double approximation_ratio(double e_optimized, double e_ground_truth);

/// -max_z cut(z) by exhaustive enumeration.
double brute_force_maxcut(const MaxCutProblem& problem);
inline constexpr int kMaxBruteForceNodes = 24;

/// Smallest eigenvalue of the dense Hamiltonian built from Kronecker products.
double brute_force_eigenmin(const PauliHamiltonian& hamiltonian);
inline constexpr int kMaxEigenQubits = 10;

/// Dense 2^n x 2^n matrix of the Hamiltonian (qubit 0 is the least significant factor).
Eigen::MatrixXcd dense_matrix(const PauliHamiltonian& hamiltonian);

// Composite evaluations used as optimization objectives.
EvaluationResult evaluate_qaoa(const MaxCutProblem& problem, int layers, const ParameterVector& params,
                               const NoiseModel& noise);
EvaluationResult evaluate_vqe(const PauliHamiltonian& hamiltonian, int reps, const ParameterVector& params,
                              const NoiseModel& noise);

}  // namespace qoncord
