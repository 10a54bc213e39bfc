// SPDX-License-Identifier: Apache-2.0
#include "qoncord/vqa.hpp"

#include "qoncord/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <set>

namespace qoncord {

namespace {

constexpr int kMaxGraphRedraws = 1000;

void check_params(const ParameterVector& params, int expected, const char* ansatz) {
  if (params.size() != expected) {
    throw ValidationError(std::string(ansatz) + " expects " + std::to_string(expected) + " parameters, got " +
                          std::to_string(params.size()));
  }
}

Eigen::Matrix2cd pauli_matrix(char p) {
  using C = std::complex<double>;
  Eigen::Matrix2cd m;
  switch (p) {
    case 'I': m << 1, 0, 0, 1; break;
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, C(0, -1), C(0, 1), 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: throw ValidationError(std::string("unknown Pauli '") + p + "'");
  }
  return m;
}

}  // namespace

void MaxCutProblem::validate() const {
  if (num_nodes < 2) throw ValidationError("max-cut needs at least two nodes");
  std::set<std::pair<int, int>> seen;
  for (auto [a, b] : edges) {
    if (a == b) throw ValidationError("self-loop on node " + std::to_string(a));
    if (a < 0 || b < 0 || a >= num_nodes || b >= num_nodes) {
      throw ValidationError("edge (" + std::to_string(a) + "," + std::to_string(b) + ") out of range");
    }
    if (!seen.emplace(std::min(a, b), std::max(a, b)).second) {
      throw ValidationError("duplicate edge (" + std::to_string(a) + "," + std::to_string(b) + ")");
    }
  }
}

int MaxCutProblem::cut_value(std::uint64_t assignment) const {
  int cut = 0;
  for (auto [a, b] : edges) cut += static_cast<int>(((assignment >> a) ^ (assignment >> b)) & 1U);
  return cut;
}

int PauliHamiltonian::num_qubits() const {
  return terms.empty() ? 0 : static_cast<int>(terms.front().paulis.size());
}

void PauliHamiltonian::validate() const {
  if (terms.empty()) throw ValidationError("Hamiltonian has no terms");
  const std::size_t n = terms.front().paulis.size();
  if (n == 0) throw ValidationError("Pauli strings must be non-empty");
  for (const auto& t : terms) {
    if (t.paulis.size() != n) throw ValidationError("Pauli strings have mixed lengths");
    if (!std::isfinite(t.coefficient)) throw ValidationError("non-finite coefficient");
    for (char c : t.paulis) {
      if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z') {
        throw ValidationError("Pauli string '" + t.paulis + "' has invalid character");
      }
    }
  }
}

MaxCutProblem erdos_renyi(int num_nodes, double edge_prob, std::uint64_t seed) {
  if (num_nodes < 2) throw ValidationError("erdos_renyi needs n >= 2");
  if (!(edge_prob >= 0.0 && edge_prob <= 1.0)) throw ValidationError("edge probability must lie in [0, 1]");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(edge_prob);
  MaxCutProblem problem{num_nodes, {}, seed};
  for (int attempt = 0; attempt < kMaxGraphRedraws && problem.edges.empty(); ++attempt) {
    for (int a = 0; a < num_nodes; ++a) {
      for (int b = a + 1; b < num_nodes; ++b) {
        if (coin(rng)) problem.edges.emplace_back(a, b);
      }
    }
  }
  return problem;
}

Circuit build_qaoa(const MaxCutProblem& problem, const ParameterVector& params, int layers) {
  if (layers < 1) throw ValidationError("QAOA needs at least one layer");
  check_params(params, qaoa_parameter_count(layers), "QAOA");
  Circuit c{problem.num_nodes, {}, true};
  c.gates.reserve(static_cast<std::size_t>(problem.num_nodes * (1 + layers) +
                                           layers * static_cast<int>(problem.edges.size())));
  for (int q = 0; q < problem.num_nodes; ++q) c.gates.push_back(Gate::h(q));
  for (int k = 0; k < layers; ++k) {
    const double gamma = params[2 * k];
    const double beta = params[2 * k + 1];
    for (auto [a, b] : problem.edges) c.gates.push_back(Gate::rzz(a, b, 2.0 * gamma));
    for (int q = 0; q < problem.num_nodes; ++q) c.gates.push_back(Gate::rx(q, 2.0 * beta));
  }
  return c;
}

Circuit build_twolocal(int num_qubits, const ParameterVector& params, int reps) {
  if (num_qubits < 1) throw ValidationError("two-local needs at least one qubit");
  if (reps < 1) throw ValidationError("two-local needs at least one rep");
  check_params(params, twolocal_parameter_count(num_qubits, reps), "two-local");
  Circuit c{num_qubits, {}, false};
  int next = 0;
  for (int q = 0; q < num_qubits; ++q) c.gates.push_back(Gate::ry(q, params[next++]));
  for (int r = 0; r < reps; ++r) {
    for (int q = 0; q + 1 < num_qubits; ++q) c.gates.push_back(Gate::cx(q, q + 1));
    for (int q = 0; q < num_qubits; ++q) c.gates.push_back(Gate::ry(q, params[next++]));
  }
  return c;
}

double maxcut_expectation(const OutcomeDistribution& dist, const MaxCutProblem& problem) {
  if (dist.num_qubits() != problem.num_nodes) {
    throw ValidationError("distribution width " + std::to_string(dist.num_qubits()) + " does not match " +
                          std::to_string(problem.num_nodes) + " nodes");
  }
  const auto& p = dist.probabilities();
  double total = 0.0;
  for (Eigen::Index z = 0; z < p.size(); ++z) {
    if (p[z] != 0.0) total += p[z] * problem.cut_value(static_cast<std::uint64_t>(z));
  }
  return -total;
}

double pauli_expectation(const DensityMatrix& rho, const PauliHamiltonian& hamiltonian) {
  hamiltonian.validate();
  const int n = hamiltonian.num_qubits();
  if (rho.rows() != (Eigen::Index{1} << n) || rho.cols() != rho.rows()) {
    throw ValidationError("density matrix dimension does not match a " + std::to_string(n) + "-qubit Hamiltonian");
  }
  // P|c> = i^{#Y} (-1)^{|c & zmask|} |c ^ xmask>, so Tr(rho P) = sum_c phase(c) rho[c, c ^ xmask].
  static constexpr std::complex<double> kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  double energy = 0.0;
  for (const auto& term : hamiltonian.terms) {
    std::uint64_t xmask = 0;
    std::uint64_t zmask = 0;
    int ys = 0;
    for (int q = 0; q < n; ++q) {
      const char p = term.paulis[static_cast<std::size_t>(q)];
      if (p == 'X' || p == 'Y') xmask |= std::uint64_t{1} << q;
      if (p == 'Z' || p == 'Y') zmask |= std::uint64_t{1} << q;
      if (p == 'Y') ++ys;
    }
    std::complex<double> trace{0.0, 0.0};
    for (Eigen::Index c = 0; c < rho.rows(); ++c) {
      const auto uc = static_cast<std::uint64_t>(c);
      const double sign = (std::popcount(uc & zmask) & 1) ? -1.0 : 1.0;
      trace += sign * rho(c, static_cast<Eigen::Index>(uc ^ xmask));
    }
    energy += term.coefficient * (kIPow[ys % 4] * trace).real();
  }
  return energy;
}

double shannon_entropy(const OutcomeDistribution& dist) {
  double h = 0.0;
  for (double p : dist.probabilities()) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return std::max(h, 0.0);
}

double approximation_ratio(double e_optimized, double e_ground_truth) {
  if (e_ground_truth == 0.0) throw DegenerateInstanceError("ground-truth energy is zero");
  return e_optimized / e_ground_truth;
}

double brute_force_maxcut(const MaxCutProblem& problem) {
  problem.validate();
  if (problem.num_nodes > kMaxBruteForceNodes) {
    throw CapacityError("brute-force max-cut limited to " + std::to_string(kMaxBruteForceNodes) + " nodes");
  }
  int best = 0;
  const std::uint64_t count = std::uint64_t{1} << problem.num_nodes;
  for (std::uint64_t z = 0; z < count; ++z) best = std::max(best, problem.cut_value(z));
  return -static_cast<double>(best);
}

Eigen::MatrixXcd dense_matrix(const PauliHamiltonian& hamiltonian) {
  hamiltonian.validate();
  const int n = hamiltonian.num_qubits();
  if (n > kMaxEigenQubits) {
    throw CapacityError("dense Hamiltonian limited to " + std::to_string(kMaxEigenQubits) + " qubits");
  }
  const Eigen::Index dim = Eigen::Index{1} << n;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& term : hamiltonian.terms) {
    Eigen::MatrixXcd op = Eigen::MatrixXcd::Identity(1, 1);
    // Highest qubit is the leftmost Kronecker factor.
    for (int q = n - 1; q >= 0; --q) {
      const Eigen::Matrix2cd p = pauli_matrix(term.paulis[static_cast<std::size_t>(q)]);
      Eigen::MatrixXcd next(op.rows() * 2, op.cols() * 2);
      for (Eigen::Index i = 0; i < op.rows(); ++i) {
        for (Eigen::Index j = 0; j < op.cols(); ++j) next.block<2, 2>(2 * i, 2 * j) = op(i, j) * p;
      }
      op = std::move(next);
    }
    h += term.coefficient * op;
  }
  return h;
}

double brute_force_eigenmin(const PauliHamiltonian& hamiltonian) {
  const Eigen::MatrixXcd h = dense_matrix(hamiltonian);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigensolver failed to converge");
  return solver.eigenvalues().minCoeff();
}

EvaluationResult evaluate_qaoa(const MaxCutProblem& problem, int layers, const ParameterVector& params,
                               const NoiseModel& noise) {
  auto dist = simulate(build_qaoa(problem, params, layers), noise);
  const double e = maxcut_expectation(dist, problem);
  const double h = shannon_entropy(dist);
  return {e, h, std::move(dist)};
}

EvaluationResult evaluate_vqe(const PauliHamiltonian& hamiltonian, int reps, const ParameterVector& params,
                              const NoiseModel& noise) {
  const DensityMatrix rho = evolve(build_twolocal(hamiltonian.num_qubits(), params, reps), noise);
  const double e = pauli_expectation(rho, hamiltonian);
  auto dist = measure(rho, noise.readout);
  const double h = shannon_entropy(dist);
  return {e, h, std::move(dist)};
}

}  // namespace qoncord
