// SPDX-License-Identifier: Apache-2.0
#pragma once

// Reference implementations used only by tests. They build full 2^n operators
// from Kronecker products and share no code with the kernels under test.

#include "qoncord/qsim.hpp"
#include "qoncord/vqa.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <random>
#include <vector>

namespace oracle {

using qoncord::Circuit;
using qoncord::Complex;
using qoncord::Gate;
using qoncord::GateKind;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline Mat identity(int n) { return Mat::Identity(1 << n, 1 << n); }

inline Mat single(char p) {
  Mat m(2, 2);
  const Complex i(0, 1);
  switch (p) {
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, -i, i, 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: m << 1, 0, 0, 1; break;
  }
  return m;
}

// Embeds a 2x2 operator on `qubit` of an n-qubit register; qubit n-1 is the
// leftmost Kronecker factor.
inline Mat embed(const Mat& u, int qubit, int n) {
  Mat out = Mat::Identity(1, 1);
  for (int q = n - 1; q >= 0; --q) {
    const Mat factor = q == qubit ? u : Mat(Mat::Identity(2, 2));
    out = Eigen::kroneckerProduct(out, factor).eval();
  }
  return out;
}

inline Mat pauli_string(const std::string& s) {
  const int n = static_cast<int>(s.size());
  Mat out = Mat::Identity(1, 1);
  for (int q = n - 1; q >= 0; --q) out = Eigen::kroneckerProduct(out, single(s[static_cast<std::size_t>(q)])).eval();
  return out;
}

// Textbook matrices, written out independently of the simulator.
inline Mat gate_1q(const Gate& g) {
  const double t = g.angle / 2;
  const Complex i(0, 1);
  Mat m(2, 2);
  switch (g.kind) {
    case GateKind::H: m << 1, 1, 1, -1; m /= std::sqrt(2.0); break;
    case GateKind::RX: m << std::cos(t), -i * std::sin(t), -i * std::sin(t), std::cos(t); break;
    case GateKind::RY: m << std::cos(t), -std::sin(t), std::sin(t), std::cos(t); break;
    case GateKind::RZ: m << std::exp(-i * t), 0, 0, std::exp(i * t); break;
    default: throw std::logic_error("not a 1-qubit gate");
  }
  return m;
}

inline Mat full_unitary(const Gate& g, int n) {
  const int dim = 1 << n;
  if (!qoncord::is_two_qubit(g.kind)) return embed(gate_1q(g), g.qubits[0], n);
  // CX = |0><0|_c (x) I + |1><1|_c (x) X_t ; RZZ = exp(-i theta/2 Z_a Z_b).
  if (g.kind == GateKind::CX) {
    Mat p0(2, 2), p1(2, 2);
    p0 << 1, 0, 0, 0;
    p1 << 0, 0, 0, 1;
    const int c = g.qubits[0];
    const int t = g.qubits[1];
    return embed(p0, c, n) + embed(p1, c, n) * embed(single('X'), t, n);
  }
  const Mat zz = embed(single('Z'), g.qubits[0], n) * embed(single('Z'), g.qubits[1], n);
  // zz is diagonal with entries +-1, so the exponential is diagonal too.
  Mat u = Mat::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) u(k, k) = std::exp(Complex(0, -g.angle / 2) * zz(k, k));
  return u;
}

inline Vec statevector(const Circuit& c) {
  Vec psi = Vec::Zero(1 << c.num_qubits);
  psi[0] = 1;
  for (const auto& g : c.gates) psi = full_unitary(g, c.num_qubits) * psi;
  return psi;
}

inline Eigen::VectorXd probabilities(const Circuit& c) { return statevector(c).cwiseAbs2(); }

// Depolarizing on `qubits` as the Pauli twirl (1-p) rho + p/4^k sum_P P rho P.
inline Mat depolarize(const Mat& rho, const std::vector<int>& qubits, double p, int n) {
  const char labels[] = {'I', 'X', 'Y', 'Z'};
  Mat twirl = Mat::Zero(rho.rows(), rho.cols());
  const int k = static_cast<int>(qubits.size());
  const int count = 1 << (2 * k);
  for (int code = 0; code < count; ++code) {
    Mat P = identity(n);
    for (int j = 0; j < k; ++j) P = P * embed(single(labels[(code >> (2 * j)) & 3]), qubits[static_cast<std::size_t>(j)], n);
    twirl += P * rho * P.adjoint();
  }
  return (1 - p) * rho + (p / count) * twirl;
}

inline Mat random_density(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  const int dim = 1 << n;
  Mat a(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) a(r, c) = Complex(g(rng), g(rng));
  Mat rho = a * a.adjoint();
  return rho / rho.trace();
}

inline Circuit random_circuit(int n, int gates, std::mt19937_64& rng) {
  Circuit c;
  c.num_qubits = n;
  c.measure_all = true;
  std::uniform_int_distribution<int> kind(0, n > 1 ? 5 : 3);
  std::uniform_int_distribution<int> qubit(0, n - 1);
  std::uniform_real_distribution<double> angle(-3.2, 3.2);
  for (int i = 0; i < gates; ++i) {
    const int k = kind(rng);
    const int a = qubit(rng);
    int b = qubit(rng);
    while (n > 1 && b == a) b = qubit(rng);
    switch (k) {
      case 0: c.gates.push_back(Gate::h(a)); break;
      case 1: c.gates.push_back(Gate::rx(a, angle(rng))); break;
      case 2: c.gates.push_back(Gate::ry(a, angle(rng))); break;
      case 3: c.gates.push_back(Gate::rz(a, angle(rng))); break;
      case 4: c.gates.push_back(Gate::cx(a, b)); break;
      default: c.gates.push_back(Gate::rzz(a, b, angle(rng))); break;
    }
  }
  return c;
}

// -max cut over all assignments, enumerated edge by edge.
inline double maxcut_by_enumeration(const qoncord::MaxCutProblem& p) {
  int best = 0;
  for (unsigned z = 0; z < (1u << p.num_nodes); ++z) {
    int cut = 0;
    for (const auto& [u, v] : p.edges) cut += ((z >> u) & 1u) != ((z >> v) & 1u);
    best = std::max(best, cut);
  }
  return -best;
}

}  // namespace oracle
