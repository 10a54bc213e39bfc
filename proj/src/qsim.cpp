// SPDX-License-Identifier: Apache-2.0
#include "qoncord/qsim.hpp"

#include "qoncord/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

namespace qoncord {

namespace {

using Index = Eigen::Index;

std::size_t dim_of(const DensityMatrix& rho) { return static_cast<std::size_t>(rho.rows()); }

// Visits every 2^k x 2^k block of rho spanned by `offsets` above a pair of
// representatives (r0, c0) with the acted bits cleared. Only blocks with
// r0 <= c0 are transformed; the lower triangle is written as their adjoint,
// which is exact for Hermitian-preserving maps.
template <int N, typename Transform>
void for_each_block(DensityMatrix& rho, const std::array<std::size_t, N>& offsets, Transform&& transform) {
  using Block = Eigen::Matrix<Complex, N, N>;
  const std::size_t dim = dim_of(rho);
  std::size_t mask = 0;
  for (std::size_t o : offsets) mask |= o;
  Complex* data = rho.data();
  Block blk;
  for (std::size_t c0 = 0; c0 < dim; ++c0) {
    if (c0 & mask) continue;
    for (std::size_t r0 = 0; r0 <= c0; ++r0) {
      if (r0 & mask) continue;
      for (int j = 0; j < N; ++j) {
        const Complex* col = data + (c0 | offsets[j]) * dim;
        for (int i = 0; i < N; ++i) blk(i, j) = col[r0 | offsets[i]];
      }
      transform(blk);
      for (int j = 0; j < N; ++j) {
        Complex* col = data + (c0 | offsets[j]) * dim;
        for (int i = 0; i < N; ++i) col[r0 | offsets[i]] = blk(i, j);
      }
      if (r0 == c0) continue;
      for (int j = 0; j < N; ++j) {
        Complex* col = data + (r0 | offsets[j]) * dim;
        for (int i = 0; i < N; ++i) col[c0 | offsets[i]] = std::conj(blk(j, i));
      }
    }
  }
}

// B <- (1-p) B + p tr(B) I / N on one block.
template <typename Block>
void depolarize_block(Block& blk, double p) {
  if (p == 0.0) return;
  const Complex share = blk.trace() * (p / static_cast<double>(blk.rows()));
  blk *= (1.0 - p);
  blk.diagonal().array() += share;
}

void check_probability(double p, double hi, const char* name) {
  if (!(p >= 0.0 && p <= hi)) {
    throw ValidationError(std::string(name) + " must lie in [0, " + std::to_string(hi) + "], got " +
                          std::to_string(p));
  }
}

}  // namespace

bool is_two_qubit(GateKind kind) { return kind == GateKind::CX || kind == GateKind::RZZ; }

bool is_parametric(GateKind kind) { return kind != GateKind::H && kind != GateKind::CX; }

std::string to_string(GateKind kind) {
  switch (kind) {
    case GateKind::H: return "H";
    case GateKind::RX: return "RX";
    case GateKind::RY: return "RY";
    case GateKind::RZ: return "RZ";
    case GateKind::CX: return "CX";
    case GateKind::RZZ: return "RZZ";
  }
  return "?";
}

void Circuit::validate() const {
  if (num_qubits < 1) throw ValidationError("circuit needs at least one qubit");
  if (num_qubits > kMaxSimQubits) {
    throw CapacityError("circuit width " + std::to_string(num_qubits) + " exceeds simulator capacity of " +
                        std::to_string(kMaxSimQubits) + " qubits");
  }
  for (std::size_t i = 0; i < gates.size(); ++i) {
    const Gate& g = gates[i];
    const std::size_t arity = is_two_qubit(g.kind) ? 2 : 1;
    if (g.qubits.size() != arity) {
      throw ValidationError("gate " + std::to_string(i) + " (" + to_string(g.kind) + ") expects " +
                            std::to_string(arity) + " qubit(s)");
    }
    for (int q : g.qubits) {
      if (q < 0 || q >= num_qubits) {
        throw ValidationError("gate " + std::to_string(i) + " targets qubit " + std::to_string(q) +
                              " outside a " + std::to_string(num_qubits) + "-qubit register");
      }
    }
    if (arity == 2 && g.qubits[0] == g.qubits[1]) {
      throw ValidationError("gate " + std::to_string(i) + " repeats qubit " + std::to_string(g.qubits[0]));
    }
    if (!std::isfinite(g.angle)) throw ValidationError("gate " + std::to_string(i) + " has a non-finite angle");
  }
}

CircuitStats circuit_stats(const Circuit& circuit) {
  CircuitStats stats;
  std::vector<int> level(static_cast<std::size_t>(circuit.num_qubits), 0);
  for (const Gate& g : circuit.gates) {
    int layer = 0;
    for (int q : g.qubits) layer = std::max(layer, level[static_cast<std::size_t>(q)]);
    ++layer;
    for (int q : g.qubits) level[static_cast<std::size_t>(q)] = layer;
    stats.depth = std::max(stats.depth, layer);
    if (is_two_qubit(g.kind)) {
      ++stats.two_qubit_gates;
    } else {
      ++stats.one_qubit_gates;
    }
  }
  stats.measurements = circuit.measure_all ? circuit.num_qubits : 0;
  return stats;
}

void NoiseModel::validate() const {
  check_probability(p1, 1.0, "p1");
  check_probability(p2, 1.0, "p2");
  check_probability(readout, 0.5, "readout");
  if (!(t_g1 >= 0.0) || !(t_g2 >= 0.0)) throw ValidationError("gate durations must be non-negative");
  if (!(t1 > 0.0) || !(t2 > 0.0)) throw ValidationError("T1 and T2 must be positive");
}

OutcomeDistribution::OutcomeDistribution(int num_qubits, Eigen::VectorXd probs)
    : num_qubits_(num_qubits), probs_(std::move(probs)) {
  if (probs_.size() != (Index{1} << num_qubits)) {
    throw ValidationError("distribution needs 2^n entries");
  }
  if ((probs_.array() < -1e-12).any()) throw ValidationError("negative probability");
  probs_ = probs_.cwiseMax(0.0);
  const double total = probs_.sum();
  if (!(total > 0.0)) throw ValidationError("distribution has zero mass");
  probs_ /= total;
}

OutcomeDistribution OutcomeDistribution::from_map(int num_qubits, const std::map<std::string, double>& probs) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(Index{1} << num_qubits);
  for (const auto& [bits, p] : probs) {
    if (static_cast<int>(bits.size()) != num_qubits) {
      throw ValidationError("bitstring '" + bits + "' does not have width " + std::to_string(num_qubits));
    }
    v[static_cast<Index>(from_bitstring(bits))] += p;
  }
  return {num_qubits, std::move(v)};
}

double OutcomeDistribution::probability(const std::string& bitstring) const {
  if (static_cast<int>(bitstring.size()) != num_qubits_) {
    throw ValidationError("bitstring width mismatch");
  }
  return probs_[static_cast<Index>(from_bitstring(bitstring))];
}

std::map<std::string, double> OutcomeDistribution::to_map(double cutoff) const {
  std::map<std::string, double> out;
  for (Index i = 0; i < probs_.size(); ++i) {
    if (probs_[i] > cutoff) out.emplace(to_bitstring(static_cast<std::uint64_t>(i), num_qubits_), probs_[i]);
  }
  return out;
}

std::string to_bitstring(std::uint64_t index, int num_qubits) {
  std::string s(static_cast<std::size_t>(num_qubits), '0');
  for (int q = 0; q < num_qubits; ++q) {
    if ((index >> q) & 1U) s[static_cast<std::size_t>(q)] = '1';
  }
  return s;
}

std::uint64_t from_bitstring(const std::string& bits) {
  std::uint64_t index = 0;
  for (std::size_t q = 0; q < bits.size(); ++q) {
    if (bits[q] == '1') {
      index |= std::uint64_t{1} << q;
    } else if (bits[q] != '0') {
      throw ValidationError("bitstring '" + bits + "' contains a character other than 0/1");
    }
  }
  return index;
}

DensityMatrix ground_state(int num_qubits) {
  const Index dim = Index{1} << num_qubits;
  DensityMatrix rho = DensityMatrix::Zero(dim, dim);
  rho(0, 0) = 1.0;
  return rho;
}

void apply_unitary_1q(DensityMatrix& rho, int qubit, const Matrix2c& u) {
  const std::size_t dim = dim_of(rho);
  const std::size_t m = std::size_t{1} << qubit;
  const Complex u00 = u(0, 0), u01 = u(0, 1), u10 = u(1, 0), u11 = u(1, 1);
  const Complex v00 = std::conj(u00), v01 = std::conj(u01), v10 = std::conj(u10), v11 = std::conj(u11);
  Complex* data = rho.data();
  // rho <- U rho, acting down each column
  for (std::size_t c = 0; c < dim; ++c) {
    Complex* col = data + c * dim;
    for (std::size_t base = 0; base < dim; base += 2 * m) {
      for (std::size_t r0 = base; r0 < base + m; ++r0) {
        const Complex x = col[r0];
        const Complex y = col[r0 + m];
        col[r0] = u00 * x + u01 * y;
        col[r0 + m] = u10 * x + u11 * y;
      }
    }
  }
  // rho <- rho U^dagger, mixing column pairs
  for (std::size_t base = 0; base < dim; base += 2 * m) {
    for (std::size_t c0 = base; c0 < base + m; ++c0) {
      Complex* col0 = data + c0 * dim;
      Complex* col1 = data + (c0 + m) * dim;
      for (std::size_t r = 0; r < dim; ++r) {
        const Complex x = col0[r];
        const Complex y = col1[r];
        col0[r] = x * v00 + y * v01;
        col1[r] = x * v10 + y * v11;
      }
    }
  }
}

void apply_cx(DensityMatrix& rho, int control, int target) {
  const std::size_t dim = dim_of(rho);
  const std::size_t cm = std::size_t{1} << control;
  const std::size_t tm = std::size_t{1} << target;
  for (std::size_t i = 0; i < dim; ++i) {
    if ((i & cm) && !(i & tm)) {
      rho.row(static_cast<Index>(i)).swap(rho.row(static_cast<Index>(i | tm)));
    }
  }
  for (std::size_t i = 0; i < dim; ++i) {
    if ((i & cm) && !(i & tm)) {
      rho.col(static_cast<Index>(i)).swap(rho.col(static_cast<Index>(i | tm)));
    }
  }
}

void apply_diagonal(DensityMatrix& rho, const Eigen::VectorXcd& phases) {
  const Index dim = rho.rows();
  for (Index c = 0; c < dim; ++c) {
    const Complex pc = std::conj(phases[c]);
    Complex* col = rho.col(c).data();
    for (Index r = 0; r < dim; ++r) col[r] *= phases[r] * pc;
  }
}

void apply_depolarizing(DensityMatrix& rho, std::span<const int> qubits, double p) {
  if (p == 0.0) return;
  const std::size_t dim = dim_of(rho);
  const double keep = 1.0 - p;
  Complex* data = rho.data();
  // rho <- (1-p) rho + p Tr_S(rho) (x) I / 2^|S|. Entries whose row and column
  // agree on the acted bits receive the traced share; all others just shrink.
  if (qubits.size() == 1) {
    const std::size_t m = std::size_t{1} << qubits[0];
    const double share = p / 2.0;
    for (std::size_t c0 = 0; c0 < dim; ++c0) {
      if (c0 & m) continue;
      Complex* col0 = data + c0 * dim;
      Complex* col1 = data + (c0 | m) * dim;
      for (std::size_t r0 = 0; r0 < dim; ++r0) {
        if (r0 & m) continue;
        const Complex d0 = col0[r0];
        const Complex d1 = col1[r0 | m];
        const Complex add = share * (d0 + d1);
        col0[r0] = keep * d0 + add;
        col1[r0 | m] = keep * d1 + add;
        col0[r0 | m] *= keep;
        col1[r0] *= keep;
      }
    }
    return;
  }
  if (qubits.size() != 2) throw ValidationError("depolarizing acts on one or two qubits");
  const std::size_t ma = std::size_t{1} << qubits[0];
  const std::size_t mb = std::size_t{1} << qubits[1];
  for_each_block<4>(rho, {0, ma, mb, ma | mb}, [p](Eigen::Matrix4cd& blk) { depolarize_block(blk, p); });
}

Matrix2c gate_matrix_1q(const Gate& gate) {
  const double half = gate.angle / 2.0;
  const double c = std::cos(half);
  const double s = std::sin(half);
  const Complex i{0.0, 1.0};
  Matrix2c u;
  switch (gate.kind) {
    case GateKind::H: {
      const double r = 1.0 / std::sqrt(2.0);
      u << r, r, r, -r;
      break;
    }
    case GateKind::RX: u << c, -i * s, -i * s, c; break;
    case GateKind::RY: u << c, -s, s, c; break;
    case GateKind::RZ: u << std::exp(-i * half), 0.0, 0.0, std::exp(i * half); break;
    default: throw ValidationError(to_string(gate.kind) + " is not a 1-qubit gate");
  }
  return u;
}

void apply_gate(DensityMatrix& rho, const Gate& gate) {
  const Index dim = rho.rows();
  switch (gate.kind) {
    case GateKind::H:
    case GateKind::RX:
    case GateKind::RY:
      apply_unitary_1q(rho, gate.qubits[0], gate_matrix_1q(gate));
      break;
    case GateKind::RZ: {
      const std::size_t m = std::size_t{1} << gate.qubits[0];
      const Complex lo = std::polar(1.0, -gate.angle / 2.0);
      const Complex hi = std::polar(1.0, gate.angle / 2.0);
      Eigen::VectorXcd phases(dim);
      for (Index r = 0; r < dim; ++r) phases[r] = (static_cast<std::size_t>(r) & m) ? hi : lo;
      apply_diagonal(rho, phases);
      break;
    }
    case GateKind::RZZ: {
      const std::size_t a = std::size_t{1} << gate.qubits[0];
      const std::size_t b = std::size_t{1} << gate.qubits[1];
      const Complex same = std::polar(1.0, -gate.angle / 2.0);
      const Complex diff = std::polar(1.0, gate.angle / 2.0);
      Eigen::VectorXcd phases(dim);
      for (Index r = 0; r < dim; ++r) {
        const auto ur = static_cast<std::size_t>(r);
        phases[r] = (((ur & a) != 0) == ((ur & b) != 0)) ? same : diff;
      }
      apply_diagonal(rho, phases);
      break;
    }
    case GateKind::CX:
      apply_cx(rho, gate.qubits[0], gate.qubits[1]);
      break;
  }
}

void apply_noisy_gate(DensityMatrix& rho, const Gate& gate, double p) {
  if (!is_two_qubit(gate.kind)) {
    const Matrix2c u = gate_matrix_1q(gate);
    const Complex u00 = u(0, 0), u01 = u(0, 1), u10 = u(1, 0), u11 = u(1, 1);
    const Complex v00 = std::conj(u00), v01 = std::conj(u01), v10 = std::conj(u10), v11 = std::conj(u11);
    const double keep = 1.0 - p;
    const double share = p / 2.0;
    const std::size_t dim = dim_of(rho);
    const std::size_t m = std::size_t{1} << gate.qubits[0];
    Complex* data = rho.data();
    for (std::size_t c0 = 0; c0 < dim; ++c0) {
      if (c0 & m) continue;
      Complex* col0 = data + c0 * dim;
      Complex* col1 = col0 + m * dim;
      for (std::size_t r0 = 0; r0 <= c0; ++r0) {
        if (r0 & m) continue;
        const std::size_t r1 = r0 | m;
        // T = U B
        const Complex t00 = u00 * col0[r0] + u01 * col0[r1];
        const Complex t10 = u10 * col0[r0] + u11 * col0[r1];
        const Complex t01 = u00 * col1[r0] + u01 * col1[r1];
        const Complex t11 = u10 * col1[r0] + u11 * col1[r1];
        // B' = T U^dagger
        Complex b00 = t00 * v00 + t01 * v01;
        const Complex b01 = keep * (t00 * v10 + t01 * v11);
        const Complex b10 = keep * (t10 * v00 + t11 * v01);
        Complex b11 = t10 * v10 + t11 * v11;
        const Complex add = share * (b00 + b11);
        b00 = keep * b00 + add;
        b11 = keep * b11 + add;
        col0[r0] = b00;
        col0[r1] = b10;
        col1[r0] = b01;
        col1[r1] = b11;
        if (r0 == c0) continue;
        Complex* mcol0 = data + r0 * dim;
        Complex* mcol1 = data + r1 * dim;
        mcol0[c0] = std::conj(b00);
        mcol0[c0 | m] = std::conj(b01);
        mcol1[c0] = std::conj(b10);
        mcol1[c0 | m] = std::conj(b11);
      }
    }
    return;
  }
  if (gate.kind == GateKind::CX || p >= 1.0) {
    apply_gate(rho, gate);
    apply_depolarizing(rho, gate.qubits, p);
    return;
  }
  // RZZ: d(r) conj(d(c)) depends only on the parities of the acted bits, and
  // is 1 on entries where row and column agree on those bits, which are the
  // only ones receiving the traced share.
  const std::size_t dim = dim_of(rho);
  const std::size_t ma = std::size_t{1} << gate.qubits[0];
  const std::size_t mb = std::size_t{1} << gate.qubits[1];
  const double keep = 1.0 - p;
  const Complex factor[2][2] = {{keep, keep * std::polar(1.0, -gate.angle)},
                                {keep * std::polar(1.0, gate.angle), keep}};
  auto parity = [ma, mb](std::size_t i) { return static_cast<int>(((i & ma) != 0) != ((i & mb) != 0)); };
  Complex* data = rho.data();
  for (std::size_t c = 0; c < dim; ++c) {
    const int pc = parity(c);
    const Complex f0 = factor[0][pc];
    const Complex f1 = factor[1][pc];
    Complex* col = data + c * dim;
    for (std::size_t r = 0; r < dim; ++r) col[r] *= parity(r) ? f1 : f0;
  }
  if (p == 0.0) return;
  const std::size_t mask = ma | mb;
  const std::size_t subs[4] = {0, ma, mb, ma | mb};
  const double share = p / (4.0 * keep);  // entries below are already scaled by keep
  for (std::size_t c0 = 0; c0 < dim; ++c0) {
    if (c0 & mask) continue;
    for (std::size_t r0 = 0; r0 < dim; ++r0) {
      if (r0 & mask) continue;
      Complex t{0.0, 0.0};
      for (std::size_t sm : subs) t += data[(c0 | sm) * dim + (r0 | sm)];
      t *= share;
      for (std::size_t sm : subs) data[(c0 | sm) * dim + (r0 | sm)] += t;
    }
  }
}

DensityMatrix evolve(const Circuit& circuit, const NoiseModel& noise) {
  circuit.validate();
  noise.validate();
  DensityMatrix rho = ground_state(circuit.num_qubits);
  for (const Gate& g : circuit.gates) {
    apply_noisy_gate(rho, g, is_two_qubit(g.kind) ? noise.p2 : noise.p1);
  }
  return rho;
}

OutcomeDistribution measure(const DensityMatrix& rho, double readout) {
  check_probability(readout, 0.5, "readout");
  const Index dim = rho.rows();
  int n = 0;
  while ((Index{1} << n) < dim) ++n;
  Eigen::VectorXd probs = rho.diagonal().real().cwiseMax(0.0);
  if (readout > 0.0) {
    for (int q = 0; q < n; ++q) {
      const Index m = Index{1} << q;
      for (Index i = 0; i < dim; ++i) {
        if (i & m) continue;
        const double a = probs[i];
        const double b = probs[i | m];
        probs[i] = (1.0 - readout) * a + readout * b;
        probs[i | m] = readout * a + (1.0 - readout) * b;
      }
    }
  }
  return {n, std::move(probs)};
}

OutcomeDistribution simulate(const Circuit& circuit, const NoiseModel& noise) {
  return measure(evolve(circuit, noise), noise.readout);
}

std::map<std::string, std::uint64_t> sample(const OutcomeDistribution& dist, std::uint64_t shots,
                                            std::uint64_t rng_seed) {
  if (shots == 0) throw ValidationError("shots must be positive");
  std::mt19937_64 rng(rng_seed);
  std::map<std::string, std::uint64_t> counts;
  std::uint64_t remaining = shots;
  double mass_left = 1.0;
  const auto& p = dist.probabilities();
  for (Index i = 0; i < p.size() && remaining > 0; ++i) {
    if (p[i] <= 0.0) continue;
    std::uint64_t k = remaining;
    // Conditional binomial: the last non-empty outcome takes the remainder.
    if (p[i] < mass_left * (1.0 - 1e-15)) {
      const double q = std::clamp(p[i] / mass_left, 0.0, 1.0);
      std::binomial_distribution<std::uint64_t> draw(remaining, q);
      k = draw(rng);
    }
    mass_left -= p[i];
    if (k > 0) {
      counts[to_bitstring(static_cast<std::uint64_t>(i), dist.num_qubits())] = k;
      remaining -= k;
    }
  }
  if (remaining > 0) {
    // Round-off left mass unassigned; give it to the most likely outcome.
    Index best = 0;
    p.maxCoeff(&best);
    counts[to_bitstring(static_cast<std::uint64_t>(best), dist.num_qubits())] += remaining;
  }
  return counts;
}

}  // namespace qoncord
