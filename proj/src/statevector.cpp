#include "qdepth/statevector.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace qdepth {

namespace {

bool is_power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

int log2_exact(std::size_t v) {
  int k = 0;
  while ((std::size_t{1} << k) < v) ++k;
  return k;
}

}  // namespace

StateVector::StateVector(int qubits) : qubits_(qubits) {
  if (qubits < 1 || qubits > kMaxQubits) {
    throw std::invalid_argument("StateVector: qubit count " + std::to_string(qubits) +
                                " outside [1, " + std::to_string(kMaxQubits) + "]");
  }
  amps_.assign(std::size_t{1} << qubits, Amplitude{0.0, 0.0});
  amps_[0] = 1.0;
}

StateVector::StateVector(int qubits, std::vector<Amplitude> amps)
    : qubits_(qubits), amps_(std::move(amps)) {}

StateVector StateVector::from_amplitudes(std::vector<Amplitude> amps) {
  if (!is_power_of_two(amps.size()) || amps.size() < 2) {
    throw std::invalid_argument("StateVector: amplitude count must be a power of two >= 2");
  }
  const int n = log2_exact(amps.size());
  if (n > kMaxQubits) throw std::invalid_argument("StateVector: too many qubits");
  return StateVector(n, std::move(amps));
}

double StateVector::norm_squared() const {
  double s = 0.0;
  for (const auto& a : amps_) s += std::norm(a);
  return s;
}

void StateVector::normalize() {
  const double nrm = std::sqrt(norm_squared());
  if (nrm == 0.0) throw std::domain_error("StateVector: cannot normalize the zero vector");
  for (auto& a : amps_) a /= nrm;
}

void StateVector::check_qubit(int q) const {
  if (q < 0 || q >= qubits_) {
    throw std::out_of_range("qubit index " + std::to_string(q) + " out of range for " +
                            std::to_string(qubits_) + " qubits");
  }
}

void StateVector::apply_ry(int q, double theta) {
  check_qubit(q);
  const double c = std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);
  const std::size_t stride = std::size_t{1} << q;
  const std::size_t dim = amps_.size();
  Amplitude* a = amps_.data();
  for (std::size_t base = 0; base < dim; base += 2 * stride) {
    for (std::size_t i = base; i < base + stride; ++i) {
      const Amplitude a0 = a[i];
      const Amplitude a1 = a[i + stride];
      a[i] = c * a0 - s * a1;
      a[i + stride] = s * a0 + c * a1;
    }
  }
}

void StateVector::apply_ry_generator(int q) {
  check_qubit(q);
  const std::size_t stride = std::size_t{1} << q;
  const std::size_t dim = amps_.size();
  Amplitude* a = amps_.data();
  for (std::size_t base = 0; base < dim; base += 2 * stride) {
    for (std::size_t i = base; i < base + stride; ++i) {
      const Amplitude a0 = a[i];
      a[i] = -0.5 * a[i + stride];
      a[i + stride] = 0.5 * a0;
    }
  }
}

void StateVector::apply_cz(int q1, int q2) {
  check_qubit(q1);
  check_qubit(q2);
  if (q1 == q2) throw std::invalid_argument("apply_cz: control and target coincide");
  const std::size_t mask = (std::size_t{1} << q1) | (std::size_t{1} << q2);
  const std::size_t dim = amps_.size();
  for (std::size_t i = mask; i < dim; ++i) {
    if ((i & mask) == mask) amps_[i] = -amps_[i];
  }
}

StateVector init_zero(int qubits) { return StateVector(qubits); }

Amplitude inner_product(const StateVector& a, const StateVector& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("inner_product: dimension mismatch");
  Amplitude s{0.0, 0.0};
  const auto x = a.amplitudes();
  const auto y = b.amplitudes();
  for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
  return s;
}

Amplitude ry_generator_overlap(const StateVector& bra, const StateVector& ket, int q) {
  if (bra.dim() != ket.dim()) throw std::invalid_argument("ry_generator_overlap: dimension mismatch");
  if (q < 0 || q >= ket.qubits()) throw std::out_of_range("ry_generator_overlap: qubit out of range");
  const std::size_t stride = std::size_t{1} << q;
  const std::size_t dim = ket.dim();
  const auto x = bra.amplitudes();
  const auto y = ket.amplitudes();
  Amplitude s{0.0, 0.0};
  for (std::size_t base = 0; base < dim; base += 2 * stride) {
    for (std::size_t i = base; i < base + stride; ++i) {
      s += std::conj(x[i + stride]) * y[i] - std::conj(x[i]) * y[i + stride];
    }
  }
  return 0.5 * s;
}

namespace {

std::vector<double> singular_weights(const Amplitude* data, std::size_t rows, std::size_t cols) {
  Eigen::Map<const Eigen::MatrixXcd> m(data, static_cast<Eigen::Index>(rows),
                                       static_cast<Eigen::Index>(cols));
  Eigen::VectorXd sv;
  if (std::min(rows, cols) <= 16) {
    sv = Eigen::JacobiSVD<Eigen::MatrixXcd>(m).singularValues();
  } else {
    sv = Eigen::BDCSVD<Eigen::MatrixXcd>(m).singularValues();
  }
  std::vector<double> w(static_cast<std::size_t>(sv.size()));
  double total = 0.0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    w[static_cast<std::size_t>(i)] = sv[i] * sv[i];
    total += w[static_cast<std::size_t>(i)];
  }
  for (auto& x : w) x /= total;
  std::sort(w.begin(), w.end(), std::greater<>());
  return w;
}

}  // namespace

BipartitionSpectrum schmidt_spectrum(const StateVector& state, int block_size) {
  const int n = state.qubits();
  if (block_size < 1 || block_size >= n) {
    throw std::out_of_range("schmidt_spectrum: block size " + std::to_string(block_size) +
                            " not in [1, " + std::to_string(n - 1) + "]");
  }
  BipartitionSpectrum out;
  out.cut.resize(static_cast<std::size_t>(block_size));
  std::iota(out.cut.begin(), out.cut.end(), 0);
  const std::size_t rows = std::size_t{1} << block_size;
  out.weights = singular_weights(state.amplitudes().data(), rows, state.dim() / rows);
  return out;
}

BipartitionSpectrum schmidt_spectrum(const StateVector& state, std::span<const int> block) {
  const int n = state.qubits();
  const int k = static_cast<int>(block.size());
  if (k < 1 || k >= n) throw std::out_of_range("schmidt_spectrum: block must be a proper subset");
  std::vector<bool> in_block(static_cast<std::size_t>(n), false);
  for (int q : block) {
    if (q < 0 || q >= n) throw std::out_of_range("schmidt_spectrum: qubit out of range");
    if (in_block[static_cast<std::size_t>(q)]) {
      throw std::invalid_argument("schmidt_spectrum: repeated qubit in block");
    }
    in_block[static_cast<std::size_t>(q)] = true;
  }

  // order[j] = original qubit that lands on bit j after the permutation
  std::vector<int> order(block.begin(), block.end());
  for (int q = 0; q < n; ++q) {
    if (!in_block[static_cast<std::size_t>(q)]) order.push_back(q);
  }

  std::vector<Amplitude> permuted(state.dim());
  const auto src = state.amplitudes();
  for (std::size_t i = 0; i < state.dim(); ++i) {
    std::size_t j = 0;
    for (int b = 0; b < n; ++b) j |= ((i >> order[static_cast<std::size_t>(b)]) & 1u) << b;
    permuted[j] = src[i];
  }

  BipartitionSpectrum out;
  out.cut.assign(block.begin(), block.end());
  const std::size_t rows = std::size_t{1} << k;
  out.weights = singular_weights(permuted.data(), rows, state.dim() / rows);
  return out;
}

double von_neumann_entropy(std::span<const double> weights) {
  double s = 0.0;
  for (double w : weights) {
    if (w > kEntropyCutoff) s -= w * std::log(w);
  }
  return std::max(s, 0.0);
}

double von_neumann_entropy(const BipartitionSpectrum& spectrum) {
  return von_neumann_entropy(spectrum.weights);
}

double half_chain_entropy(const StateVector& state) {
  return von_neumann_entropy(schmidt_spectrum(state, state.qubits() / 2));
}

}  // namespace qdepth
