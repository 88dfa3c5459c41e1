#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace qdepth {

using Amplitude = std::complex<double>;

/**
 * Dense state of n qubits.
 *
 * Qubit q is bit q of the basis index (qubit 0 is the least significant bit),
 * so amplitude i belongs to the product state with qubit q in |(i >> q) & 1>.
 * Every module shares this convention.
 */
class StateVector {
 public:
  static constexpr int kMaxQubits = 24;

  /// |0...0> on n qubits; throws std::invalid_argument outside [1, kMaxQubits].
  explicit StateVector(int qubits);

  /// Takes ownership of an amplitude array whose size must be a power of two.
  static StateVector from_amplitudes(std::vector<Amplitude> amps);

  int qubits() const { return qubits_; }
  std::size_t dim() const { return amps_.size(); }

  std::span<Amplitude> amplitudes() { return amps_; }
  std::span<const Amplitude> amplitudes() const { return amps_; }

  Amplitude& operator[](std::size_t i) { return amps_[i]; }
  const Amplitude& operator[](std::size_t i) const { return amps_[i]; }

  double norm_squared() const;
  void normalize();

  /// Ry(theta) = exp(-i theta Y / 2) on qubit q.
  void apply_ry(int q, double theta);

  /// Negates every amplitude whose bits q1 and q2 are both set.
  void apply_cz(int q1, int q2);

  /// Applies the Ry generator -iY/2 = [[0, -1/2], [1/2, 0]] to qubit q.
  void apply_ry_generator(int q);

 private:
  StateVector(int qubits, std::vector<Amplitude> amps);
  void check_qubit(int q) const;

  int qubits_;
  std::vector<Amplitude> amps_;
};

StateVector init_zero(int qubits);

/// <a|b>
Amplitude inner_product(const StateVector& a, const StateVector& b);

/// <bra| (-iY/2)_q |ket> without materializing the generator action.
Amplitude ry_generator_overlap(const StateVector& bra, const StateVector& ket, int q);

/// Squared Schmidt coefficients for the cut between `cut` and its complement.
struct BipartitionSpectrum {
  std::vector<int> cut;
  std::vector<double> weights;  // descending, sums to 1
};

/// Block A = qubits 0 .. block_size-1.
BipartitionSpectrum schmidt_spectrum(const StateVector& state, int block_size);

/// Block A = arbitrary set of qubits (distinct, in range, proper subset).
/// The qubits are permuted to the low bits before reshaping.
BipartitionSpectrum schmidt_spectrum(const StateVector& state, std::span<const int> block);

inline constexpr double kEntropyCutoff = 1e-14;

/// -sum w ln w in nats, skipping weights at or below kEntropyCutoff.
double von_neumann_entropy(std::span<const double> weights);
double von_neumann_entropy(const BipartitionSpectrum& spectrum);

/// Entropy of the half-chain block 0 .. n/2-1, in nats.
double half_chain_entropy(const StateVector& state);

}  // namespace qdepth
