#pragma once

#include "qdepth/statevector.hpp"

#include <json.hpp>

#include <cstddef>
#include <vector>

namespace qdepth {

/**
 * Layered brick ansatz on a line of qubits.
 *
 * One layer is: Ry on every qubit, CZ on pairs (0,1),(2,3),...; then Ry on every
 * qubit, CZ on pairs (1,2),(3,4),... plus (n-1,0) when wrap_cz is set. A final
 * Ry sweep follows the last layer, giving 2*n*layers + n angles.
 */
struct CircuitSpec {
  int qubits = 0;
  int layers = 0;
  bool wrap_cz = false;

  bool operator==(const CircuitSpec&) const = default;
};

/// Angles in radians, ordered layer-major, then half-layer, then qubit; the
/// final rotation sweep occupies the last n entries.
using ParamVector = std::vector<double>;

/// Throws std::invalid_argument unless qubits is even and >= 4 and layers >= 0.
void validate(const CircuitSpec& spec);

std::size_t param_count(const CircuitSpec& spec);

struct Gate {
  enum class Kind { Ry, Cz };
  Kind kind;
  int q0;
  int q1;            // CZ partner; unused for Ry
  std::size_t param; // angle index; unused for CZ
};

/// Gates in application order.
std::vector<Gate> gate_sequence(const CircuitSpec& spec);

/// Contiguous angle range [offset, offset + size).
struct ParamBlock {
  std::size_t offset;
  std::size_t size;
};

/// Blocks 0..layers-1 are the 2n angles of each layer; block `layers` is the final sweep.
std::vector<ParamBlock> layer_blocks(const CircuitSpec& spec);

StateVector prepare_state(const CircuitSpec& spec, const ParamVector& theta);

/// Number of CZ gates with one endpoint in qubits 0..block_size-1 and one outside.
int cut_crossing_count(const CircuitSpec& spec, int block_size);

/**
 * Angles for a circuit `extra` layers deeper that prepares the same state.
 * Zero-angle layers are prepended: on |0...0> their rotations are identities and
 * every CZ acts trivially.
 */
ParamVector prepend_identity_layers(const CircuitSpec& spec, const ParamVector& theta, int extra);

nlohmann::json circuit_to_json(const CircuitSpec& spec, const ParamVector& theta);
void circuit_from_json(const nlohmann::json& j, CircuitSpec& spec, ParamVector& theta);

}  // namespace qdepth
