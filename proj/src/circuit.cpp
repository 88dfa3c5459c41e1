#include "qdepth/circuit.hpp"

#include <stdexcept>
#include <string>

namespace qdepth {

void validate(const CircuitSpec& spec) {
  if (spec.qubits < 4 || spec.qubits % 2 != 0) {
    throw std::invalid_argument("CircuitSpec: qubit count must be even and >= 4, got " +
                                std::to_string(spec.qubits));
  }
  if (spec.qubits > StateVector::kMaxQubits) {
    throw std::invalid_argument("CircuitSpec: qubit count above simulator ceiling");
  }
  if (spec.layers < 0) throw std::invalid_argument("CircuitSpec: negative layer count");
}

std::size_t param_count(const CircuitSpec& spec) {
  validate(spec);
  const auto n = static_cast<std::size_t>(spec.qubits);
  return 2 * n * static_cast<std::size_t>(spec.layers) + n;
}

std::vector<Gate> gate_sequence(const CircuitSpec& spec) {
  validate(spec);
  const int n = spec.qubits;
  std::vector<Gate> gates;
  gates.reserve(param_count(spec) + static_cast<std::size_t>(spec.layers * n));
  std::size_t p = 0;
  auto rotation_sweep = [&] {
    for (int q = 0; q < n; ++q) gates.push_back({Gate::Kind::Ry, q, -1, p++});
  };
  for (int layer = 0; layer < spec.layers; ++layer) {
    rotation_sweep();
    for (int q = 0; q + 1 < n; q += 2) gates.push_back({Gate::Kind::Cz, q, q + 1, 0});
    rotation_sweep();
    for (int q = 1; q + 1 < n; q += 2) gates.push_back({Gate::Kind::Cz, q, q + 1, 0});
    if (spec.wrap_cz) gates.push_back({Gate::Kind::Cz, n - 1, 0, 0});
  }
  rotation_sweep();
  return gates;
}

std::vector<ParamBlock> layer_blocks(const CircuitSpec& spec) {
  validate(spec);
  const auto n = static_cast<std::size_t>(spec.qubits);
  std::vector<ParamBlock> blocks;
  for (int layer = 0; layer < spec.layers; ++layer) {
    blocks.push_back({2 * n * static_cast<std::size_t>(layer), 2 * n});
  }
  blocks.push_back({2 * n * static_cast<std::size_t>(spec.layers), n});
  return blocks;
}

StateVector prepare_state(const CircuitSpec& spec, const ParamVector& theta) {
  const std::size_t count = param_count(spec);
  if (theta.size() != count) {
    throw std::invalid_argument("prepare_state: expected " + std::to_string(count) +
                                " angles, got " + std::to_string(theta.size()));
  }
  StateVector psi(spec.qubits);
  for (const Gate& g : gate_sequence(spec)) {
    if (g.kind == Gate::Kind::Ry) {
      psi.apply_ry(g.q0, theta[g.param]);
    } else {
      psi.apply_cz(g.q0, g.q1);
    }
  }
  return psi;
}

int cut_crossing_count(const CircuitSpec& spec, int block_size) {
  validate(spec);
  if (block_size < 1 || block_size >= spec.qubits) {
    throw std::out_of_range("cut_crossing_count: block size " + std::to_string(block_size) +
                            " not in [1, " + std::to_string(spec.qubits - 1) + "]");
  }
  int count = 0;
  for (const Gate& g : gate_sequence(spec)) {
    if (g.kind == Gate::Kind::Cz && ((g.q0 < block_size) != (g.q1 < block_size))) ++count;
  }
  return count;
}

ParamVector prepend_identity_layers(const CircuitSpec& spec, const ParamVector& theta, int extra) {
  if (extra < 0) throw std::invalid_argument("prepend_identity_layers: negative layer count");
  if (theta.size() != param_count(spec)) {
    throw std::invalid_argument("prepend_identity_layers: angle count does not match spec");
  }
  ParamVector out(2 * static_cast<std::size_t>(spec.qubits) * static_cast<std::size_t>(extra), 0.0);
  out.insert(out.end(), theta.begin(), theta.end());
  return out;
}

nlohmann::json circuit_to_json(const CircuitSpec& spec, const ParamVector& theta) {
  return {{"qubits", spec.qubits},
          {"layers", spec.layers},
          {"wrap_cz", spec.wrap_cz},
          {"angles", theta}};
}

void circuit_from_json(const nlohmann::json& j, CircuitSpec& spec, ParamVector& theta) {
  CircuitSpec s;
  s.qubits = j.at("qubits").get<int>();
  s.layers = j.at("layers").get<int>();
  s.wrap_cz = j.at("wrap_cz").get<bool>();
  auto angles = j.at("angles").get<ParamVector>();
  if (angles.size() != param_count(s)) {
    throw std::invalid_argument("circuit_from_json: angle count does not match circuit geometry");
  }
  spec = s;
  theta = std::move(angles);
}

}  // namespace qdepth
