#pragma once

#include "qdepth/circuit.hpp"
#include "qdepth/hamiltonian.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace qdepth {

/// Coordinate sweeps run after each full quasi-Newton pass.
enum class SweepMode {
  None,
  Layer,      // quasi-Newton on one layer's angles, others fixed
  Parameter,  // exact single-angle minimization, one angle at a time
};

std::string_view to_string(SweepMode mode);
SweepMode parse_sweep_mode(std::string_view name);

/// Centre of the random initial angles.
enum class InitMode {
  Zero,       // all angles near 0: the circuit starts near |0...0>
  Staggered,  // near a point preparing |-...->, where every CZ acts at first order
  Alternate,  // Zero on even restarts, Staggered on odd ones
};

std::string_view to_string(InitMode mode);
InitMode parse_init_mode(std::string_view name);

struct OptimizerConfig {
  double convergence_threshold = 1e-12;  // energy decrease per outer cycle
  int max_outer_cycles = 30;
  int max_quasi_newton_iters = 400;
  int sweep_quasi_newton_iters = 40;
  int memory = 10;  // quasi-Newton history pairs
  int restarts = 1;
  double init_scale = 0.1;  // std-dev of initial angles, radians
  InitMode init = InitMode::Zero;
  std::uint64_t seed = 0;
  SweepMode sweep = SweepMode::Layer;
  double gradient_tolerance = 1e-9;
  std::size_t max_evaluations = 0;  // objective + gradient calls, 0 = unlimited
};

void validate(const OptimizerConfig& cfg);

struct VqeResult {
  double energy = 0.0;
  std::optional<double> e0;
  double epsilon = 0.0;  // |energy - e0|, NaN without a reference
  ParamVector theta;
  double entropy_half = 0.0;  // nats
  int cycles_used = 0;
  bool converged = false;
  std::uint64_t seed_used = 0;
  std::size_t evaluations = 0;
  std::vector<double> cycle_energies;  // best energy after each outer cycle
};

/// <psi(theta)|H|psi(theta)>
double objective(const CircuitSpec& spec, const Observable& h, const ParamVector& theta);

/// Parameter-shift gradient: (E(theta + pi/2 e_k) - E(theta - pi/2 e_k)) / 2 for every k.
std::vector<double> gradient(const CircuitSpec& spec, const Observable& h, const ParamVector& theta);

/**
 * Same gradient by reverse-mode propagation through the gate list: one forward
 * pass, one H application, one backward pass. Equal to the parameter-shift
 * result to rounding; used inside the optimizer. Writes the energy if requested.
 */
std::vector<double> adjoint_gradient(const CircuitSpec& spec, const Observable& h,
                                     const ParamVector& theta, double* energy = nullptr);

/// Seed of restart `index` derived from the configured seed.
std::uint64_t restart_seed(std::uint64_t seed, int index);

ParamVector random_angles(const CircuitSpec& spec, double scale, std::uint64_t seed);

/// Angles of the staggered start: pi/2 on odd qubits in the first sweep, then
/// -pi/2 (even) and pi (odd) in the final sweep, zero elsewhere.
ParamVector staggered_angles(const CircuitSpec& spec);

/// Centre picked by cfg.init for this restart, plus normal(0, cfg.init_scale) noise.
ParamVector initial_angles(const CircuitSpec& spec, const OptimizerConfig& cfg, std::uint64_t seed,
                           int restart = 0);

/**
 * Outer cycles of (full quasi-Newton pass, then sweeps) until one cycle lowers
 * the energy by less than the threshold. With several restarts the lowest
 * energy wins. `e0` fills epsilon.
 */
VqeResult minimize(const CircuitSpec& spec, const Observable& h, const OptimizerConfig& cfg,
                   const std::optional<ParamVector>& init = std::nullopt,
                   std::optional<double> e0 = std::nullopt);

struct AavqeStep {
  double s = 1.0;
  std::optional<OptimizerConfig> config;
};

struct AavqeSchedule {
  std::vector<AavqeStep> steps;

  /// `count` evenly spaced values ending at 1, starting at 0 when include_zero.
  static AavqeSchedule linear(int count, bool include_zero = true);
};

void validate(const AavqeSchedule& schedule);

/**
 * Minimizes (1 - s) E_H0 + s E_HP for each s in order, warm-starting from the
 * previous step's angles. H0 defaults to -sum_j X_j. With a nonzero budget in
 * cfg, it is shared by all steps: each step gets an equal part of what the
 * earlier steps left unused.
 */
VqeResult aavqe(const CircuitSpec& spec, const HamiltonianSpec& problem, const AavqeSchedule& schedule,
                const OptimizerConfig& cfg, std::optional<double> e0 = std::nullopt,
                std::optional<HamiltonianSpec> reference = std::nullopt);

/// Run checkpoint: circuit, angles, energy, seed.
nlohmann::json checkpoint_to_json(const CircuitSpec& spec, const VqeResult& result);

struct Checkpoint {
  CircuitSpec spec;
  ParamVector theta;
  double energy = 0.0;
  std::uint64_t seed = 0;
};
Checkpoint checkpoint_from_json(const nlohmann::json& j);

}  // namespace qdepth
