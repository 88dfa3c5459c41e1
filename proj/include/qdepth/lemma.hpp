#pragma once

#include "qdepth/analysis.hpp"
#include "qdepth/hamiltonian.hpp"
#include "qdepth/statevector.hpp"

#include <cstdint>
#include <vector>

namespace qdepth {

inline constexpr int kLemmaMaxSites = 12;

/**
 * Exact ground state of a small chain, perturbed as exp(-i eps A) |psi0> with A
 * a random complex Hermitian matrix of spectral norm 1.
 */
class LemmaProblem {
 public:
  explicit LemmaProblem(const HamiltonianSpec& h);

  struct Errors {
    double energy_excess = 0.0;  // <psi~|H|psi~> - <psi0|H|psi0>, >= 0 up to rounding
    double energy = 0.0;         // |energy_excess|
    double entropy = 0.0;        // |S~ - S0|, half-chain, nats
  };

  /// Errors for the perturbation drawn from `trial_seed`, scaled by eps.
  Errors errors(std::uint64_t trial_seed, double eps) const;

  double e0() const { return e0_; }
  double reference_energy() const { return reference_energy_; }
  double entropy0() const { return entropy0_; }
  double gap() const { return gap_; }
  const StateVector& ground() const { return psi0_; }

 private:
  // e0_ and gap_ are written while psi0_ is built, so they come first.
  HamiltonianSpec h_;
  double e0_ = 0.0;
  double gap_ = 0.0;
  StateVector psi0_;
  double reference_energy_ = 0.0;
  double entropy0_ = 0.0;
};

struct LemmaOptions {
  std::vector<double> epsilons{1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
  int trials = 20;
  std::uint64_t seed = 0;
};

void validate(const LemmaOptions& options);

struct LemmaSample {
  int trial = 0;
  double epsilon = 0.0;
  double energy_error = 0.0;
  double entropy_error = 0.0;
};

struct LemmaReport {
  // Slope = mean of the per-trial log-log slopes; intercept likewise.
  FitResult energy;
  FitResult entropy;
  double energy_ci = 0.0;  // 95% half-width from the trial scatter
  double entropy_ci = 0.0;
  double e0 = 0.0;
  double gap = 0.0;
  std::vector<LemmaSample> samples;
};

LemmaReport lemma_harness(const HamiltonianSpec& h, const LemmaOptions& options);

}  // namespace qdepth
