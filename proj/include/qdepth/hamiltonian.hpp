#pragma once

#include "qdepth/statevector.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qdepth {

/**
 * Spin-chain models, all with sigma^z = diag(+1, -1) on bit value 0/1.
 *
 *   Ising:            H = -sum_j Z_j Z_{j+1} + lambda sum_j X_j
 *   Xxz:              H =  sum_j (X_j X_{j+1} + Y_j Y_{j+1}) + Delta Z_j Z_{j+1}
 *   TransverseField:  H = -h sum_j X_j   (easily prepared reference, used by AAVQE)
 *
 * Periodic chains include the bond (n-1, 0). For n = 2 this repeats the (0, 1)
 * bond; the sum over j is kept literal.
 */
enum class Model { Ising, Xxz, TransverseField };

std::string_view model_name(Model m);
Model parse_model(std::string_view name);

struct HamiltonianSpec {
  Model model = Model::Ising;
  double coupling = 1.0;  // lambda, Delta or h
  int sites = 0;
  bool periodic = true;

  static HamiltonianSpec ising(double lambda, int sites, bool periodic = true) {
    return {Model::Ising, lambda, sites, periodic};
  }
  static HamiltonianSpec xxz(double delta, int sites, bool periodic = true) {
    return {Model::Xxz, delta, sites, periodic};
  }
  static HamiltonianSpec transverse_field(double h, int sites, bool periodic = true) {
    return {Model::TransverseField, h, sites, periodic};
  }

  bool operator==(const HamiltonianSpec&) const = default;
};

void validate(const HamiltonianSpec& spec);

/// H|psi>, term by term.
StateVector apply_h(const HamiltonianSpec& spec, const StateVector& psi);

/// Real part of <psi|H|psi>.
double energy_expectation(const HamiltonianSpec& spec, const StateVector& psi);

struct Expectation {
  double value;
  double imag_residual;  // |Im <psi|H|psi>|, should stay below 1e-10
};
Expectation expectation_detail(const HamiltonianSpec& spec, const StateVector& psi);

/// Sum of weighted Hamiltonians on the same number of sites.
class Observable {
 public:
  Observable(const HamiltonianSpec& spec, double weight = 1.0);  // NOLINT(google-explicit-constructor)

  Observable& add(double weight, const HamiltonianSpec& spec);

  int sites() const { return sites_; }
  const std::vector<std::pair<double, HamiltonianSpec>>& terms() const { return terms_; }

  StateVector apply(const StateVector& psi) const;
  double expectation(const StateVector& psi) const;

 private:
  int sites_;
  std::vector<std::pair<double, HamiltonianSpec>> terms_;
};

/// (1 - s) * h0 + s * hp
Observable interpolate(const HamiltonianSpec& h0, const HamiltonianSpec& hp, double s);

struct GroundTruth {
  double e0 = 0.0;
  std::optional<StateVector> state;
  double gap = 0.0;  // distance to the next eigenvalue (0 when degenerate)
  std::string method;
  int iterations = 0;
};

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LanczosOptions {
  int max_iterations = 400;
  double ritz_tolerance = 1e-12;
  double residual_tolerance = 1e-8;
  std::uint64_t seed = 0x5eed;
};

inline constexpr int kDenseGroundMaxSites = 10;
inline constexpr int kExactGroundMaxSites = 16;

/// Dense diagonalization up to kDenseGroundMaxSites, Lanczos above.
GroundTruth exact_ground(const HamiltonianSpec& spec, bool want_state);

GroundTruth dense_ground(const HamiltonianSpec& spec, bool want_state);

/// Lanczos with full reorthogonalization. The gap comes from a second run
/// deflated against the ground vector, so degenerate copies are resolved.
GroundTruth lanczos_ground(const HamiltonianSpec& spec, bool want_state,
                           const LanczosOptions& options = {});

}  // namespace qdepth
