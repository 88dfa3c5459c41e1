#include "oracle.hpp"
#include "qdepth/vqe.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace qdepth;

namespace {

double dense_energy(const CircuitSpec& spec, const HamiltonianSpec& h, const ParamVector& theta) {
  const oracle::Vec v = oracle::circuit_unitary(spec, theta) * oracle::zero_state(spec.qubits);
  return (v.adjoint() * oracle::hamiltonian(h) * v)(0, 0).real();
}

std::vector<double> central_differences(const CircuitSpec& spec, const HamiltonianSpec& h, ParamVector theta,
                                        double step) {
  std::vector<double> g(theta.size());
  for (std::size_t k = 0; k < theta.size(); ++k) {
    const double t = theta[k];
    theta[k] = t + step;
    const double up = objective(spec, h, theta);
    theta[k] = t - step;
    const double down = objective(spec, h, theta);
    theta[k] = t;
    g[k] = (up - down) / (2 * step);
  }
  return g;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("objective examples") {
  const CircuitSpec spec{6, 2, true};
  CHECK(objective(spec, HamiltonianSpec::ising(0.0, 6), ParamVector(param_count(spec), 0.0)) ==
        doctest::Approx(-6.0));

  const CircuitSpec flat{4, 0, false};
  CHECK(objective(flat, HamiltonianSpec::ising(10.0, 4), ParamVector(4, std::numbers::pi / 2)) ==
        doctest::Approx(40.0).epsilon(1e-12));

  const CircuitSpec deep{6, 2, false};
  const HamiltonianSpec xxz = HamiltonianSpec::xxz(0.5, 6);
  const ParamVector theta = oracle::random_theta(deep, 7);
  CHECK(std::abs(objective(deep, xxz, theta) - dense_energy(deep, xxz, theta)) < 1e-12);

  CHECK_THROWS_AS(objective(deep, HamiltonianSpec::ising(1.0, 8), theta), std::invalid_argument);
}

TEST_CASE("parameter-shift gradient matches finite differences") {
  const CircuitSpec spec{6, 2, true};
  const HamiltonianSpec h = HamiltonianSpec::ising(1.0, 6);
  const ParamVector theta = oracle::random_theta(spec, 3);
  const auto shift = gradient(spec, h, theta);
  CHECK(max_abs_diff(shift, central_differences(spec, h, theta, 1e-5)) < 1e-6);
  CHECK(max_abs_diff(shift, adjoint_gradient(spec, h, theta)) < 1e-12);

  double e = 0.0;
  adjoint_gradient(spec, h, theta, &e);
  CHECK(std::abs(e - objective(spec, h, theta)) < 1e-12);
}

TEST_CASE("gradient is 2pi periodic") {
  const CircuitSpec spec{4, 2, false};
  const HamiltonianSpec h = HamiltonianSpec::xxz(0.5, 4);
  ParamVector theta = oracle::random_theta(spec, 12);
  const auto g0 = gradient(spec, h, theta);
  theta[5] += 2 * std::numbers::pi;
  CHECK(max_abs_diff(g0, gradient(spec, h, theta)) < 1e-10);
}

TEST_CASE("minimize: exactly representable classical ground state") {
  OptimizerConfig cfg;
  cfg.seed = 1;
  const VqeResult r = minimize({6, 0, false}, HamiltonianSpec::ising(0.0, 6), cfg, std::nullopt, -6.0);
  CHECK(r.epsilon < 1e-10);
  CHECK(r.epsilon >= 0.0);
  CHECK(r.theta.size() == 6);
}

TEST_CASE("minimize: stationary at the optimum") {
  OptimizerConfig cfg;
  cfg.seed = 4;
  const CircuitSpec spec{4, 1, true};
  const HamiltonianSpec h = HamiltonianSpec::ising(2.0, 4);
  const VqeResult r = minimize(spec, h, cfg);
  double worst = 0.0;
  for (double g : gradient(spec, h, r.theta)) worst = std::max(worst, std::abs(g));
  CHECK(worst < 1e-5);
}

TEST_CASE("minimize: critical ising n=6 beyond the crossover") {
  const HamiltonianSpec h = HamiltonianSpec::ising(1.0, 6);
  const double e0 = exact_ground(h, false).e0;
  OptimizerConfig cfg;
  cfg.restarts = 4;
  cfg.init = InitMode::Alternate;
  cfg.memory = 100;
  cfg.max_quasi_newton_iters = 2000;
  cfg.seed = 0;
  const VqeResult r = minimize({6, 6, true}, h, cfg, std::nullopt, e0);
  CHECK(r.epsilon < 1e-6);
  CHECK(r.energy >= e0 - 1e-9);
}

TEST_CASE("minimize is deterministic and cycle energies never rise") {
  const CircuitSpec spec{6, 2, true};
  const HamiltonianSpec h = HamiltonianSpec::xxz(0.5, 6);
  OptimizerConfig cfg;
  cfg.seed = 99;
  cfg.restarts = 2;
  const VqeResult a = minimize(spec, h, cfg);
  const VqeResult b = minimize(spec, h, cfg);
  CHECK(a.energy == b.energy);
  CHECK(a.theta == b.theta);
  CHECK(a.evaluations == b.evaluations);
  for (std::size_t i = 1; i < a.cycle_energies.size(); ++i) CHECK(a.cycle_energies[i] <= a.cycle_energies[i - 1]);
}

TEST_CASE("restarts dominate each constituent run") {
  const CircuitSpec spec{6, 2, true};
  const HamiltonianSpec h = HamiltonianSpec::ising(1.0, 6);
  OptimizerConfig cfg;
  cfg.seed = 5;
  cfg.restarts = 3;
  cfg.init = InitMode::Alternate;
  const VqeResult all = minimize(spec, h, cfg);
  for (int r = 0; r < 3; ++r) {
    OptimizerConfig one = cfg;
    one.restarts = 1;
    const VqeResult single = minimize(spec, h, one, initial_angles(spec, cfg, restart_seed(cfg.seed, r), r));
    CHECK(all.energy <= single.energy + 1e-12);
  }
}

TEST_CASE("sweep modes and budget") {
  const CircuitSpec spec{4, 2, true};
  const HamiltonianSpec h = HamiltonianSpec::ising(1.0, 4);
  const double e0 = exact_ground(h, false).e0;
  for (SweepMode mode : {SweepMode::None, SweepMode::Layer, SweepMode::Parameter}) {
    OptimizerConfig cfg;
    cfg.sweep = mode;
    cfg.seed = 2;
    const VqeResult r = minimize(spec, h, cfg, std::nullopt, e0);
    CHECK(r.energy >= e0 - 1e-9);
    CHECK(r.epsilon < 1e-6);
  }
  OptimizerConfig capped;
  capped.max_evaluations = 25;
  const VqeResult r = minimize(spec, h, capped);
  CHECK(r.evaluations <= 25);
  CHECK_FALSE(r.converged);
}

TEST_CASE("optimizer config validation") {
  OptimizerConfig cfg;
  cfg.restarts = 0;
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
  cfg = {};
  cfg.convergence_threshold = 0.0;
  CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
  CHECK(parse_sweep_mode("parameter") == SweepMode::Parameter);
  CHECK(parse_init_mode("staggered") == InitMode::Staggered);
  CHECK_THROWS_AS(parse_init_mode("hot"), std::invalid_argument);
}

TEST_CASE("staggered start prepares |-...->") {
  for (int l : {0, 1, 3}) {
    const CircuitSpec spec{6, l, true};
    const StateVector s = prepare_state(spec, staggered_angles(spec));
    for (std::size_t i = 0; i < s.dim(); ++i) {
      const double sign = std::popcount(i) % 2 == 0 ? 1.0 : -1.0;
      CHECK(std::abs(std::abs(s[i]) - 0.125) < 1e-12);
      CHECK(std::abs(s[i] * sign - s[0]) < 1e-12);
    }
  }
}

TEST_CASE("aavqe with the single step s=1 equals minimize") {
  const CircuitSpec spec{4, 1, true};
  const HamiltonianSpec h = HamiltonianSpec::ising(2.0, 4);
  OptimizerConfig cfg;
  cfg.seed = 17;
  AavqeSchedule one;
  one.steps.push_back({1.0, std::nullopt});
  const VqeResult a = aavqe(spec, h, one, cfg);
  const VqeResult m = minimize(spec, h, cfg);
  CHECK(a.energy == doctest::Approx(m.energy).epsilon(1e-12));
}

TEST_CASE("aavqe first step reaches the reference ground energy") {
  const CircuitSpec spec{6, 0, false};
  const HamiltonianSpec ref = HamiltonianSpec::transverse_field(1.0, 6);
  OptimizerConfig cfg;
  cfg.seed = 3;
  const VqeResult first = minimize(spec, interpolate(ref, HamiltonianSpec::ising(1.0, 6), 0.0), cfg);
  CHECK(std::abs(first.energy + 6.0) < 1e-8);

  const VqeResult r = aavqe(spec, ref, AavqeSchedule::linear(3), cfg, -6.0);
  CHECK(r.epsilon < 1e-8);

  AavqeSchedule bad;
  bad.steps = {{0.5, std::nullopt}, {0.2, std::nullopt}, {1.0, std::nullopt}};
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad.steps = {{0.0, std::nullopt}, {0.5, std::nullopt}};
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
}

TEST_CASE("checkpoint round trip") {
  const CircuitSpec spec{4, 1, true};
  OptimizerConfig cfg;
  cfg.seed = 8;
  const VqeResult r = minimize(spec, HamiltonianSpec::ising(1.0, 4), cfg);
  const Checkpoint c = checkpoint_from_json(checkpoint_to_json(spec, r));
  CHECK(c.spec == spec);
  CHECK(c.theta == r.theta);
  CHECK(c.energy == r.energy);
  CHECK(c.seed == r.seed_used);
}

TEST_CASE("aavqe versus cold start at equal budget, xxz n=10 l=4") {
  const HamiltonianSpec h = HamiltonianSpec::xxz(0.5, 10);
  const double e0 = exact_ground(h, false).e0;
  const CircuitSpec spec{10, 4, true};
  int wins = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    OptimizerConfig cfg;
    cfg.seed = seed;
    cfg.memory = 100;
    cfg.max_evaluations = 3000;
    const VqeResult cold = minimize(spec, h, cfg, std::nullopt, e0);
    const VqeResult warm = aavqe(spec, h, AavqeSchedule::linear(5), cfg, e0);
    CHECK(warm.evaluations <= cfg.max_evaluations);
    if (warm.epsilon <= cold.epsilon) ++wins;
  }
  CHECK(wins >= 7);
}
