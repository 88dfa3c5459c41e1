#include "qdepth/vqe.hpp"

#include "qdepth/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace qdepth {

std::string_view to_string(SweepMode mode) {
  switch (mode) {
    case SweepMode::None:
      return "none";
    case SweepMode::Layer:
      return "layer";
    case SweepMode::Parameter:
      return "param";
  }
  return "unknown";
}

SweepMode parse_sweep_mode(std::string_view name) {
  if (name == "none") return SweepMode::None;
  if (name == "layer") return SweepMode::Layer;
  if (name == "param" || name == "parameter") return SweepMode::Parameter;
  throw std::invalid_argument("unknown sweep mode '" + std::string(name) + "'");
}

std::string_view to_string(InitMode mode) {
  switch (mode) {
    case InitMode::Zero:
      return "zero";
    case InitMode::Staggered:
      return "staggered";
    case InitMode::Alternate:
      return "alternate";
  }
  return "unknown";
}

InitMode parse_init_mode(std::string_view name) {
  if (name == "zero") return InitMode::Zero;
  if (name == "staggered") return InitMode::Staggered;
  if (name == "alternate") return InitMode::Alternate;
  throw std::invalid_argument("unknown init mode '" + std::string(name) + "'");
}

void validate(const OptimizerConfig& cfg) {
  if (cfg.memory < 1) throw std::invalid_argument("OptimizerConfig: memory must be >= 1");
  if (!(cfg.convergence_threshold > 0.0)) {
    throw std::invalid_argument("OptimizerConfig: convergence_threshold must be positive");
  }
  if (cfg.restarts < 1) throw std::invalid_argument("OptimizerConfig: restarts must be >= 1");
  if (cfg.max_outer_cycles < 1) throw std::invalid_argument("OptimizerConfig: max_outer_cycles must be >= 1");
  if (cfg.max_quasi_newton_iters < 0 || cfg.sweep_quasi_newton_iters < 0) {
    throw std::invalid_argument("OptimizerConfig: iteration caps must be non-negative");
  }
  if (!(cfg.init_scale >= 0.0) || !std::isfinite(cfg.init_scale)) {
    throw std::invalid_argument("OptimizerConfig: init_scale must be a finite non-negative number");
  }
  if (!(cfg.gradient_tolerance >= 0.0)) {
    throw std::invalid_argument("OptimizerConfig: gradient_tolerance must be non-negative");
  }
}

namespace {

void check_sizes(const CircuitSpec& spec, const Observable& h, const ParamVector& theta) {
  if (h.sites() != spec.qubits) {
    throw std::invalid_argument("circuit has " + std::to_string(spec.qubits) +
                                " qubits but the Hamiltonian has " + std::to_string(h.sites()) +
                                " sites");
  }
  if (theta.size() != param_count(spec)) {
    throw std::invalid_argument("expected " + std::to_string(param_count(spec)) + " angles, got " +
                                std::to_string(theta.size()));
  }
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// E(psi) - anchor without the rounding of a sum of terms of size |E|. On return
// `phi` holds (H - E) psi, which has the same overlaps with every G psi as H psi.
double excess_energy(const Observable& h, const StateVector& psi, double anchor, StateVector& phi) {
  phi = h.apply(psi);
  const double norm = psi.norm_squared();
  const double rough = inner_product(psi, phi).real() / norm;
  auto pa = psi.amplitudes();
  auto fa = phi.amplitudes();
  for (std::size_t i = 0; i < fa.size(); ++i) fa[i] -= rough * pa[i];
  return (rough - anchor) + inner_product(psi, phi).real() / norm;
}

std::vector<double> excess_and_gradient(const CircuitSpec& spec, const Observable& h,
                                        const ParamVector& theta, double anchor, double& excess) {
  const std::vector<Gate> gates = gate_sequence(spec);
  StateVector psi = prepare_state(spec, theta);
  StateVector phi(psi.qubits());
  excess = excess_energy(h, psi, anchor, phi);

  // psi holds the state after gate k, phi the adjoint-propagated (H - E) psi.
  std::vector<double> grad(theta.size(), 0.0);
  for (auto it = gates.rbegin(); it != gates.rend(); ++it) {
    if (it->kind == Gate::Kind::Ry) {
      grad[it->param] = 2.0 * ry_generator_overlap(phi, psi, it->q0).real();
      psi.apply_ry(it->q0, -theta[it->param]);
      phi.apply_ry(it->q0, -theta[it->param]);
    } else {
      psi.apply_cz(it->q0, it->q1);
      phi.apply_cz(it->q0, it->q1);
    }
  }
  return grad;
}

}  // namespace

double objective(const CircuitSpec& spec, const Observable& h, const ParamVector& theta) {
  check_sizes(spec, h, theta);
  return h.expectation(prepare_state(spec, theta));
}

std::vector<double> gradient(const CircuitSpec& spec, const Observable& h, const ParamVector& theta) {
  check_sizes(spec, h, theta);
  std::vector<double> grad(theta.size());
  ParamVector shifted = theta;
  constexpr double kShift = std::numbers::pi / 2.0;
  for (std::size_t k = 0; k < theta.size(); ++k) {
    shifted[k] = theta[k] + kShift;
    const double plus = h.expectation(prepare_state(spec, shifted));
    shifted[k] = theta[k] - kShift;
    const double minus = h.expectation(prepare_state(spec, shifted));
    shifted[k] = theta[k];
    grad[k] = 0.5 * (plus - minus);
  }
  return grad;
}

std::vector<double> adjoint_gradient(const CircuitSpec& spec, const Observable& h,
                                     const ParamVector& theta, double* energy) {
  check_sizes(spec, h, theta);
  double e = 0.0;
  std::vector<double> grad = excess_and_gradient(spec, h, theta, 0.0, e);
  if (energy != nullptr) *energy = e;
  return grad;
}

std::uint64_t restart_seed(std::uint64_t seed, int index) {
  if (index == 0) return seed;
  return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(index)));
}

ParamVector random_angles(const CircuitSpec& spec, double scale, std::uint64_t seed) {
  ParamVector theta(param_count(spec));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double& t : theta) t = scale * normal(rng);
  return theta;
}

ParamVector staggered_angles(const CircuitSpec& spec) {
  validate(spec);
  ParamVector theta(param_count(spec), 0.0);
  const int n = spec.qubits;
  const std::size_t last = 2 * static_cast<std::size_t>(n) * static_cast<std::size_t>(spec.layers);
  for (int q = 0; q < n; ++q) {
    const auto qi = static_cast<std::size_t>(q);
    if (spec.layers > 0 && q % 2 == 1) theta[qi] = std::numbers::pi / 2.0;
    theta[last + qi] = q % 2 == 0 ? -std::numbers::pi / 2.0 : std::numbers::pi;
  }
  if (spec.layers == 0) {
    for (int q = 0; q < n; ++q) theta[static_cast<std::size_t>(q)] = -std::numbers::pi / 2.0;
  }
  return theta;
}

ParamVector initial_angles(const CircuitSpec& spec, const OptimizerConfig& cfg, std::uint64_t seed,
                           int restart) {
  ParamVector theta = random_angles(spec, cfg.init_scale, seed);
  const bool staggered =
      cfg.init == InitMode::Staggered || (cfg.init == InitMode::Alternate && restart % 2 == 1);
  if (staggered) {
    const ParamVector centre = staggered_angles(spec);
    for (std::size_t i = 0; i < theta.size(); ++i) theta[i] += centre[i];
  }
  return theta;
}

namespace {

// Counts objective and gradient calls against an optional budget. Energies are
// returned relative to an anchor so that tiny improvements stay resolvable.
class Workload {
 public:
  Workload(const CircuitSpec& spec, const Observable& h, std::size_t budget)
      : spec_(spec), h_(h), budget_(budget) {}

  double excess(const ParamVector& theta, double anchor) {
    ++count_;
    StateVector phi(spec_.qubits);
    return excess_energy(h_, prepare_state(spec_, theta), anchor, phi);
  }

  double excess_and_gradient(const ParamVector& theta, double anchor, std::vector<double>& grad) {
    ++count_;
    double e = 0.0;
    grad = qdepth::excess_and_gradient(spec_, h_, theta, anchor, e);
    return e;
  }

  std::size_t count() const { return count_; }
  bool exhausted() const { return budget_ != 0 && count_ >= budget_; }
  std::size_t remaining() const {
    if (budget_ == 0) return 0;
    return count_ >= budget_ ? 0 : budget_ - count_;
  }
  // LbfgsOptions treats 0 as unlimited, so an exhausted budget must never reach it.
  std::size_t lbfgs_budget() const { return budget_ == 0 ? 0 : std::max<std::size_t>(remaining(), 1); }

  const CircuitSpec& spec() const { return spec_; }

 private:
  const CircuitSpec& spec_;
  const Observable& h_;
  std::size_t budget_;
  std::size_t count_ = 0;
};

struct Trajectory {
  ParamVector theta;
  double energy;
  int cycles = 0;
  bool converged = false;
  std::vector<double> cycle_energies;
};

// Each helper returns the energy decrease it achieved.
double quasi_newton_full(Workload& work, Trajectory& t, const OptimizerConfig& cfg) {
  if (cfg.max_quasi_newton_iters == 0 || work.exhausted()) return 0.0;
  const double anchor = t.energy;
  std::vector<double> grad;
  GradientObjective f = [&](std::span<const double> x, std::span<double> g) {
    ParamVector theta(x.begin(), x.end());
    const double e = work.excess_and_gradient(theta, anchor, grad);
    std::copy(grad.begin(), grad.end(), g.begin());
    return e;
  };
  LbfgsOptions opt;
  opt.memory = cfg.memory;
  opt.max_iterations = cfg.max_quasi_newton_iters;
  opt.gradient_tolerance = cfg.gradient_tolerance;
  opt.max_evaluations = work.lbfgs_budget();
  LbfgsResult r = lbfgs_minimize(f, t.theta, opt);
  if (!(r.value < 0.0)) return 0.0;
  t.theta = std::move(r.x);
  t.energy = anchor + r.value;
  return -r.value;
}

double layer_sweep(Workload& work, Trajectory& t, const OptimizerConfig& cfg) {
  if (cfg.sweep_quasi_newton_iters == 0) return 0.0;
  std::vector<double> grad;
  double gain = 0.0;
  for (const ParamBlock& block : layer_blocks(work.spec())) {
    if (work.exhausted()) break;
    const double anchor = t.energy;
    ParamVector theta = t.theta;
    GradientObjective f = [&](std::span<const double> x, std::span<double> g) {
      std::copy(x.begin(), x.end(), theta.begin() + static_cast<std::ptrdiff_t>(block.offset));
      const double e = work.excess_and_gradient(theta, anchor, grad);
      std::copy_n(grad.begin() + static_cast<std::ptrdiff_t>(block.offset), block.size, g.begin());
      return e;
    };
    LbfgsOptions opt;
    opt.memory = cfg.memory;
    opt.max_iterations = cfg.sweep_quasi_newton_iters;
    opt.gradient_tolerance = cfg.gradient_tolerance;
    opt.max_evaluations = work.lbfgs_budget();
    std::vector<double> x0(t.theta.begin() + static_cast<std::ptrdiff_t>(block.offset),
                           t.theta.begin() + static_cast<std::ptrdiff_t>(block.offset + block.size));
    LbfgsResult r = lbfgs_minimize(f, std::move(x0), opt);
    if (r.value < 0.0) {
      std::copy(r.x.begin(), r.x.end(), t.theta.begin() + static_cast<std::ptrdiff_t>(block.offset));
      t.energy = anchor + r.value;
      gain -= r.value;
    }
  }
  return gain;
}

// E(theta_k + phi) = a + b cos(phi) + c sin(phi) for an Ry angle, so three
// energies pin down the exact minimum along that coordinate.
double parameter_sweep(Workload& work, Trajectory& t) {
  constexpr double kQuarter = std::numbers::pi / 2.0;
  double gain = 0.0;
  for (std::size_t k = 0; k < t.theta.size(); ++k) {
    if (work.exhausted()) break;
    const double anchor = t.energy;
    const double base = t.theta[k];
    ParamVector probe = t.theta;
    probe[k] = base + kQuarter;
    const double plus = work.excess(probe, anchor);
    probe[k] = base - kQuarter;
    const double minus = work.excess(probe, anchor);
    const double a = 0.5 * (plus + minus);
    const double b = -a;
    const double c = 0.5 * (plus - minus);
    const double phi = std::atan2(c, b) + std::numbers::pi;
    probe[k] = std::remainder(base + phi, 4.0 * std::numbers::pi);
    const double e = work.excess(probe, anchor);
    if (e < 0.0) {
      t.theta = std::move(probe);
      t.energy = anchor + e;
      gain -= e;
    }
  }
  return gain;
}

Trajectory optimize_from(Workload& work, ParamVector start, const OptimizerConfig& cfg) {
  Trajectory t{std::move(start), 0.0, 0, false, {}};
  t.energy = work.excess(t.theta, 0.0);
  for (int cycle = 0; cycle < cfg.max_outer_cycles; ++cycle) {
    double gain = quasi_newton_full(work, t, cfg);
    switch (cfg.sweep) {
      case SweepMode::None:
        break;
      case SweepMode::Layer:
        gain += layer_sweep(work, t, cfg);
        break;
      case SweepMode::Parameter:
        gain += parameter_sweep(work, t);
        break;
    }
    t.cycles = cycle + 1;
    t.cycle_energies.push_back(t.energy);
    if (gain < cfg.convergence_threshold) {
      t.converged = true;
      break;
    }
    if (work.exhausted()) break;
  }
  return t;
}

}  // namespace

VqeResult minimize(const CircuitSpec& spec, const Observable& h, const OptimizerConfig& cfg,
                   const std::optional<ParamVector>& init, std::optional<double> e0) {
  validate(cfg);
  validate(spec);
  if (h.sites() != spec.qubits) {
    throw std::invalid_argument("minimize: circuit and Hamiltonian sizes differ");
  }
  if (init && init->size() != param_count(spec)) {
    throw std::invalid_argument("minimize: initial angle count does not match the circuit");
  }

  Workload work(spec, h, cfg.max_evaluations);
  VqeResult best;
  best.energy = std::numeric_limits<double>::infinity();
  bool have_best = false;

  for (int r = 0; r < cfg.restarts; ++r) {
    if (have_best && work.exhausted()) break;
    const std::uint64_t seed = restart_seed(cfg.seed, r);
    ParamVector start;
    if (init) {
      start = *init;
      if (r > 0) {
        const ParamVector noise = random_angles(spec, cfg.init_scale, seed);
        for (std::size_t i = 0; i < start.size(); ++i) start[i] += noise[i];
      }
    } else {
      start = initial_angles(spec, cfg, seed, r);
    }
    Trajectory t = optimize_from(work, std::move(start), cfg);
    if (!have_best || t.energy < best.energy) {
      best.energy = t.energy;
      best.theta = std::move(t.theta);
      best.cycles_used = t.cycles;
      best.converged = t.converged;
      best.seed_used = seed;
      best.cycle_energies = std::move(t.cycle_energies);
      have_best = true;
    }
  }

  best.evaluations = work.count();
  best.entropy_half = half_chain_entropy(prepare_state(spec, best.theta));
  best.e0 = e0;
  best.epsilon = e0 ? std::abs(best.energy - *e0) : std::numeric_limits<double>::quiet_NaN();
  return best;
}

AavqeSchedule AavqeSchedule::linear(int count, bool include_zero) {
  if (count < 1) throw std::invalid_argument("AavqeSchedule::linear: count must be >= 1");
  AavqeSchedule schedule;
  for (int i = 0; i < count; ++i) {
    double s = 1.0;
    if (count > 1) {
      s = include_zero ? static_cast<double>(i) / (count - 1) : static_cast<double>(i + 1) / count;
    }
    schedule.steps.push_back({s, std::nullopt});
  }
  return schedule;
}

void validate(const AavqeSchedule& schedule) {
  if (schedule.steps.empty()) throw std::invalid_argument("AavqeSchedule: no steps");
  double previous = -1.0;
  for (const auto& step : schedule.steps) {
    if (!(step.s >= 0.0 && step.s <= 1.0)) throw std::invalid_argument("AavqeSchedule: s outside [0, 1]");
    if (!(step.s > previous)) throw std::invalid_argument("AavqeSchedule: s must increase strictly");
    if (step.config) validate(*step.config);
    previous = step.s;
  }
  if (schedule.steps.back().s != 1.0) throw std::invalid_argument("AavqeSchedule: last step must be s = 1");
}

VqeResult aavqe(const CircuitSpec& spec, const HamiltonianSpec& problem, const AavqeSchedule& schedule,
                const OptimizerConfig& cfg, std::optional<double> e0,
                std::optional<HamiltonianSpec> reference) {
  validate(schedule);
  validate(cfg);
  const HamiltonianSpec h0 =
      reference.value_or(HamiltonianSpec::transverse_field(1.0, problem.sites, problem.periodic));
  if (h0.sites != problem.sites) throw std::invalid_argument("aavqe: H0 and HP sizes differ");

  std::optional<ParamVector> theta;
  std::size_t used = 0;
  int cycles = 0;
  VqeResult last;
  for (std::size_t i = 0; i < schedule.steps.size(); ++i) {
    const AavqeStep& step = schedule.steps[i];
    OptimizerConfig step_cfg = step.config.value_or(cfg);
    if (cfg.max_evaluations != 0) {
      // equal share of what is left, so an early step cannot starve s = 1
      const std::size_t remaining = cfg.max_evaluations > used ? cfg.max_evaluations - used : 0;
      const std::size_t share = remaining / (schedule.steps.size() - i);
      if (share == 0) break;
      step_cfg.max_evaluations = step_cfg.max_evaluations == 0
                                     ? share
                                     : std::min(step_cfg.max_evaluations, share);
    }
    const bool final_step = step.s == 1.0;
    last = minimize(spec, interpolate(h0, problem, step.s), step_cfg, theta,
                    final_step ? e0 : std::nullopt);
    used += last.evaluations;
    cycles += last.cycles_used;
    theta = last.theta;
  }

  if (!theta) throw std::runtime_error("aavqe: evaluation budget exhausted before the first step");
  // A budget cut may end the schedule early; always report against the problem Hamiltonian.
  last.theta = *theta;
  last.energy = objective(spec, problem, *theta);
  last.e0 = e0;
  last.epsilon = e0 ? std::abs(last.energy - *e0) : std::numeric_limits<double>::quiet_NaN();
  last.evaluations = used;
  last.cycles_used = cycles;
  last.entropy_half = half_chain_entropy(prepare_state(spec, *theta));
  return last;
}

nlohmann::json checkpoint_to_json(const CircuitSpec& spec, const VqeResult& result) {
  return {{"circuit", circuit_to_json(spec, result.theta)},
          {"energy", result.energy},
          {"seed", result.seed_used}};
}

Checkpoint checkpoint_from_json(const nlohmann::json& j) {
  Checkpoint c;
  circuit_from_json(j.at("circuit"), c.spec, c.theta);
  c.energy = j.at("energy").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

}  // namespace qdepth
