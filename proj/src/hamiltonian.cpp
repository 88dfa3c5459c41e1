#include "qdepth/hamiltonian.hpp"

#include <Eigen/Dense>

#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace qdepth {

std::string_view model_name(Model m) {
  switch (m) {
    case Model::Ising:
      return "ising";
    case Model::Xxz:
      return "xxz";
    case Model::TransverseField:
      return "field";
  }
  return "unknown";
}

Model parse_model(std::string_view name) {
  if (name == "ising") return Model::Ising;
  if (name == "xxz") return Model::Xxz;
  if (name == "field") return Model::TransverseField;
  throw std::invalid_argument("unknown model '" + std::string(name) + "'");
}

void validate(const HamiltonianSpec& spec) {
  if (spec.sites < 2 || spec.sites > StateVector::kMaxQubits) {
    throw std::invalid_argument("HamiltonianSpec: site count " + std::to_string(spec.sites) +
                                " outside [2, " + std::to_string(StateVector::kMaxQubits) + "]");
  }
  if (!std::isfinite(spec.coupling)) throw std::invalid_argument("HamiltonianSpec: non-finite coupling");
}

namespace {

struct BondTable {
  std::uint64_t antialigned_mask;  // bit j of (i ^ rotate(i)) marks bond (j, j+1)
  int bond_count;
  std::vector<std::uint64_t> flip_masks;  // per bond, both endpoint bits
};

BondTable bonds(const HamiltonianSpec& spec) {
  const int n = spec.sites;
  BondTable t{};
  const int count = spec.periodic ? n : n - 1;
  t.bond_count = count;
  for (int j = 0; j < count; ++j) {
    t.antialigned_mask |= std::uint64_t{1} << j;
    const int k = (j + 1) % n;
    t.flip_masks.push_back((std::uint64_t{1} << j) | (std::uint64_t{1} << k));
  }
  return t;
}

// Bit j of the result is bit j xor bit (j+1 mod n).
inline std::uint64_t neighbour_xor(std::uint64_t i, int n) {
  const std::uint64_t rotated = (i >> 1) | ((i & 1u) << (n - 1));
  return i ^ rotated;
}

// out = H in, for any scalar type T (double for Lanczos, complex for states).
template <class T>
void apply_terms(const HamiltonianSpec& spec, const T* in, T* out, std::size_t dim) {
  const int n = spec.sites;
  const double g = spec.coupling;
  const BondTable table = bonds(spec);

  switch (spec.model) {
    case Model::Ising: {
      for (std::size_t i = 0; i < dim; ++i) {
        const int anti = std::popcount(neighbour_xor(i, n) & table.antialigned_mask);
        const double zz = table.bond_count - 2 * anti;
        out[i] = -zz * in[i];
      }
      if (g != 0.0) {
        for (int j = 0; j < n; ++j) {
          const std::size_t bit = std::size_t{1} << j;
          for (std::size_t i = 0; i < dim; ++i) out[i] += g * in[i ^ bit];
        }
      }
      break;
    }
    case Model::Xxz: {
      for (std::size_t i = 0; i < dim; ++i) {
        const int anti = std::popcount(neighbour_xor(i, n) & table.antialigned_mask);
        const double zz = table.bond_count - 2 * anti;
        out[i] = g * zz * in[i];
      }
      // XX + YY = 2 (S+S- + S-S+): swaps antiparallel neighbours with weight 2.
      for (int j = 0; j < table.bond_count; ++j) {
        const std::uint64_t m = table.flip_masks[static_cast<std::size_t>(j)];
        for (std::size_t i = 0; i < dim; ++i) {
          const std::uint64_t both = i & m;
          if (both != 0 && both != m) out[i] += 2.0 * in[i ^ m];
        }
      }
      break;
    }
    case Model::TransverseField: {
      for (std::size_t i = 0; i < dim; ++i) out[i] = T{};
      for (int j = 0; j < n; ++j) {
        const std::size_t bit = std::size_t{1} << j;
        for (std::size_t i = 0; i < dim; ++i) out[i] -= g * in[i ^ bit];
      }
      break;
    }
  }
}

void check_sizes(const HamiltonianSpec& spec, const StateVector& psi) {
  validate(spec);
  if (psi.qubits() != spec.sites) {
    throw std::invalid_argument("Hamiltonian on " + std::to_string(spec.sites) +
                                " sites applied to a " + std::to_string(psi.qubits()) +
                                "-qubit state");
  }
}

}  // namespace

StateVector apply_h(const HamiltonianSpec& spec, const StateVector& psi) {
  check_sizes(spec, psi);
  StateVector out(psi.qubits());
  apply_terms(spec, psi.amplitudes().data(), out.amplitudes().data(), psi.dim());
  return out;
}

Expectation expectation_detail(const HamiltonianSpec& spec, const StateVector& psi) {
  const Amplitude e = inner_product(psi, apply_h(spec, psi));
  return {e.real(), std::abs(e.imag())};
}

double energy_expectation(const HamiltonianSpec& spec, const StateVector& psi) {
  return expectation_detail(spec, psi).value;
}

Observable::Observable(const HamiltonianSpec& spec, double weight) : sites_(spec.sites) {
  validate(spec);
  terms_.emplace_back(weight, spec);
}

Observable& Observable::add(double weight, const HamiltonianSpec& spec) {
  validate(spec);
  if (spec.sites != sites_) throw std::invalid_argument("Observable: site count mismatch");
  terms_.emplace_back(weight, spec);
  return *this;
}

StateVector Observable::apply(const StateVector& psi) const {
  if (psi.qubits() != sites_) throw std::invalid_argument("Observable: state size mismatch");
  StateVector out(psi.qubits());
  auto acc = out.amplitudes();
  acc[0] = 0.0;
  std::vector<Amplitude> scratch(psi.dim());
  for (const auto& [w, spec] : terms_) {
    if (w == 0.0) continue;
    apply_terms(spec, psi.amplitudes().data(), scratch.data(), psi.dim());
    for (std::size_t i = 0; i < scratch.size(); ++i) acc[i] += w * scratch[i];
  }
  return out;
}

double Observable::expectation(const StateVector& psi) const {
  // second pass on (H - e) psi recovers the digits lost summing terms of size |e|
  StateVector phi = apply(psi);
  const double norm = psi.norm_squared();
  const double e = inner_product(psi, phi).real() / norm;
  auto pa = psi.amplitudes();
  auto fa = phi.amplitudes();
  for (std::size_t i = 0; i < fa.size(); ++i) fa[i] -= e * pa[i];
  return e + inner_product(psi, phi).real() / norm;
}

Observable interpolate(const HamiltonianSpec& h0, const HamiltonianSpec& hp, double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("interpolate: s outside [0, 1]");
  Observable mix(h0, 1.0 - s);
  mix.add(s, hp);
  return mix;
}

namespace {

Eigen::MatrixXd dense_matrix(const HamiltonianSpec& spec) {
  const std::size_t dim = std::size_t{1} << spec.sites;
  Eigen::MatrixXd m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  std::vector<double> e(dim, 0.0);
  for (std::size_t c = 0; c < dim; ++c) {
    e[c] = 1.0;
    apply_terms(spec, e.data(), m.col(static_cast<Eigen::Index>(c)).data(), dim);
    e[c] = 0.0;
  }
  return m;
}

StateVector to_state(const Eigen::VectorXd& v) {
  std::vector<Amplitude> amps(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) amps[static_cast<std::size_t>(i)] = v[i];
  auto s = StateVector::from_amplitudes(std::move(amps));
  s.normalize();
  return s;
}

struct LanczosRun {
  double value;
  Eigen::VectorXd vector;
  int iterations;
};

// Lowest eigenpair of H restricted to the complement of `deflate`.
LanczosRun lanczos_lowest(const HamiltonianSpec& spec, const LanczosOptions& opt,
                          const Eigen::VectorXd* deflate) {
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << spec.sites);
  const Eigen::Index cap = std::min<Eigen::Index>(opt.max_iterations, dim);

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = normal(rng);

  auto project_out = [&](Eigen::VectorXd& w) {
    if (deflate != nullptr) w -= deflate->dot(w) * (*deflate);
  };
  project_out(v);
  v.normalize();

  Eigen::MatrixXd basis(dim, cap);
  std::vector<double> alpha;
  std::vector<double> beta;
  Eigen::VectorXd w(dim);
  double previous = std::numeric_limits<double>::infinity();

  for (Eigen::Index k = 0; k < cap; ++k) {
    basis.col(k) = v;
    apply_terms(spec, v.data(), w.data(), static_cast<std::size_t>(dim));
    const double a = v.dot(w);
    alpha.push_back(a);
    w -= a * v;
    if (k > 0) w -= beta.back() * basis.col(k - 1);
    for (int pass = 0; pass < 2; ++pass) {
      project_out(w);
      const Eigen::VectorXd overlaps = basis.leftCols(k + 1).transpose() * w;
      w -= basis.leftCols(k + 1) * overlaps;
    }
    const double b = w.norm();

    const auto m = static_cast<Eigen::Index>(alpha.size());
    Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), m);
    Eigen::VectorXd sub = m > 1 ? Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(beta.data(), m - 1))
                                : Eigen::VectorXd();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
    tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    const double ritz = tri.eigenvalues()[0];
    const double residual = b * std::abs(tri.eigenvectors()(m - 1, 0));

    const bool exhausted = b < 1e-12 || k + 1 == dim;
    const bool converged =
        std::abs(ritz - previous) < opt.ritz_tolerance && residual < opt.residual_tolerance;
    if (exhausted || converged) {
      Eigen::VectorXd vec = basis.leftCols(m) * tri.eigenvectors().col(0);
      vec.normalize();
      return {ritz, vec, static_cast<int>(m)};
    }
    previous = ritz;
    beta.push_back(b);
    v = w / b;
  }
  throw ConvergenceError("Lanczos did not converge within " + std::to_string(cap) +
                         " iterations for " + std::string(model_name(spec.model)) + " n=" +
                         std::to_string(spec.sites));
}

}  // namespace

GroundTruth dense_ground(const HamiltonianSpec& spec, bool want_state) {
  validate(spec);
  if (spec.sites > kDenseGroundMaxSites + 2) {
    throw std::invalid_argument("dense_ground: too many sites for dense diagonalization");
  }
  const Eigen::MatrixXd h = dense_matrix(spec);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      h, want_state ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw ConvergenceError("dense_ground: eigensolver failed");
  GroundTruth g;
  g.e0 = solver.eigenvalues()[0];
  g.gap = solver.eigenvalues().size() > 1 ? solver.eigenvalues()[1] - g.e0 : 0.0;
  g.method = "dense";
  if (want_state) g.state = to_state(solver.eigenvectors().col(0));
  return g;
}

GroundTruth lanczos_ground(const HamiltonianSpec& spec, bool want_state,
                           const LanczosOptions& options) {
  validate(spec);
  if (spec.sites > kExactGroundMaxSites) {
    throw std::invalid_argument("lanczos_ground: at most " + std::to_string(kExactGroundMaxSites) +
                                " sites supported");
  }
  const LanczosRun ground = lanczos_lowest(spec, options, nullptr);
  LanczosOptions second = options;
  second.seed = options.seed + 1;
  const LanczosRun excited = lanczos_lowest(spec, second, &ground.vector);

  GroundTruth g;
  g.e0 = ground.value;
  g.gap = std::max(0.0, excited.value - ground.value);
  g.method = "lanczos";
  g.iterations = ground.iterations;
  if (want_state) g.state = to_state(ground.vector);
  return g;
}

GroundTruth exact_ground(const HamiltonianSpec& spec, bool want_state) {
  validate(spec);
  if (spec.sites > kExactGroundMaxSites) {
    throw std::invalid_argument("exact_ground: at most " + std::to_string(kExactGroundMaxSites) +
                                " sites supported");
  }
  if (spec.sites <= kDenseGroundMaxSites) return dense_ground(spec, want_state);
  return lanczos_ground(spec, want_state);
}

}  // namespace qdepth
