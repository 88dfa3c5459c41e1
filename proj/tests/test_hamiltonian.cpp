#include "oracle.hpp"
#include "qdepth/circuit.hpp"
#include "qdepth/hamiltonian.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace qdepth;

namespace {

StateVector basis(int n, std::size_t index) {
  std::vector<Amplitude> a(std::size_t{1} << n, 0.0);
  a[index] = 1.0;
  return StateVector::from_amplitudes(std::move(a));
}

// |b_{n-1} ... b_0>, written left to right as in ket notation
std::size_t ket(const char* bits) {
  std::size_t i = 0;
  for (const char* p = bits; *p; ++p) i = (i << 1) | static_cast<std::size_t>(*p - '0');
  return i;
}

double dense_e0(const HamiltonianSpec& h) {
  Eigen::SelfAdjointEigenSolver<oracle::Mat> es(oracle::hamiltonian(h));
  return es.eigenvalues()[0];
}

}  // namespace

TEST_CASE("apply_h examples") {
  const StateVector zero = init_zero(4);
  const StateVector a = apply_h(HamiltonianSpec::ising(0.0, 4), zero);
  CHECK(std::abs(a[0] + 4.0) < 1e-15);
  for (std::size_t i = 1; i < 16; ++i) CHECK(a[i] == Amplitude(0.0));

  const StateVector b = apply_h(HamiltonianSpec::ising(1.0, 4), zero);
  CHECK(std::abs(b[0] + 4.0) < 1e-15);
  for (std::size_t i : {1u, 2u, 4u, 8u}) CHECK(std::abs(b[i] - 1.0) < 1e-15);
  double rest = 0.0;
  for (std::size_t i : {3u, 5u, 6u, 7u, 9u, 10u, 11u, 12u, 13u, 14u, 15u}) rest += std::abs(b[i]);
  CHECK(rest == 0.0);

  const StateVector c = apply_h(HamiltonianSpec::xxz(0.5, 4), basis(4, ket("0101")));
  for (const char* k : {"0011", "1001", "0110", "1100"}) CHECK(std::abs(c[ket(k)] - 2.0) < 1e-15);
  CHECK(std::abs(c[ket("0101")] + 2.0) < 1e-15);
  double norm = 0.0;
  for (std::size_t i = 0; i < 16; ++i) norm += std::norm(c[i]);
  CHECK(norm == doctest::Approx(4 * 4 + 4));

  CHECK_THROWS_AS(apply_h(HamiltonianSpec::ising(1.0, 6), zero), std::invalid_argument);
}

TEST_CASE("apply_h matches the dense matrix") {
  for (int n : {2, 3, 4, 5}) {
    for (bool periodic : {true, false}) {
      for (const HamiltonianSpec& h : {HamiltonianSpec::ising(0.7, n, periodic), HamiltonianSpec::xxz(-0.5, n, periodic),
                                       HamiltonianSpec::transverse_field(1.3, n, periodic)}) {
        const StateVector psi = oracle::random_state(n, static_cast<std::uint64_t>(n));
        CHECK(oracle::max_diff(apply_h(h, psi), oracle::hamiltonian(h) * oracle::to_vec(psi)) < 1e-12);
      }
    }
  }
}

TEST_CASE("energy expectation examples") {
  CHECK(energy_expectation(HamiltonianSpec::ising(0.0, 6), init_zero(6)) == doctest::Approx(-6.0));
  for (double lambda : {0.0, 1.0, 10.0}) {
    StateVector plus = init_zero(6);
    for (int q = 0; q < 6; ++q) plus.apply_ry(q, std::numbers::pi / 2);
    CHECK(energy_expectation(HamiltonianSpec::ising(lambda, 6), plus) ==
          doctest::Approx(6 * lambda).epsilon(1e-12));
  }
  const HamiltonianSpec xxz = HamiltonianSpec::xxz(0.5, 4);
  const CircuitSpec spec{4, 2, true};
  const StateVector psi = prepare_state(spec, oracle::random_theta(spec, 0));
  const oracle::Vec v = oracle::to_vec(psi);
  const double ref = (v.adjoint() * oracle::hamiltonian(xxz) * v)(0, 0).real();
  CHECK(std::abs(energy_expectation(xxz, psi) - ref) < 1e-12);
  CHECK(expectation_detail(xxz, psi).imag_residual < 1e-10);
}

TEST_CASE("hermiticity") {
  for (const HamiltonianSpec& h : {HamiltonianSpec::ising(1.5, 6), HamiltonianSpec::xxz(0.5, 6)}) {
    const StateVector phi = oracle::random_state(6, 1);
    const StateVector psi = oracle::random_state(6, 2);
    const Amplitude a = inner_product(phi, apply_h(h, psi));
    const Amplitude b = inner_product(apply_h(h, phi), psi);
    CHECK(std::abs(a - b) < 1e-10);
  }
}

TEST_CASE("exact ground examples") {
  CHECK(exact_ground(HamiltonianSpec::ising(0.0, 8), false).e0 == doctest::Approx(-8.0).epsilon(1e-12));
  CHECK(std::abs(exact_ground(HamiltonianSpec::ising(1.0, 8), false).e0 - dense_e0(HamiltonianSpec::ising(1.0, 8))) <
        1e-10);
  CHECK(std::abs(exact_ground(HamiltonianSpec::xxz(0.5, 4), false).e0 - dense_e0(HamiltonianSpec::xxz(0.5, 4))) < 1e-10);
  CHECK_THROWS_AS(exact_ground(HamiltonianSpec::ising(1.0, kExactGroundMaxSites + 1), false), std::invalid_argument);
}

TEST_CASE("lanczos agrees with dense diagonalization") {
  for (int n : {4, 6, 8}) {
    for (const HamiltonianSpec& h : {HamiltonianSpec::ising(1.0, n), HamiltonianSpec::ising(0.5, n),
                                     HamiltonianSpec::xxz(0.5, n), HamiltonianSpec::xxz(-0.5, n)}) {
      const GroundTruth d = dense_ground(h, true);
      const GroundTruth l = lanczos_ground(h, true);
      CHECK(std::abs(d.e0 - l.e0) < 1e-10);
      CHECK(std::abs(d.gap - l.gap) < 1e-6);
      REQUIRE(l.state.has_value());
      CHECK(std::abs(energy_expectation(h, *l.state) - d.e0) < 1e-9);
    }
  }
}

TEST_CASE("variational bound over random ansatz states") {
  const HamiltonianSpec h = HamiltonianSpec::ising(1.0, 6);
  const double e0 = exact_ground(h, false).e0;
  double worst = 1e300;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const CircuitSpec spec{6, static_cast<int>(seed % 4), seed % 2 == 0};
    worst = std::min(worst, energy_expectation(h, prepare_state(spec, oracle::random_theta(spec, seed))) - e0);
  }
  CHECK(worst >= -1e-9);
}

TEST_CASE("ising spin-flip symmetry") {
  // conjugating by prod X flips every Z: the ZZ terms are unchanged, so e0 is too
  const HamiltonianSpec h = HamiltonianSpec::ising(0.8, 6);
  const oracle::Mat hm = oracle::hamiltonian(h);
  oracle::Mat flip = oracle::Mat::Identity(1, 1);
  for (int q = 0; q < 6; ++q) flip = oracle::kron(flip, oracle::pauli_x());
  Eigen::SelfAdjointEigenSolver<oracle::Mat> es(flip * hm * flip);
  CHECK(std::abs(es.eigenvalues()[0] - exact_ground(h, false).e0) < 1e-10);
}

TEST_CASE("xxz ground state has zero magnetization") {
  for (int n : {6, 8}) {
    const GroundTruth g = exact_ground(HamiltonianSpec::xxz(0.5, n), true);
    REQUIRE(g.state.has_value());
    double mz = 0.0;
    for (std::size_t i = 0; i < g.state->dim(); ++i) {
      const int up = n - 2 * std::popcount(i);
      mz += up * std::norm((*g.state)[i]);
    }
    CHECK(std::abs(mz) < 1e-8);
  }
}

TEST_CASE("observable interpolation") {
  const HamiltonianSpec h0 = HamiltonianSpec::transverse_field(1.0, 4);
  const HamiltonianSpec hp = HamiltonianSpec::ising(2.0, 4);
  const StateVector psi = oracle::random_state(4, 3);
  const Observable mid = interpolate(h0, hp, 0.25);
  const double ref = 0.75 * energy_expectation(h0, psi) + 0.25 * energy_expectation(hp, psi);
  CHECK(mid.expectation(psi) == doctest::Approx(ref).epsilon(1e-12));
  CHECK_THROWS_AS(interpolate(h0, hp, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(interpolate(h0, HamiltonianSpec::ising(2.0, 6), 0.5), std::invalid_argument);
}
