#include "qdepth/lemma.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <string>

namespace qdepth {

namespace {

StateVector checked_ground(const HamiltonianSpec& h, double& e0, double& gap) {
  validate(h);
  if (h.sites > kLemmaMaxSites) {
    throw std::invalid_argument("lemma harness: needs at most " + std::to_string(kLemmaMaxSites) +
                                " sites, got " + std::to_string(h.sites));
  }
  GroundTruth gt = exact_ground(h, true);
  if (!(gt.gap >= 1e-8)) {
    throw std::domain_error("lemma harness: ground state is degenerate (gap " + std::to_string(gt.gap) + ")");
  }
  e0 = gt.e0;
  gap = gt.gap;
  return std::move(*gt.state);
}

Eigen::MatrixXcd random_hermitian(std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto d = static_cast<Eigen::Index>(dim);
  Eigen::MatrixXcd m(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      m(i, j) = {re, im};
    }
  }
  return 0.5 * (m + m.adjoint());
}

}  // namespace

LemmaProblem::LemmaProblem(const HamiltonianSpec& h) : h_(h), psi0_(checked_ground(h, e0_, gap_)) {
  reference_energy_ = Observable(h_).expectation(psi0_);
  entropy0_ = half_chain_entropy(psi0_);
}

LemmaProblem::Errors LemmaProblem::errors(std::uint64_t trial_seed, double eps) const {
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw std::invalid_argument("lemma: eps must be finite and >= 0");
  StateVector psi = psi0_;
  if (eps > 0.0) {
    const Eigen::MatrixXcd a = random_hermitian(psi0_.dim(), trial_seed);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a);
    const Eigen::VectorXd& w = es.eigenvalues();
    const double scale = std::max(std::abs(w.minCoeff()), std::abs(w.maxCoeff()));

    const auto d = static_cast<Eigen::Index>(psi0_.dim());
    Eigen::VectorXcd v(d);
    for (Eigen::Index i = 0; i < d; ++i) v[i] = psi0_[static_cast<std::size_t>(i)];
    Eigen::VectorXcd c = es.eigenvectors().adjoint() * v;
    for (Eigen::Index i = 0; i < d; ++i) c[i] *= std::polar(1.0, -eps * w[i] / scale);
    v = es.eigenvectors() * c;
    for (Eigen::Index i = 0; i < d; ++i) psi[static_cast<std::size_t>(i)] = v[i];
  }
  Errors out;
  out.energy_excess = Observable(h_).expectation(psi) - reference_energy_;
  out.energy = std::abs(out.energy_excess);
  out.entropy = std::abs(half_chain_entropy(psi) - entropy0_);
  return out;
}

void validate(const LemmaOptions& options) {
  if (options.trials < 1) throw std::invalid_argument("lemma: trials must be >= 1");
  if (options.epsilons.size() < 2) throw std::invalid_argument("lemma: need at least 2 eps values");
  double lo = options.epsilons.front();
  double hi = lo;
  for (double e : options.epsilons) {
    if (!(e > 0.0) || !std::isfinite(e)) throw std::invalid_argument("lemma: eps values must be positive");
    lo = std::min(lo, e);
    hi = std::max(hi, e);
  }
  if (hi / lo < 100.0 * (1.0 - 1e-12)) {
    throw std::invalid_argument("lemma: eps values span " + std::to_string(std::log10(hi / lo)) +
                                " decades; at least 2 are needed for a slope");
  }
}

namespace {

struct Summary {
  double mean;
  double ci;
};

Summary summarize(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  if (v.size() < 2) return {mean, 0.0};
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  var /= static_cast<double>(v.size() - 1);
  return {mean, 1.96 * std::sqrt(var / static_cast<double>(v.size()))};
}

FitResult pooled(const std::vector<FitResult>& fits, const std::vector<double>& log_eps,
                 const std::vector<std::vector<double>>& log_err) {
  FitResult out;
  out.kind = FitKind::Power;
  std::vector<double> slopes, intercepts;
  for (const auto& f : fits) {
    slopes.push_back(f.slope);
    intercepts.push_back(f.intercept);
  }
  out.slope = summarize(slopes).mean;
  out.intercept = summarize(intercepts).mean;
  double sse = 0.0, sst = 0.0, mean = 0.0;
  std::size_t count = 0;
  for (const auto& row : log_err) {
    for (double y : row) {
      mean += y;
      ++count;
    }
  }
  mean /= static_cast<double>(count);
  for (const auto& row : log_err) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      const double r = row[i] - (out.intercept + out.slope * log_eps[i]);
      sse += r * r;
      sst += (row[i] - mean) * (row[i] - mean);
    }
  }
  out.residual = std::sqrt(sse / static_cast<double>(count));
  out.r_squared = sst > 0.0 ? 1.0 - sse / sst : 1.0;
  out.points_used = static_cast<int>(count);
  return out;
}

}  // namespace

LemmaReport lemma_harness(const HamiltonianSpec& h, const LemmaOptions& options) {
  validate(options);
  const LemmaProblem problem(h);

  LemmaReport report;
  report.e0 = problem.e0();
  report.gap = problem.gap();

  std::vector<double> log_eps;
  for (double e : options.epsilons) log_eps.push_back(std::log(e));
  std::vector<FitResult> energy_fits, entropy_fits;
  std::vector<std::vector<double>> log_energy, log_entropy;
  std::seed_seq base{static_cast<std::uint32_t>(options.seed), static_cast<std::uint32_t>(options.seed >> 32)};
  std::vector<std::uint32_t> seeds(static_cast<std::size_t>(options.trials));
  base.generate(seeds.begin(), seeds.end());

  for (int t = 0; t < options.trials; ++t) {
    std::vector<double> energy, entropy;
    for (double eps : options.epsilons) {
      const auto err = problem.errors(seeds[static_cast<std::size_t>(t)], eps);
      report.samples.push_back({t, eps, err.energy, err.entropy});
      energy.push_back(err.energy);
      entropy.push_back(err.entropy);
    }
    energy_fits.push_back(fit_loglog(options.epsilons, energy));
    entropy_fits.push_back(fit_loglog(options.epsilons, entropy));
    std::vector<double> le, ls;
    for (std::size_t i = 0; i < energy.size(); ++i) {
      le.push_back(std::log(energy[i]));
      ls.push_back(std::log(entropy[i]));
    }
    log_energy.push_back(std::move(le));
    log_entropy.push_back(std::move(ls));
  }

  report.energy = pooled(energy_fits, log_eps, log_energy);
  report.entropy = pooled(entropy_fits, log_eps, log_entropy);
  std::vector<double> es, ss;
  for (const auto& f : energy_fits) es.push_back(f.slope);
  for (const auto& f : entropy_fits) ss.push_back(f.slope);
  report.energy_ci = summarize(es).ci;
  report.entropy_ci = summarize(ss).ci;
  return report;
}

}  // namespace qdepth
