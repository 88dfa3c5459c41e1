#include "qdepth/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace qdepth {

std::string_view to_string(LbfgsStatus status) {
  switch (status) {
    case LbfgsStatus::GradientConverged:
      return "gradient-converged";
    case LbfgsStatus::FunctionConverged:
      return "function-converged";
    case LbfgsStatus::MaxIterations:
      return "max-iterations";
    case LbfgsStatus::LineSearchFailed:
      return "line-search-failed";
    case LbfgsStatus::BudgetExhausted:
      return "budget-exhausted";
  }
  return "unknown";
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double inf_norm(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

struct Point {
  double step;
  double value;
  double slope;  // directional derivative
};

// Minimizer of the cubic through (a, fa, da) and (b, fb, db), clamped to the
// interior of [lo, hi]; falls back to bisection.
double cubic_step(const Point& a, const Point& b) {
  const double lo = std::min(a.step, b.step);
  const double hi = std::max(a.step, b.step);
  const double d1 = a.slope + b.slope - 3.0 * (a.value - b.value) / (a.step - b.step);
  const double disc = d1 * d1 - a.slope * b.slope;
  double t = 0.5 * (lo + hi);
  if (disc >= 0.0) {
    const double d2 = std::copysign(std::sqrt(disc), b.step - a.step);
    const double denom = b.slope - a.slope + 2.0 * d2;
    if (denom != 0.0) {
      const double cand = b.step - (b.step - a.step) * (b.slope + d2 - d1) / denom;
      if (std::isfinite(cand)) t = cand;
    }
  }
  const double margin = 0.1 * (hi - lo);
  return std::clamp(t, lo + margin, hi - margin);
}

class Evaluator {
 public:
  Evaluator(const GradientObjective& f, std::size_t n, std::size_t budget)
      : f_(f), grad_(n), budget_(budget) {}

  bool exhausted() const { return budget_ != 0 && count_ >= budget_; }
  std::size_t count() const { return count_; }

  // Evaluates at x0 + t d; fills trial_ and grad_.
  Point probe(std::span<const double> x0, std::span<const double> d, double t) {
    trial_.resize(x0.size());
    for (std::size_t i = 0; i < x0.size(); ++i) trial_[i] = x0[i] + t * d[i];
    const double v = f_(trial_, grad_);
    ++count_;
    return {t, v, dot(grad_, d)};
  }

  const std::vector<double>& trial() const { return trial_; }
  const std::vector<double>& grad() const { return grad_; }

  double full(std::span<const double> x, std::span<double> g) {
    ++count_;
    return f_(x, g);
  }

 private:
  const GradientObjective& f_;
  std::vector<double> trial_;
  std::vector<double> grad_;
  std::size_t budget_;
  std::size_t count_ = 0;
};

struct LineSearchOutcome {
  bool ok;
  Point best;
  std::vector<double> x;
  std::vector<double> g;
};

LineSearchOutcome strong_wolfe(Evaluator& ev, std::span<const double> x0, double f0,
                               double slope0, std::span<const double> d, double initial,
                               const LbfgsOptions& opt) {
  const Point origin{0.0, f0, slope0};
  Point prev = origin;
  Point lo{}, hi{};
  bool zooming = false;
  double t = initial;

  LineSearchOutcome best{false, origin, {}, {}};
  auto remember = [&](const Point& p) {
    if (p.value < best.best.value && p.value <= f0 + opt.armijo * p.step * slope0) {
      best.ok = true;
      best.best = p;
      best.x = ev.trial();
      best.g = ev.grad();
    }
  };

  for (int k = 0; k < opt.max_line_search && !ev.exhausted(); ++k) {
    const Point p = ev.probe(x0, d, t);
    if (!std::isfinite(p.value)) {
      t = 0.5 * (zooming ? lo.step + t : prev.step + t);
      continue;
    }
    const bool armijo_fails = p.value > f0 + opt.armijo * t * slope0;
    if (!zooming) {
      if (armijo_fails || (k > 0 && p.value >= prev.value)) {
        lo = prev;
        hi = p;
        zooming = true;
      } else {
        remember(p);
        if (std::abs(p.slope) <= -opt.curvature * slope0) return best;
        if (p.slope >= 0.0) {
          lo = p;
          hi = prev;
          zooming = true;
        } else {
          prev = p;
          t = std::min(4.0 * t, 1e6);
          continue;
        }
      }
    } else {
      if (armijo_fails || p.value >= lo.value) {
        hi = p;
      } else {
        remember(p);
        if (std::abs(p.slope) <= -opt.curvature * slope0) return best;
        if (p.slope * (hi.step - lo.step) >= 0.0) hi = lo;
        lo = p;
      }
    }
    if (std::abs(hi.step - lo.step) < 1e-14 * std::max(1.0, std::abs(lo.step))) break;
    t = cubic_step(lo, hi);
  }
  return best;
}

}  // namespace

LbfgsResult lbfgs_minimize(const GradientObjective& f, std::vector<double> x0,
                           const LbfgsOptions& options) {
  if (options.memory < 1) throw std::invalid_argument("lbfgs: memory must be positive");
  const std::size_t n = x0.size();
  LbfgsResult result;
  result.x = std::move(x0);
  if (n == 0) {
    std::vector<double> none;
    result.value = f(result.x, none);
    result.evaluations = 1;
    result.status = LbfgsStatus::GradientConverged;
    return result;
  }

  Evaluator ev(f, n, options.max_evaluations);
  std::vector<double> g(n);
  result.value = ev.full(result.x, g);

  std::deque<std::vector<double>> s_hist;
  std::deque<std::vector<double>> y_hist;
  std::deque<double> rho_hist;
  std::vector<double> d(n);
  std::vector<double> alpha(static_cast<std::size_t>(options.memory));

  result.status = LbfgsStatus::MaxIterations;
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    if (inf_norm(g) <= options.gradient_tolerance) {
      result.status = LbfgsStatus::GradientConverged;
      break;
    }
    if (ev.exhausted()) {
      result.status = LbfgsStatus::BudgetExhausted;
      break;
    }

    // two-loop recursion: d = -H g
    for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
    const std::size_t m = s_hist.size();
    for (std::size_t j = m; j-- > 0;) {
      alpha[j] = rho_hist[j] * dot(s_hist[j], d);
      for (std::size_t i = 0; i < n; ++i) d[i] -= alpha[j] * y_hist[j][i];
    }
    if (m > 0) {
      const double gamma = dot(s_hist.back(), y_hist.back()) / dot(y_hist.back(), y_hist.back());
      for (double& v : d) v *= gamma;
    }
    for (std::size_t j = 0; j < m; ++j) {
      const double beta = rho_hist[j] * dot(y_hist[j], d);
      for (std::size_t i = 0; i < n; ++i) d[i] += (alpha[j] - beta) * s_hist[j][i];
    }

    double slope = dot(g, d);
    if (!(slope < 0.0)) {
      // Curvature history went bad; restart from steepest descent.
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
      slope = dot(g, d);
    }

    const double initial = m == 0 ? std::min(1.0, 1.0 / std::max(inf_norm(g), 1e-300)) : 1.0;
    LineSearchOutcome ls = strong_wolfe(ev, result.x, result.value, slope, d, initial, options);
    if (!ls.ok && m > 0 && !ev.exhausted()) {
      // retry once along steepest descent with a fresh history
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
      slope = dot(g, d);
      ls = strong_wolfe(ev, result.x, result.value, slope, d,
                        std::min(1.0, 1.0 / std::max(inf_norm(g), 1e-300)), options);
    }
    if (!ls.ok) {
      result.status = ev.exhausted() ? LbfgsStatus::BudgetExhausted : LbfgsStatus::LineSearchFailed;
      break;
    }

    std::vector<double> s(n);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = ls.x[i] - result.x[i];
      y[i] = ls.g[i] - g[i];
    }
    const double previous = result.value;
    result.x = ls.x;
    g = ls.g;
    result.value = ls.best.value;
    result.iterations = iter + 1;

    const double sy = dot(s, y);
    if (sy > 1e-16 * std::sqrt(dot(s, s) * dot(y, y))) {
      if (s_hist.size() == static_cast<std::size_t>(options.memory)) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
    }

    if (previous - result.value <= options.function_tolerance * std::max(1.0, std::abs(result.value))) {
      result.status = LbfgsStatus::FunctionConverged;
      break;
    }
  }
  result.evaluations = ev.count();
  return result;
}

}  // namespace qdepth
