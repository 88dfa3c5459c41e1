#include "qdepth/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace qdepth {

double log_epsilon(double epsilon) { return std::log(std::max(epsilon, kEpsilonFloor)); }

std::string_view to_string(FitKind kind) {
  switch (kind) {
    case FitKind::Exponential:
      return "exponential";
    case FitKind::Logarithmic:
      return "logarithmic";
    case FitKind::Power:
      return "power";
  }
  return "unknown";
}

double FitResult::xi() const {
  if (slope >= 0.0) return std::numeric_limits<double>::infinity();
  return -1.0 / slope;
}

namespace {

FitResult least_squares(FitKind kind, const std::vector<double>& x, const std::vector<double>& y) {
  const auto count = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= count;
  my /= count;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit: all abscissae are equal");

  FitResult fit;
  fit.kind = kind;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    sse += r * r;
  }
  fit.residual = std::sqrt(sse / count);
  fit.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  fit.points_used = static_cast<int>(x.size());
  return fit;
}

void require_points(std::size_t have, const char* who) {
  if (have < 3) {
    throw std::invalid_argument(std::string(who) + ": need at least 3 points, got " + std::to_string(have));
  }
}

}  // namespace

FitResult fit_exponential(std::span<const DepthPoint> points) {
  require_points(points.size(), "fit_exponential");
  std::vector<double> x, y;
  for (const auto& p : points) {
    x.push_back(p.l);
    y.push_back(log_epsilon(p.epsilon));
  }
  FitResult fit = least_squares(FitKind::Exponential, x, y);
  fit.regime_failure = fit.slope >= 0.0;
  return fit;
}

FitResult fit_power(std::span<const DepthPoint> points) {
  require_points(points.size(), "fit_power");
  std::vector<double> x, y;
  for (const auto& p : points) {
    if (p.l < 1) throw std::invalid_argument("fit_power: depths must be >= 1");
    x.push_back(std::log(static_cast<double>(p.l)));
    y.push_back(-log_epsilon(p.epsilon));
  }
  return least_squares(FitKind::Power, x, y);
}

FitResult fit_entropy_log(std::span<const EntropyPoint> points) {
  require_points(points.size(), "fit_entropy_log");
  std::vector<double> x, y;
  for (const auto& p : points) {
    if (!(p.argument > 0.0)) throw std::invalid_argument("fit_entropy_log: arguments must be positive");
    x.push_back(std::log(p.argument));
    y.push_back(p.entropy);
  }
  return least_squares(FitKind::Logarithmic, x, y);
}

FitResult fit_loglog(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_loglog: size mismatch");
  if (x.size() < 2) throw std::invalid_argument("fit_loglog: need at least 2 points");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("fit_loglog: values must be positive");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return least_squares(FitKind::Power, lx, ly);
}

CrossoverReport detect_crossover(std::span<const DepthPoint> points, int n, double threshold) {
  if (points.empty()) throw std::invalid_argument("detect_crossover: no points");
  std::vector<DepthPoint> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end(), [](const DepthPoint& a, const DepthPoint& b) { return a.l < b.l; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].l != sorted[i - 1].l + 1) {
      throw std::invalid_argument("detect_crossover: depths are not consecutive (" +
                                  std::to_string(sorted[i - 1].l) + " then " + std::to_string(sorted[i].l) +
                                  ")");
    }
  }

  CrossoverReport report;
  report.n = n;
  report.l_star = sorted.back().l;
  double best = -std::numeric_limits<double>::infinity();
  int best_l = sorted.back().l;
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const double gain = (log_epsilon(sorted[i - 1].epsilon) - log_epsilon(sorted[i].epsilon)) / std::log(10.0);
    // near-ties go to the shallower depth
    if (gain > best + 1e-9) {
      best = gain;
      best_l = sorted[i].l;
    }
  }
  if (sorted.size() > 1 && best >= threshold) {
    report.found = true;
    report.l_star = best_l;
    report.jump_magnitude = best;
  } else {
    report.jump_magnitude = std::max(best, 0.0);
    if (sorted.size() == 1) report.jump_magnitude = 0.0;
  }
  return report;
}

namespace {

bool same_cell(const RunRecord& r, Model model, double coupling, int n) {
  return r.model == model && r.coupling == coupling && r.n == n;
}

}  // namespace

std::vector<DepthPoint> best_by_depth(std::span<const RunRecord> records, Model model, double coupling,
                                      int n) {
  std::vector<DepthPoint> out;
  for (const auto& r : records) {
    if (!same_cell(r, model, coupling, n)) continue;
    auto it = std::find_if(out.begin(), out.end(), [&](const DepthPoint& p) { return p.l == r.l; });
    if (it == out.end()) {
      out.push_back({r.l, r.epsilon});
    } else if (r.epsilon < it->epsilon) {
      it->epsilon = r.epsilon;
    }
  }
  std::sort(out.begin(), out.end(), [](const DepthPoint& a, const DepthPoint& b) { return a.l < b.l; });
  return out;
}

std::optional<RunRecord> best_record(std::span<const RunRecord> records, Model model, double coupling,
                                     int n, int l) {
  std::optional<RunRecord> best;
  for (const auto& r : records) {
    if (!same_cell(r, model, coupling, n) || r.l != l) continue;
    if (!best || r.epsilon < best->epsilon) best = r;
  }
  return best;
}

double size_spread(std::span<const RunRecord> records, Model model, double coupling, int l,
                   std::span<const int> sizes) {
  if (sizes.empty()) throw std::invalid_argument("size_spread: no sizes");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int n : sizes) {
    const auto r = best_record(records, model, coupling, n, l);
    if (!r) {
      throw std::invalid_argument("size_spread: no record for n=" + std::to_string(n) + ", l=" +
                                  std::to_string(l));
    }
    const double v = log_epsilon(r->epsilon) / std::log(10.0);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return hi - lo;
}

}  // namespace qdepth
