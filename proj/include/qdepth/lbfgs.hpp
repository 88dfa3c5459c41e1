#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace qdepth {

/// Returns f(x) and writes the gradient into `grad`.
using GradientObjective = std::function<double(std::span<const double> x, std::span<double> grad)>;

struct LbfgsOptions {
  int memory = 10;
  int max_iterations = 500;
  double gradient_tolerance = 1e-9;   // on the infinity norm
  double function_tolerance = 1e-15;  // relative decrease per iteration
  int max_line_search = 40;
  double armijo = 1e-4;
  double curvature = 0.9;
  // Objective calls allowed; 0 means unlimited.
  std::size_t max_evaluations = 0;
};

enum class LbfgsStatus {
  GradientConverged,
  FunctionConverged,
  MaxIterations,
  LineSearchFailed,
  BudgetExhausted,
};

std::string_view to_string(LbfgsStatus status);

struct LbfgsResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  std::size_t evaluations = 0;
  LbfgsStatus status = LbfgsStatus::MaxIterations;
};

/**
 * Limited-memory BFGS with a strong-Wolfe line search.
 *
 * Every accepted step satisfies the sufficient-decrease condition, so the
 * returned value never exceeds f(x0).
 */
LbfgsResult lbfgs_minimize(const GradientObjective& f, std::vector<double> x0,
                           const LbfgsOptions& options = {});

}  // namespace qdepth
