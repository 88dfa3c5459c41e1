#pragma once

#include "qdepth/hamiltonian.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qdepth {

/// One finished VQE run, as stored in the result sinks.
struct RunRecord {
  std::string run_id;
  Model model = Model::Ising;
  double coupling = 0.0;
  int n = 0;
  int l = 0;
  bool wrap_cz = false;
  std::uint64_t seed = 0;
  double energy = 0.0;
  double e0 = 0.0;
  double epsilon = 0.0;
  double entropy_half = 0.0;  // nats
  std::size_t evaluations = 0;
  int cycles = 0;
  bool converged = false;
  double wall_time = 0.0;  // seconds
};

inline constexpr double kEpsilonFloor = 1e-16;

/// ln(max(epsilon, kEpsilonFloor))
double log_epsilon(double epsilon);

enum class FitKind { Exponential, Logarithmic, Power };
std::string_view to_string(FitKind kind);

struct FitResult {
  FitKind kind = FitKind::Exponential;
  double slope = 0.0;      // exponential: d ln(eps)/dl; power: exponent; logarithmic: alpha
  double intercept = 0.0;  // logarithmic: beta
  double residual = 0.0;   // RMS in fit space
  double r_squared = 0.0;
  int points_used = 0;
  bool regime_failure = false;  // exponential fit with a non-negative slope

  /// Correlation length -1/slope of an exponential fit (infinite if flat).
  double xi() const;
};

struct DepthPoint {
  int l = 0;
  double epsilon = 0.0;
};

struct EntropyPoint {
  double argument = 0.0;  // l or l_star
  double entropy = 0.0;   // nats, or any unit: alpha scales with it
};

/// Least squares of ln eps against l. Needs at least 3 points.
FitResult fit_exponential(std::span<const DepthPoint> points);

/// Least squares of ln(1/eps) against ln l. Needs at least 3 points with l >= 1.
FitResult fit_power(std::span<const DepthPoint> points);

/// Least squares of S against ln(argument). Needs at least 3 points.
FitResult fit_entropy_log(std::span<const EntropyPoint> points);

/// Least squares of ln y against ln x (kind Power). All values must be positive.
FitResult fit_loglog(std::span<const double> x, std::span<const double> y);

struct CrossoverReport {
  int n = 0;
  int l_star = 0;
  double jump_magnitude = 0.0;  // decades gained from l_star - 1 to l_star
  bool found = false;           // false: l_star is the last scanned depth
};

/**
 * l_star is the depth with the largest one-step gain in log10(1/eps), provided
 * it reaches `threshold` decades; among equal gains the shallowest wins. Depths
 * must be consecutive (any order).
 */
CrossoverReport detect_crossover(std::span<const DepthPoint> points, int n, double threshold = 1.0);

/// Records matching (model, coupling, n), one per depth: the lowest epsilon.
std::vector<DepthPoint> best_by_depth(std::span<const RunRecord> records, Model model, double coupling,
                                      int n);

/// The record holding the lowest epsilon of the (model, coupling, n, l) cell.
std::optional<RunRecord> best_record(std::span<const RunRecord> records, Model model, double coupling,
                                     int n, int l);

/// max - min of log10 eps over the given sizes at depth l (best record per cell).
double size_spread(std::span<const RunRecord> records, Model model, double coupling, int l,
                   std::span<const int> sizes);

}  // namespace qdepth
