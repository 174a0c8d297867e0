#pragma once

#include "featimp/data_matrix.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace featimp {

/// How the driver column is rescaled before it enters the probability formula.
enum class DriverScaling { zscore, minmax };

/// Severity-driven MAR mechanism: every target cell in row i is masked
/// independently with p_i = clamp(base_rate + sign * slope * d_i, 0, 1), where
/// d_i is the rescaled driver. With sign = -1 a low driver (severe case)
/// raises the missingness probability.
struct MissingnessSpec {
  std::string driver;
  double base_rate = 0.48;
  double slope = 0.06;
  int sign = -1;
  DriverScaling scaling = DriverScaling::zscore;
  /// Empty means every feature-role column.
  std::vector<std::string> targets;
  std::uint64_t seed = 0;
};

struct InjectionOutcome {
  DataMatrix data;   // masked copy
  DataMatrix truth;  // the complete input
  double realized_rate = 0.0;
  std::vector<double> row_probability;
  std::uint64_t seed = 0;
};

double cell_probability(const MissingnessSpec& spec, double driver_scaled);

/// Driver values mapped per `spec.scaling` (sample-sd z-score or [0, 1]).
std::vector<double> scaled_driver(const DataMatrix& m, const MissingnessSpec& spec);

InjectionOutcome inject(const DataMatrix& m, const MissingnessSpec& spec);

/// `n` outcomes with seeds spec.seed + 0, ..., spec.seed + n - 1.
std::vector<InjectionOutcome> replicate(const DataMatrix& m, const MissingnessSpec& spec, std::size_t n);

}  // namespace featimp
