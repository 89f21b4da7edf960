#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lgn/arch.hpp"
#include "lgn/estimator.hpp"

namespace lgn {

// Pearson correlation; throws on length mismatch, n < 2, or zero variance.
double pearson(const std::vector<double>& x, const std::vector<double>& y);

struct GridRow {
  ArchitectureSpec spec;
  ResourceEstimate est;
  std::string study;
  std::optional<double> accuracy;
};

// Canonical parameter grid: doubling-ladder baseline widths at depths 1..8
// and b in {1,2,4,8}, plus end/front/dual-capped variants over the capped
// sub-ranges (L_W >= 8000, L_D 3..6).
std::vector<ArchitectureSpec> table1_grid(int input_pixels = 784, int class_count = 10,
                                          uint64_t wiring_seed = 1);

std::vector<GridRow> estimate_grid(const std::vector<ArchitectureSpec>& specs,
                                   const CalibrationParams& cal, const PipelinePlan& plan,
                                   bool parallel = true);

// Correlation of {lut_total, ff_total, cycles} against the design parameters
// {b, #bits, L_D, L_W, L_end, #Gates} over the baseline + end-cap rows.
struct CorrelationReport {
  std::vector<std::string> metrics;
  std::vector<std::string> params;
  std::vector<std::vector<double>> matrix;  // metrics x params
  double at(const std::string& metric, const std::string& param) const;
};
CorrelationReport correlation_matrix(const std::vector<GridRow>& rows);

// Mean +- std of per-pair deltas against matched baselines (same L_W, L_D,
// b, seed), bucketed by (f_end, L_front) by cap configuration.
struct CapCell {
  double mean = 0.0;
  double stddev = 0.0;
  int pairs = 0;
};
struct CapComparison {
  // metric -> f_end label ("-", "0.75", "0.5") -> L_front label ("-", ...)
  std::map<std::string, std::map<std::string, std::map<std::string, CapCell>>> cells;
  std::vector<std::string> warnings;  // unmatched capped rows
};
CapComparison cap_comparison(const std::vector<GridRow>& rows);

std::string grid_csv(const std::vector<GridRow>& rows);
std::vector<GridRow> parse_grid_csv(const std::string& text);
std::string correlation_csv(const CorrelationReport& r);
std::string cap_comparison_csv(const CapComparison& c);

}  // namespace lgn
