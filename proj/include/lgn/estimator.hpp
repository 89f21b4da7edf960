#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "lgn/arch.hpp"
#include "lgn/netlist.hpp"

namespace lgn {

// Alveo U200 / XCU200: 892k LUTs across three SLRs.
inline constexpr long long kDeviceLuts = 892000;
inline constexpr long long kSlrLuts = kDeviceLuts / 3;

// Calibration constants.  The defaults reproduce the reference device envelopes
// (cycle range, end-cap LUT reduction, power band) for the standard grid and
// are stored in a versioned JSON file; every value is overridable and
// refine_with_measurements re-fits the affine ones from synthesis reports.
struct CalibrationParams {
  int lut_arity = 6;               // k
  double alpha_in = 1.0;           // input-streaming LUTs per input bit
  double delta_const = 2000.0;     // DDR/host interface allowance (LUTs)
  double packing_density = 1.6;    // post-prune gates per LUT
  double survival = 0.21;          // fraction of raw gates surviving pruning
  double ff_per_input_bit = 3.0;
  double ff_per_group_bit = 0.15;  // balancing registers on the logic->adder cut
  double p_static = 12.55;         // watts
  double p_lut = 5.0e-6;           // watts per LUT
  double p_ff = 6.0e-6;            // watts per FF
  double hw_slope = 1.0;           // synth -> hardware affine map
  double hw_intercept = 0.0;

  void validate() const;
};

void to_json(nlohmann::json& j, const CalibrationParams& c);
void from_json(const nlohmann::json& j, CalibrationParams& c);
void save_calibration(const std::string& path, const CalibrationParams& c);
CalibrationParams load_calibration(const std::string& path);

struct ResourceEstimate {
  long long lut_input = 0;
  long long lut_logic = 0;
  long long lut_sum = 0;
  long long lut_delta = 0;
  long long lut_total = 0;
  long long ff_total = 0;
  int cycles = 0;
  double power_watts = 0.0;
  bool fits_slr = false;
  bool fits_device = false;
};

void to_json(nlohmann::json& j, const ResourceEstimate& e);
void from_json(const nlohmann::json& j, ResourceEstimate& e);

// Greedy reverse-topological cone packing over the decision logic (gate2 and
// inverter nodes): each cone keeps at most k leaf signals and absorbs only
// fanout-free predecessors.  Returns the cone (LUT) count.
long long klut_cover(const Netlist& nl, int k);

// Popcount-tree FA/HA cost per class plus the comparator tree:
// (class_count - 1) * (sum_width + 1).
long long lut_sum_cost(long long l_end, int class_count);

int estimate_cycles(const ArchitectureSpec& spec, const PipelinePlan& plan);

ResourceEstimate estimate(const ArchitectureSpec& spec, const CalibrationParams& cal,
                          const PipelinePlan& plan);

// Netlist mode: LUT counts from the actual pruned DAG (cone packing + real
// adder/comparator nodes), FFs from real stage-boundary crossings.
ResourceEstimate estimate(const Netlist& nl, const CalibrationParams& cal);

// Least-squares affine fit hardware = slope * synth + intercept.
std::pair<double, double> calibrate_hw(const std::vector<std::pair<double, double>>& pairs);

// Applies the stored synth->hardware map.
inline double predict_hw(const CalibrationParams& cal, double synth_count) {
  return cal.hw_slope * synth_count + cal.hw_intercept;
}

// Cycle counts for a sweep of end-layer widths at a fixed reference depth.
std::vector<int> estimate_cycles_curve(const std::vector<long long>& l_end_values,
                                       const PipelinePlan& plan, int class_count = 10,
                                       int reference_depth = 4);

}  // namespace lgn
