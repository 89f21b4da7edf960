#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "lgn/arch.hpp"
#include "lgn/estimator.hpp"

namespace lgn {

struct Budget {
  long long lut_budget = kDeviceLuts;
  long long ff_budget = 1800000;
  std::optional<int> max_cycles;
  std::optional<double> power_cap_watts;
  int input_pixels = 784;  // raw features; encoded bits = input_pixels * b
  int class_count = 10;
  bool require_single_slr = false;

  void validate() const;
};

void to_json(nlohmann::json& j, const Budget& b);
void from_json(const nlohmann::json& j, Budget& b);

// Sampling bounds for the standard parameter grid: log-uniform L_W,
// uniform L_D and b, caps drawn from the capped sub-ranges.
struct SampleBounds {
  int lw_min = 1000, lw_max = 64000;
  int ld_min = 1, ld_max = 8;
  int b_min = 1, b_max = 8;
  bool allow_front = true, allow_end = true;
  int front_min = 2000, front_max = 4000;
  std::vector<double> end_fractions{0.5, 0.75};
  int capped_lw_min = 8000;
  int capped_ld_min = 3, capped_ld_max = 6;
};

void to_json(nlohmann::json& j, const SampleBounds& b);
void from_json(const nlohmann::json& j, SampleBounds& b);

std::vector<ArchitectureSpec> sample_space(const SampleBounds& bounds, int n, uint64_t seed,
                                           int input_pixels, int class_count);

struct ScoreWeights {
  double w_gates = 1.0;  // * log(total gates)
  double w_depth = 0.5;  // * L_D
  double w_bits = 0.25;  // * (b - 1), subtracted
};

// Ranking heuristic (not an accuracy prediction): deeper scores higher,
// higher bit depth scores lower, more gates score higher.
double proxy_score(const ArchitectureSpec& spec, const ScoreWeights& w = {});

struct CandidateReport {
  ArchitectureSpec spec;
  ResourceEstimate estimate;
  double proxy = 0.0;
  std::optional<double> trained_accuracy;
  bool feasible = false;
};

void to_json(nlohmann::json& j, const CandidateReport& c);

struct SearchConfig {
  int samples = 256;
  int chains = 8;
  int steps_per_chain = 64;
  double lambda_lend = 1e-4;  // soft constraint: minimize the end-layer width
  uint64_t seed = 0;
  ScoreWeights weights;
  SampleBounds bounds;
  bool parallel = true;

  void validate() const;
};

void to_json(nlohmann::json& j, const SearchConfig& c);
void from_json(const nlohmann::json& j, SearchConfig& c);

struct NearMiss {
  ArchitectureSpec spec;
  ResourceEstimate estimate;
  std::string reason;
};

struct SearchOutcome {
  std::vector<CandidateReport> pareto;  // non-dominated feasible candidates
  std::size_t feasible_seen = 0;
  std::size_t evaluated = 0;
  std::optional<NearMiss> nearest_miss;
};

bool feasible_under(const ResourceEstimate& e, const Budget& b);

// Pareto dominance on (-proxy, lut_total, cycles), all minimized.
bool dominates(const CandidateReport& a, const CandidateReport& b);

SearchOutcome search(const Budget& budget, const SearchConfig& cfg,
                     const CalibrationParams& cal, const PipelinePlan& plan);

// Synthesis measurements for closed-loop recalibration.
struct Measurement {
  ArchitectureSpec spec;
  long long lut_synth = 0;
  long long ff_synth = 0;
};

// Re-fits the LUT packing coefficient and delta plus the FF affine constants
// by least squares; at least two measurements with distinct gate counts.
CalibrationParams refine_with_measurements(const CalibrationParams& base,
                                           const std::vector<Measurement>& measured,
                                           const PipelinePlan& plan = {});

}  // namespace lgn
