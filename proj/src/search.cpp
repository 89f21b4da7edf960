#include "lgn/search.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "lgn/common.hpp"
#include "lgn/jsonio.hpp"

namespace lgn {

void Budget::validate() const {
  if (lut_budget < 1 || ff_budget < 1) throw std::domain_error("budget: budgets must be positive");
  if (input_pixels < 1) throw std::domain_error("budget: input_pixels must be positive");
  if (class_count < 2) throw std::domain_error("budget: need >= 2 classes");
  if (max_cycles && *max_cycles < 1) throw std::domain_error("budget: max_cycles must be positive");
  if (power_cap_watts && *power_cap_watts <= 0) {
    throw std::domain_error("budget: power cap must be positive");
  }
}

void to_json(nlohmann::json& j, const Budget& b) {
  j = nlohmann::json{{"lut_budget", b.lut_budget},
                     {"ff_budget", b.ff_budget},
                     {"input_pixels", b.input_pixels},
                     {"class_count", b.class_count},
                     {"require_single_slr", b.require_single_slr}};
  if (b.max_cycles) j["max_cycles"] = *b.max_cycles;
  if (b.power_cap_watts) j["power_cap_watts"] = *b.power_cap_watts;
}

void from_json(const nlohmann::json& j, Budget& b) {
  check_keys(j, "budget",
             {"lut_budget", "ff_budget", "max_cycles", "power_cap_watts", "input_pixels",
              "class_count", "require_single_slr"});
  b = Budget{};
  b.lut_budget = j.at("lut_budget").get<long long>();
  b.ff_budget = j.at("ff_budget").get<long long>();
  if (j.contains("max_cycles")) b.max_cycles = j.at("max_cycles").get<int>();
  if (j.contains("power_cap_watts")) b.power_cap_watts = j.at("power_cap_watts").get<double>();
  b.input_pixels = j.at("input_pixels").get<int>();
  if (j.contains("class_count")) b.class_count = j.at("class_count").get<int>();
  if (j.contains("require_single_slr")) {
    b.require_single_slr = j.at("require_single_slr").get<bool>();
  }
  b.validate();
}

void to_json(nlohmann::json& j, const SampleBounds& b) {
  j = nlohmann::json{{"lw_min", b.lw_min},
                     {"lw_max", b.lw_max},
                     {"ld_min", b.ld_min},
                     {"ld_max", b.ld_max},
                     {"b_min", b.b_min},
                     {"b_max", b.b_max},
                     {"allow_front", b.allow_front},
                     {"allow_end", b.allow_end},
                     {"front_min", b.front_min},
                     {"front_max", b.front_max},
                     {"end_fractions", b.end_fractions},
                     {"capped_lw_min", b.capped_lw_min},
                     {"capped_ld_min", b.capped_ld_min},
                     {"capped_ld_max", b.capped_ld_max}};
}

void from_json(const nlohmann::json& j, SampleBounds& b) {
  check_keys(j, "sample bounds",
             {"lw_min", "lw_max", "ld_min", "ld_max", "b_min", "b_max", "allow_front",
              "allow_end", "front_min", "front_max", "end_fractions", "capped_lw_min",
              "capped_ld_min", "capped_ld_max"});
  b = SampleBounds{};
  if (j.contains("lw_min")) b.lw_min = j.at("lw_min").get<int>();
  if (j.contains("lw_max")) b.lw_max = j.at("lw_max").get<int>();
  if (j.contains("ld_min")) b.ld_min = j.at("ld_min").get<int>();
  if (j.contains("ld_max")) b.ld_max = j.at("ld_max").get<int>();
  if (j.contains("b_min")) b.b_min = j.at("b_min").get<int>();
  if (j.contains("b_max")) b.b_max = j.at("b_max").get<int>();
  if (j.contains("allow_front")) b.allow_front = j.at("allow_front").get<bool>();
  if (j.contains("allow_end")) b.allow_end = j.at("allow_end").get<bool>();
  if (j.contains("front_min")) b.front_min = j.at("front_min").get<int>();
  if (j.contains("front_max")) b.front_max = j.at("front_max").get<int>();
  if (j.contains("end_fractions")) b.end_fractions = j.at("end_fractions").get<std::vector<double>>();
  if (j.contains("capped_lw_min")) b.capped_lw_min = j.at("capped_lw_min").get<int>();
  if (j.contains("capped_ld_min")) b.capped_ld_min = j.at("capped_ld_min").get<int>();
  if (j.contains("capped_ld_max")) b.capped_ld_max = j.at("capped_ld_max").get<int>();
}

namespace {

int log_uniform_int(SplitMix64& rng, int lo, int hi) {
  if (lo >= hi) return lo;
  const double u = rng.uniform();
  const double v = std::exp(std::log(double(lo)) + u * (std::log(double(hi)) - std::log(double(lo))));
  return std::clamp(int(std::lround(v)), lo, hi);
}

int uniform_int(SplitMix64& rng, int lo, int hi) {
  if (lo >= hi) return lo;
  return lo + int(rng.bounded(uint64_t(hi - lo + 1)));
}

}  // namespace

std::vector<ArchitectureSpec> sample_space(const SampleBounds& bounds, int n, uint64_t seed,
                                           int input_pixels, int class_count) {
  if (n < 1) throw std::domain_error("sample_space: n must be >= 1");
  if (bounds.lw_min > bounds.lw_max || bounds.ld_min > bounds.ld_max ||
      bounds.b_min > bounds.b_max) {
    throw std::domain_error("sample_space: empty bounds");
  }
  SplitMix64 rng(seed ^ 0xa5a5a5a5deadbeefULL);
  std::vector<ArchitectureSpec> out;
  out.reserve(n);
  int variants = 1;
  if (bounds.allow_front) ++variants;
  if (bounds.allow_end) ++variants;
  if (bounds.allow_front && bounds.allow_end) ++variants;
  while (int(out.size()) < n) {
    ArchitectureSpec s;
    const int v = uniform_int(rng, 0, variants - 1);
    const bool front = bounds.allow_front && (v == 1 || v == 3);
    const bool end = (bounds.allow_end && v == 2) || v == 3;
    if (front || end) {
      s.layer_width = log_uniform_int(rng, std::max(bounds.capped_lw_min, bounds.lw_min),
                                      bounds.lw_max);
      s.depth = uniform_int(rng, bounds.capped_ld_min, bounds.capped_ld_max);
      if (front) s.front_width = uniform_int(rng, bounds.front_min, bounds.front_max);
      if (end && !bounds.end_fractions.empty()) {
        s.end_fraction =
            bounds.end_fractions[rng.bounded(uint64_t(bounds.end_fractions.size()))];
      }
    } else {
      s.layer_width = log_uniform_int(rng, bounds.lw_min, bounds.lw_max);
      s.depth = uniform_int(rng, bounds.ld_min, bounds.ld_max);
    }
    s.bit_depth = uniform_int(rng, bounds.b_min, bounds.b_max);
    s.class_count = class_count;
    s.input_bits = input_pixels * s.bit_depth;
    s.wiring_seed = rng.next();
    try {
      s.validate();
    } catch (const std::domain_error&) {
      continue;  // resample anything the half-width rule rejects
    }
    out.push_back(std::move(s));
  }
  return out;
}

double proxy_score(const ArchitectureSpec& spec, const ScoreWeights& w) {
  spec.validate();
  return w.w_gates * std::log(double(spec.total_gates())) + w.w_depth * double(spec.depth) -
         w.w_bits * double(spec.bit_depth - 1);
}

void to_json(nlohmann::json& j, const CandidateReport& c) {
  j = nlohmann::json{{"spec", c.spec},
                     {"estimate", c.estimate},
                     {"proxy_score", c.proxy},
                     {"feasible", c.feasible},
                     {"spec_hash", spec_hash(c.spec)}};
  if (c.trained_accuracy) j["trained_accuracy"] = *c.trained_accuracy;
}

void SearchConfig::validate() const {
  if (samples < 1) throw std::domain_error("search: samples must be >= 1");
  if (chains < 0 || steps_per_chain < 0) throw std::domain_error("search: bad chain config");
  if (lambda_lend < 0) throw std::domain_error("search: lambda must be >= 0");
}

void to_json(nlohmann::json& j, const SearchConfig& c) {
  j = nlohmann::json{{"samples", c.samples},
                     {"chains", c.chains},
                     {"steps_per_chain", c.steps_per_chain},
                     {"lambda_lend", c.lambda_lend},
                     {"seed", c.seed},
                     {"weights",
                      {{"w_gates", c.weights.w_gates},
                       {"w_depth", c.weights.w_depth},
                       {"w_bits", c.weights.w_bits}}},
                     {"bounds", c.bounds},
                     {"parallel", c.parallel}};
}

void from_json(const nlohmann::json& j, SearchConfig& c) {
  check_keys(j, "search config",
             {"samples", "chains", "steps_per_chain", "lambda_lend", "seed", "weights",
              "bounds", "parallel"});
  c = SearchConfig{};
  if (j.contains("samples")) c.samples = j.at("samples").get<int>();
  if (j.contains("chains")) c.chains = j.at("chains").get<int>();
  if (j.contains("steps_per_chain")) c.steps_per_chain = j.at("steps_per_chain").get<int>();
  if (j.contains("lambda_lend")) c.lambda_lend = j.at("lambda_lend").get<double>();
  if (j.contains("seed")) c.seed = j.at("seed").get<uint64_t>();
  if (j.contains("weights")) {
    const auto& w = j.at("weights");
    check_keys(w, "score weights", {"w_gates", "w_depth", "w_bits"});
    if (w.contains("w_gates")) c.weights.w_gates = w.at("w_gates").get<double>();
    if (w.contains("w_depth")) c.weights.w_depth = w.at("w_depth").get<double>();
    if (w.contains("w_bits")) c.weights.w_bits = w.at("w_bits").get<double>();
  }
  if (j.contains("bounds")) c.bounds = j.at("bounds").get<SampleBounds>();
  if (j.contains("parallel")) c.parallel = j.at("parallel").get<bool>();
  c.validate();
}

bool feasible_under(const ResourceEstimate& e, const Budget& b) {
  long long lut_limit = b.lut_budget;
  if (b.require_single_slr) lut_limit = std::min(lut_limit, kSlrLuts);
  if (e.lut_total > lut_limit) return false;
  if (e.lut_total > kDeviceLuts) return false;
  if (e.ff_total > b.ff_budget) return false;
  if (b.max_cycles && e.cycles > *b.max_cycles) return false;
  if (b.power_cap_watts && e.power_watts > *b.power_cap_watts) return false;
  return true;
}

bool dominates(const CandidateReport& a, const CandidateReport& b) {
  const bool ge = a.proxy >= b.proxy && a.estimate.lut_total <= b.estimate.lut_total &&
                  a.estimate.cycles <= b.estimate.cycles;
  const bool strict = a.proxy > b.proxy || a.estimate.lut_total < b.estimate.lut_total ||
                      a.estimate.cycles < b.estimate.cycles;
  return ge && strict;
}

namespace {

struct Mutator {
  const SampleBounds& bounds;
  SplitMix64& rng;

  bool apply(ArchitectureSpec& s) const {
    const bool capped = s.front_width.has_value() || s.end_fraction.has_value();
    switch (rng.bounded(6)) {
      case 0: {  // depth +-1
        const int lo = capped ? bounds.capped_ld_min : bounds.ld_min;
        const int hi = capped ? bounds.capped_ld_max : bounds.ld_max;
        s.depth = std::clamp(s.depth + (rng.bounded(2) ? 1 : -1), lo, hi);
        break;
      }
      case 1:  // bit depth +-1 (input bits follow)
        s.bit_depth = std::clamp(s.bit_depth + (rng.bounded(2) ? 1 : -1), bounds.b_min,
                                 bounds.b_max);
        break;
      case 2: {  // width */1.25
        const int lo = capped ? std::max(bounds.capped_lw_min, bounds.lw_min) : bounds.lw_min;
        const double f = rng.bounded(2) ? 1.25 : 0.8;
        s.layer_width = std::clamp(int(std::lround(double(s.layer_width) * f)), lo, bounds.lw_max);
        break;
      }
      case 3: {  // toggle / resample front cap
        if (!bounds.allow_front) return false;
        if (s.front_width) {
          s.front_width.reset();
        } else {
          s.front_width = bounds.front_min +
                          int(rng.bounded(uint64_t(bounds.front_max - bounds.front_min + 1)));
        }
        break;
      }
      case 4: {  // toggle / resample end cap
        if (!bounds.allow_end || bounds.end_fractions.empty()) return false;
        if (s.end_fraction) {
          s.end_fraction.reset();
        } else {
          s.end_fraction = bounds.end_fractions[rng.bounded(uint64_t(bounds.end_fractions.size()))];
        }
        break;
      }
      case 5:  // flip end fraction between the allowed values
        if (!s.end_fraction || bounds.end_fractions.size() < 2) return false;
        s.end_fraction =
            bounds.end_fractions[rng.bounded(uint64_t(bounds.end_fractions.size()))];
        break;
    }
    // caps require the capped sub-ranges
    if (s.front_width || s.end_fraction) {
      s.layer_width = std::max(s.layer_width, bounds.capped_lw_min);
      s.depth = std::clamp(s.depth, bounds.capped_ld_min, bounds.capped_ld_max);
    }
    return true;
  }
};

}  // namespace

SearchOutcome search(const Budget& budget, const SearchConfig& cfg, const CalibrationParams& cal,
                     const PipelinePlan& plan) {
  budget.validate();
  cfg.validate();
  cal.validate();
  plan.validate();

  SearchOutcome out;
  auto evaluate = [&](const ArchitectureSpec& s) {
    CandidateReport r;
    r.spec = s;
    r.estimate = estimate(s, cal, plan);
    r.proxy = proxy_score(s, cfg.weights);
    r.feasible = feasible_under(r.estimate, budget);
    return r;
  };
  auto penalized = [&](const CandidateReport& r) {
    return r.proxy - cfg.lambda_lend * double(r.spec.padded_end_width());
  };

  const auto samples =
      sample_space(cfg.bounds, cfg.samples, cfg.seed, budget.input_pixels, budget.class_count);
  std::vector<CandidateReport> reports;
  reports.reserve(samples.size());
  for (const auto& s : samples) reports.push_back(evaluate(s));
  out.evaluated = reports.size();

  std::vector<CandidateReport> feasible;
  long long best_overage = -1;
  for (const auto& r : reports) {
    if (r.feasible) {
      feasible.push_back(r);
    } else {
      long long lut_limit = budget.lut_budget;
      if (budget.require_single_slr) lut_limit = std::min(lut_limit, kSlrLuts);
      const long long over = std::max(r.estimate.lut_total - lut_limit,
                                      r.estimate.ff_total - budget.ff_budget);
      if (best_overage < 0 || over < best_overage) {
        best_overage = over;
        NearMiss miss;
        miss.spec = r.spec;
        miss.estimate = r.estimate;
        miss.reason = "lut_total " + std::to_string(r.estimate.lut_total) + " vs limit " +
                      std::to_string(lut_limit) + ", ff_total " +
                      std::to_string(r.estimate.ff_total) + " vs " +
                      std::to_string(budget.ff_budget);
        if (budget.max_cycles && r.estimate.cycles > *budget.max_cycles) {
          miss.reason += ", cycles " + std::to_string(r.estimate.cycles) + " vs " +
                         std::to_string(*budget.max_cycles);
        }
        out.nearest_miss = std::move(miss);
      }
    }
  }
  out.feasible_seen = feasible.size();

  // The returned set is down-selected from the search trace: chain starting
  // points (the best feasible samples under the penalized score) plus every
  // accepted hill-climb state.  With no chains configured, every feasible
  // sample is eligible instead.
  std::vector<CandidateReport> pool;
  if (!feasible.empty()) {
    std::stable_sort(feasible.begin(), feasible.end(), [&](const auto& a, const auto& b) {
      return penalized(a) > penalized(b);
    });
    if (cfg.chains < 1 || cfg.steps_per_chain < 1) pool = feasible;
    for (int chain = 0; chain < cfg.chains; ++chain) {
      SplitMix64 rng(cfg.seed * 0x2545f4914f6cdd1dULL + uint64_t(chain) * 977 + 13);
      CandidateReport cur = feasible[std::size_t(chain) % feasible.size()];
      pool.push_back(cur);
      for (int step = 0; step < cfg.steps_per_chain; ++step) {
        ArchitectureSpec cand = cur.spec;
        Mutator m{cfg.bounds, rng};
        if (!m.apply(cand)) continue;
        cand.input_bits = budget.input_pixels * cand.bit_depth;
        try {
          cand.validate();
        } catch (const std::domain_error&) {
          continue;
        }
        CandidateReport next = evaluate(cand);
        if (next.feasible && penalized(next) > penalized(cur)) {
          cur = next;
          pool.push_back(cur);
        }
      }
    }
  }

  // Dedup by spec hash, then Pareto-filter.
  std::map<std::string, CandidateReport> uniq;
  for (auto& r : pool) uniq.emplace(spec_hash(r.spec), r);
  std::vector<CandidateReport> all;
  for (auto& [h, r] : uniq) all.push_back(std::move(r));
  for (const auto& a : all) {
    bool dominated = false;
    for (const auto& b : all) {
      if (&a != &b && dominates(b, a)) {
        dominated = true;
        break;
      }
    }
    if (!dominated) out.pareto.push_back(a);
  }
  std::stable_sort(out.pareto.begin(), out.pareto.end(),
                   [](const auto& a, const auto& b) { return a.proxy > b.proxy; });
  return out;
}

CalibrationParams refine_with_measurements(const CalibrationParams& base,
                                           const std::vector<Measurement>& measured,
                                           const PipelinePlan& plan) {
  if (measured.size() < 2) {
    throw std::domain_error("refine_with_measurements: need at least 2 measurements");
  }
  base.validate();

  // LUT side: y - alpha_in*bits - lut_sum = u*gates + delta.
  {
    std::vector<std::pair<double, double>> pts;
    for (const auto& m : measured) {
      const double known = base.alpha_in * double(m.spec.input_bits) +
                           double(lut_sum_cost(m.spec.padded_end_width(), m.spec.class_count));
      pts.push_back({double(m.spec.total_gates()), double(m.lut_synth) - known});
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = double(pts.size());
    for (auto& [x, y] : pts) {
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double det = n * sxx - sx * sx;
    if (std::abs(det) < 1e-9 * std::max(1.0, sxx)) {
      throw std::domain_error("refine_with_measurements: degenerate LUT fit "
                              "(gate counts do not vary)");
    }
    const double u = (n * sxy - sx * sy) / det;
    const double delta = (sy - u * sx) / n;
    if (u <= 0) throw std::domain_error("refine_with_measurements: non-positive packing fit");
    CalibrationParams next = base;
    next.survival = std::min(1.0, u * base.packing_density);
    next.delta_const = std::max(0.0, delta);

    // FF side: ff - flight = ff_in*bits + ff_group*l_end (2-var normal eqs).
    double a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0;
    bool have_ff = false;
    for (const auto& m : measured) {
      if (m.ff_synth <= 0) continue;
      have_ff = true;
      const auto sb = plan_stages(int(m.spec.layer_widths().size()), m.spec.group_size(),
                                  m.spec.class_count, plan);
      const double flight = double(m.spec.class_count) *
                            (sum_width(m.spec.group_size()) + 2) *
                            (sb.adder_stages + sb.cmp_stages);
      const double x1 = double(m.spec.input_bits);
      const double x2 = double(m.spec.padded_end_width());
      const double y = double(m.ff_synth) - flight;
      a11 += x1 * x1;
      a12 += x1 * x2;
      a22 += x2 * x2;
      b1 += x1 * y;
      b2 += x2 * y;
    }
    if (have_ff) {
      const double det2 = a11 * a22 - a12 * a12;
      if (std::abs(det2) > 1e-9 * std::max(1.0, a11 * a22)) {
        const double ff_in = (b1 * a22 - b2 * a12) / det2;
        const double ff_group = (a11 * b2 - a12 * b1) / det2;
        if (ff_in >= 0 && ff_group >= 0) {
          next.ff_per_input_bit = ff_in;
          next.ff_per_group_bit = ff_group;
        }
      }
    }
    next.validate();
    return next;
  }
}

}  // namespace lgn
