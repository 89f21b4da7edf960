#include "lgn/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "lgn/jsonio.hpp"

namespace lgn {

void CalibrationParams::validate() const {
  if (lut_arity < 4 || lut_arity > 6) throw std::domain_error("calibration: k must be 4, 5 or 6");
  const double nonneg[] = {alpha_in,        delta_const, packing_density, survival,
                           ff_per_input_bit, ff_per_group_bit, p_static,  p_lut,
                           p_ff,            hw_slope};
  for (double v : nonneg) {
    if (v < 0) throw std::domain_error("calibration: negative parameter");
  }
  if (packing_density <= 0) throw std::domain_error("calibration: packing density must be > 0");
  if (survival <= 0 || survival > 1) throw std::domain_error("calibration: survival in (0,1]");
}

void to_json(nlohmann::json& j, const CalibrationParams& c) {
  j = nlohmann::json{{"version", 1},
                     {"kind", "lgn-calibration"},
                     {"lut_arity", c.lut_arity},
                     {"alpha_in", c.alpha_in},
                     {"delta_const", c.delta_const},
                     {"packing_density", c.packing_density},
                     {"survival", c.survival},
                     {"ff_per_input_bit", c.ff_per_input_bit},
                     {"ff_per_group_bit", c.ff_per_group_bit},
                     {"p_static", c.p_static},
                     {"p_lut", c.p_lut},
                     {"p_ff", c.p_ff},
                     {"hw_slope", c.hw_slope},
                     {"hw_intercept", c.hw_intercept}};
}

void from_json(const nlohmann::json& j, CalibrationParams& c) {
  check_keys(j, "calibration",
             {"version", "kind", "lut_arity", "alpha_in", "delta_const", "packing_density",
              "survival", "ff_per_input_bit", "ff_per_group_bit", "p_static", "p_lut", "p_ff",
              "hw_slope", "hw_intercept"});
  c = CalibrationParams{};
  if (j.contains("lut_arity")) c.lut_arity = j.at("lut_arity").get<int>();
  if (j.contains("alpha_in")) c.alpha_in = j.at("alpha_in").get<double>();
  if (j.contains("delta_const")) c.delta_const = j.at("delta_const").get<double>();
  if (j.contains("packing_density")) c.packing_density = j.at("packing_density").get<double>();
  if (j.contains("survival")) c.survival = j.at("survival").get<double>();
  if (j.contains("ff_per_input_bit")) c.ff_per_input_bit = j.at("ff_per_input_bit").get<double>();
  if (j.contains("ff_per_group_bit")) {
    c.ff_per_group_bit = j.at("ff_per_group_bit").get<double>();
  }
  if (j.contains("p_static")) c.p_static = j.at("p_static").get<double>();
  if (j.contains("p_lut")) c.p_lut = j.at("p_lut").get<double>();
  if (j.contains("p_ff")) c.p_ff = j.at("p_ff").get<double>();
  if (j.contains("hw_slope")) c.hw_slope = j.at("hw_slope").get<double>();
  if (j.contains("hw_intercept")) c.hw_intercept = j.at("hw_intercept").get<double>();
  c.validate();
}

void save_calibration(const std::string& path, const CalibrationParams& c) {
  nlohmann::json j;
  to_json(j, c);
  write_json_atomic(path, j);
}

CalibrationParams load_calibration(const std::string& path) {
  return read_json(path).get<CalibrationParams>();
}

void to_json(nlohmann::json& j, const ResourceEstimate& e) {
  j = nlohmann::json{{"version", 1},
                     {"kind", "lgn-estimate"},
                     {"lut_input", e.lut_input},
                     {"lut_logic", e.lut_logic},
                     {"lut_sum", e.lut_sum},
                     {"lut_delta", e.lut_delta},
                     {"lut_total", e.lut_total},
                     {"ff_total", e.ff_total},
                     {"cycles", e.cycles},
                     {"power_watts", e.power_watts},
                     {"fits_slr", e.fits_slr},
                     {"fits_device", e.fits_device}};
}

void from_json(const nlohmann::json& j, ResourceEstimate& e) {
  e.lut_input = j.at("lut_input").get<long long>();
  e.lut_logic = j.at("lut_logic").get<long long>();
  e.lut_sum = j.at("lut_sum").get<long long>();
  e.lut_delta = j.at("lut_delta").get<long long>();
  e.lut_total = j.at("lut_total").get<long long>();
  e.ff_total = j.at("ff_total").get<long long>();
  e.cycles = j.at("cycles").get<int>();
  e.power_watts = j.at("power_watts").get<double>();
  e.fits_slr = j.at("fits_slr").get<bool>();
  e.fits_device = j.at("fits_device").get<bool>();
}

long long klut_cover(const Netlist& nl, int k) {
  if (k < 2) throw std::domain_error("klut_cover: k must be >= 2");
  const std::size_t n = nl.nodes.size();
  auto coverable = [&](std::size_t i) {
    return nl.nodes[i].op == NodeOp::gate2 || nl.nodes[i].op == NodeOp::not_op;
  };

  // Total fanout per node (all ports), counting output refs.
  std::vector<uint32_t> fanout(n, 0);
  for (const Node& node : nl.nodes) {
    for (const NodeRef& r : node.inputs) ++fanout[r.node];
  }
  for (const NodeRef& r : nl.outputs) ++fanout[r.node];

  std::vector<char> covered(n, 0);
  long long cones = 0;
  for (std::size_t root = n; root-- > 0;) {
    if (!coverable(root) || covered[root]) continue;
    ++cones;
    covered[root] = 1;
    std::set<NodeRef> leaves(nl.nodes[root].inputs.begin(), nl.nodes[root].inputs.end());
    std::map<uint32_t, uint32_t> inside_refs;  // refs into each node from cone members
    for (const NodeRef& r : nl.nodes[root].inputs) ++inside_refs[r.node];

    for (;;) {
      // Candidate leaves: uncovered gate nodes fully consumed inside the cone.
      std::size_t best = SIZE_MAX;
      std::size_t best_leaves = SIZE_MAX;
      for (const NodeRef& leaf : leaves) {
        const uint32_t cand = leaf.node;
        if (!coverable(cand) || covered[cand]) continue;
        if (inside_refs[cand] != fanout[cand]) continue;
        std::set<NodeRef> next = leaves;
        next.erase(NodeRef{cand, 0});
        for (const NodeRef& r : nl.nodes[cand].inputs) next.insert(r);
        if (next.size() <= std::size_t(k) && next.size() < best_leaves) {
          best_leaves = next.size();
          best = cand;
        }
      }
      if (best == SIZE_MAX) break;
      covered[best] = 1;
      leaves.erase(NodeRef{uint32_t(best), 0});
      for (const NodeRef& r : nl.nodes[best].inputs) {
        leaves.insert(r);
        ++inside_refs[r.node];
      }
    }
  }
  return cones;
}

long long lut_sum_cost(long long l_end, int class_count) {
  if (class_count < 2) throw std::domain_error("lut_sum_cost: need >= 2 classes");
  if (l_end < class_count) throw std::domain_error("lut_sum_cost: L_end below class count");
  const long long group = (l_end + class_count - 1) / class_count;
  const AdderCounts counts = popcount_adder_counts(group);
  const long long per_class = counts.full_adders + counts.half_adders;
  const long long cmp = (long long)(class_count - 1) * (counts.width + 1);
  return per_class * class_count + cmp;
}

int estimate_cycles(const ArchitectureSpec& spec, const PipelinePlan& plan) {
  spec.validate();
  const StageBreakdown sb =
      plan_stages(int(spec.layer_widths().size()), spec.group_size(), spec.class_count, plan);
  return sb.total();
}

ResourceEstimate estimate(const ArchitectureSpec& spec, const CalibrationParams& cal,
                          const PipelinePlan& plan) {
  spec.validate();
  cal.validate();
  plan.validate();

  const long long bits = spec.input_bits;
  const long long gates = spec.total_gates();
  const long long l_end = spec.padded_end_width();
  const long long group = spec.group_size();
  const int w = sum_width(group);
  const StageBreakdown sb =
      plan_stages(int(spec.layer_widths().size()), group, spec.class_count, plan);

  ResourceEstimate e;
  e.lut_input = llround(cal.alpha_in * double(bits));
  e.lut_logic = llround(double(gates) * cal.survival / cal.packing_density);
  e.lut_sum = lut_sum_cost(l_end, spec.class_count);
  e.lut_delta = llround(cal.delta_const);
  e.lut_total = e.lut_input + e.lut_logic + e.lut_sum + e.lut_delta;
  // Input capture dominates FF usage; compacted partial sums cross the adder
  // and comparator boundaries at roughly C*(W+2) bits each.
  e.ff_total = llround(cal.ff_per_input_bit * double(bits) +
                       cal.ff_per_group_bit * double(l_end)) +
               (long long)(spec.class_count) * (w + 2) * (sb.adder_stages + sb.cmp_stages);
  e.cycles = sb.total();
  e.power_watts = cal.p_static + cal.p_lut * double(e.lut_total) + cal.p_ff * double(e.ff_total);
  e.fits_device = e.lut_total <= kDeviceLuts;
  e.fits_slr = e.lut_total <= kSlrLuts;
  return e;
}

ResourceEstimate estimate(const Netlist& nl, const CalibrationParams& cal) {
  validate_netlist(nl);
  cal.validate();

  ResourceEstimate e;
  e.lut_input = llround(cal.alpha_in * double(nl.input_bits));
  e.lut_logic = klut_cover(nl, cal.lut_arity);
  long long sum_luts = 0;
  long long ff = 0;
  auto is_const = [&](uint32_t id) {
    return nl.nodes[id].op == NodeOp::const0 || nl.nodes[id].op == NodeOp::const1;
  };
  std::vector<int> max_delay(nl.nodes.size(), 0);
  for (const Node& n : nl.nodes) {
    switch (n.op) {
      case NodeOp::full_adder:
      case NodeOp::half_adder:
        ++sum_luts;
        break;
      case NodeOp::compare_select:
        sum_luts += n.value_width + 1;
        break;
      default:
        break;
    }
    for (const NodeRef& r : n.inputs) {
      if (is_const(r.node)) continue;
      max_delay[r.node] = std::max(max_delay[r.node], int(n.stage - nl.nodes[r.node].stage));
    }
  }
  for (const NodeRef& r : nl.outputs) {
    if (is_const(r.node)) continue;
    max_delay[r.node] =
        std::max(max_delay[r.node], nl.stages - nl.nodes[r.node].stage + 1);
  }
  for (std::size_t i = 0; i < nl.nodes.size(); ++i) {
    ff += (long long)(max_delay[i]) * nl.nodes[i].out_ports();
  }
  ff += nl.stages;  // valid chain
  e.lut_sum = sum_luts;
  e.lut_delta = llround(cal.delta_const);
  e.lut_total = e.lut_input + e.lut_logic + e.lut_sum + e.lut_delta;
  e.ff_total = ff;
  e.cycles = nl.stages;
  e.power_watts = cal.p_static + cal.p_lut * double(e.lut_total) + cal.p_ff * double(e.ff_total);
  e.fits_device = e.lut_total <= kDeviceLuts;
  e.fits_slr = e.lut_total <= kSlrLuts;
  return e;
}

std::pair<double, double> calibrate_hw(const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.size() < 2) throw std::domain_error("calibrate_hw: need at least 2 pairs");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = double(pairs.size());
  for (const auto& [x, y] : pairs) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double det = n * sxx - sx * sx;
  if (std::abs(det) < 1e-9 * std::max(1.0, sxx)) {
    throw std::domain_error("calibrate_hw: degenerate fit (no variance in synth counts)");
  }
  const double slope = (n * sxy - sx * sy) / det;
  const double intercept = (sy - slope * sx) / n;
  return {slope, intercept};
}

std::vector<int> estimate_cycles_curve(const std::vector<long long>& l_end_values,
                                       const PipelinePlan& plan, int class_count,
                                       int reference_depth) {
  std::vector<int> out;
  out.reserve(l_end_values.size());
  for (long long l_end : l_end_values) {
    if (l_end < 1) throw std::domain_error("estimate_cycles_curve: widths must be positive");
    const long long group = (l_end + class_count - 1) / class_count;
    out.push_back(plan_stages(reference_depth, group, class_count, plan).total());
  }
  return out;
}

}  // namespace lgn
