#include "lgn/netlist.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "lgn/jsonio.hpp"

namespace lgn {

const char* node_op_name(NodeOp op) {
  switch (op) {
    case NodeOp::input: return "input";
    case NodeOp::const0: return "const0";
    case NodeOp::const1: return "const1";
    case NodeOp::gate2: return "gate2";
    case NodeOp::not_op: return "not";
    case NodeOp::passthrough: return "passthrough";
    case NodeOp::full_adder: return "full_adder";
    case NodeOp::half_adder: return "half_adder";
    case NodeOp::compare_select: return "compare_select";
  }
  return "?";
}

NodeOp node_op_from_name(const std::string& s) {
  if (s == "input") return NodeOp::input;
  if (s == "const0") return NodeOp::const0;
  if (s == "const1") return NodeOp::const1;
  if (s == "gate2") return NodeOp::gate2;
  if (s == "not") return NodeOp::not_op;
  if (s == "passthrough") return NodeOp::passthrough;
  if (s == "full_adder") return NodeOp::full_adder;
  if (s == "half_adder") return NodeOp::half_adder;
  if (s == "compare_select") return NodeOp::compare_select;
  throw std::domain_error("unknown node op: " + s);
}

int Node::out_ports() const {
  switch (op) {
    case NodeOp::full_adder:
    case NodeOp::half_adder:
      return 2;
    case NodeOp::compare_select:
      return value_width + index_width;
    default:
      return 1;
  }
}

void PipelinePlan::validate() const {
  if (levels_per_stage < 1 || input_stages < 1 || output_stages < 1) {
    throw std::domain_error("pipeline plan values must all be >= 1");
  }
}

int sum_width(long long n) {
  if (n < 1) throw std::domain_error("sum_width needs n >= 1");
  int w = 0;
  while ((1LL << w) < n + 1) ++w;
  return w;
}

int adder_comb_levels(long long group_size) {
  const int w = sum_width(group_size);
  return 2 * std::max(0, w - 5) + 2 * std::max(0, w - 10);
}

StageBreakdown plan_stages(int gate_layers, long long group_size, int class_count,
                           const PipelinePlan& plan) {
  plan.validate();
  if (gate_layers < 1 || group_size < 1 || class_count < 2) {
    throw std::domain_error("plan_stages: bad shape");
  }
  auto ceil_div = [](int a, int b) { return (a + b - 1) / b; };
  StageBreakdown s;
  s.input_stages = plan.input_stages;
  s.output_stages = plan.output_stages;
  s.logic_levels = ceil_div(gate_layers, 2);
  s.adder_levels = adder_comb_levels(group_size);
  s.cmp_levels = sum_width(class_count - 1);  // ceil(log2 C)
  s.logic_stages = ceil_div(s.logic_levels, plan.levels_per_stage);
  s.adder_stages = ceil_div(s.adder_levels, plan.levels_per_stage);
  s.cmp_stages = ceil_div(s.cmp_levels, plan.levels_per_stage);
  return s;
}

AdderCounts popcount_adder_counts(long long n) {
  if (n < 1) throw std::domain_error("popcount_adder_counts needs n >= 1");
  AdderCounts out;
  out.width = sum_width(n);
  long long at_weight = n;
  for (int w = 0; w < out.width; ++w) {
    long long c = at_weight;
    long long carries = 0;
    while (c >= 3) {
      ++out.full_adders;
      c -= 2;
      ++carries;
    }
    if (c == 2) {
      ++out.half_adders;
      c = 1;
      ++carries;
    }
    at_weight = carries;
  }
  return out;
}

void validate_netlist(const Netlist& nl) {
  nl.plan.validate();
  if (nl.class_count < 2) throw std::domain_error("netlist: need >= 2 classes");
  for (std::size_t i = 0; i < nl.nodes.size(); ++i) {
    const Node& n = nl.nodes[i];
    for (const NodeRef& r : n.inputs) {
      if (r.node >= i) {
        throw std::domain_error("netlist: node " + std::to_string(i) +
                                " reads node " + std::to_string(r.node) +
                                " that does not precede it");
      }
      const Node& src = nl.nodes[r.node];
      if (r.port >= src.out_ports()) throw std::domain_error("netlist: bad port reference");
      const bool src_const = src.op == NodeOp::const0 || src.op == NodeOp::const1;
      if (!src_const && src.stage > n.stage) {
        throw std::domain_error("netlist: stage decreases along edge into node " +
                                std::to_string(i));
      }
    }
  }
  for (const NodeRef& r : nl.outputs) {
    if (r.node >= nl.nodes.size()) throw std::domain_error("netlist: output ref out of range");
    if (r.port >= nl.nodes[r.node].out_ports()) throw std::domain_error("netlist: output port");
  }
}

void to_json(nlohmann::json& j, const Netlist& nl) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const Node& n : nl.nodes) {
    nlohmann::json jn;
    jn["op"] = node_op_name(n.op);
    jn["stage"] = n.stage;
    if (n.op == NodeOp::gate2) jn["gate"] = int(n.gate);
    if (n.op == NodeOp::compare_select) {
      jn["vw"] = n.value_width;
      jn["iw"] = n.index_width;
    }
    if (!n.inputs.empty()) {
      nlohmann::json in = nlohmann::json::array();
      for (const NodeRef& r : n.inputs) in.push_back({r.node, r.port});
      jn["in"] = std::move(in);
    }
    nodes.push_back(std::move(jn));
  }
  nlohmann::json outs = nlohmann::json::array();
  for (const NodeRef& r : nl.outputs) outs.push_back({r.node, r.port});
  j = nlohmann::json{{"version", 1},
                     {"kind", "lgn-netlist"},
                     {"input_bits", nl.input_bits},
                     {"class_count", nl.class_count},
                     {"group_size", nl.group_size},
                     {"stages", nl.stages},
                     {"plan",
                      {{"levels_per_stage", nl.plan.levels_per_stage},
                       {"input_stages", nl.plan.input_stages},
                       {"output_stages", nl.plan.output_stages}}},
                     {"meta",
                      {{"gates_before", nl.meta.gates_before},
                       {"gates_after", nl.meta.gates_after},
                       {"logic_stages", nl.meta.logic_stages},
                       {"adder_stages", nl.meta.adder_stages},
                       {"cmp_stages", nl.meta.cmp_stages}}},
                     {"nodes", std::move(nodes)},
                     {"outputs", std::move(outs)}};
}

void from_json(const nlohmann::json& j, Netlist& nl) {
  if (j.value("kind", "") != "lgn-netlist") throw std::domain_error("not a netlist file");
  if (j.value("version", 0) != 1) throw std::domain_error("unsupported netlist version");
  nl = Netlist{};
  nl.input_bits = j.at("input_bits").get<uint32_t>();
  nl.class_count = j.at("class_count").get<int>();
  nl.group_size = j.at("group_size").get<int>();
  nl.stages = j.at("stages").get<int>();
  const auto& jp = j.at("plan");
  nl.plan.levels_per_stage = jp.at("levels_per_stage").get<int>();
  nl.plan.input_stages = jp.at("input_stages").get<int>();
  nl.plan.output_stages = jp.at("output_stages").get<int>();
  const auto& jm = j.at("meta");
  nl.meta.gates_before = jm.at("gates_before").get<long long>();
  nl.meta.gates_after = jm.at("gates_after").get<long long>();
  nl.meta.logic_stages = jm.at("logic_stages").get<int>();
  nl.meta.adder_stages = jm.at("adder_stages").get<int>();
  nl.meta.cmp_stages = jm.at("cmp_stages").get<int>();
  for (const auto& jn : j.at("nodes")) {
    Node n;
    n.op = node_op_from_name(jn.at("op").get<std::string>());
    n.stage = jn.at("stage").get<int32_t>();
    if (n.op == NodeOp::gate2) n.gate = uint8_t(jn.at("gate").get<int>());
    if (n.op == NodeOp::compare_select) {
      n.value_width = jn.at("vw").get<uint16_t>();
      n.index_width = jn.at("iw").get<uint16_t>();
    }
    if (jn.contains("in")) {
      for (const auto& jr : jn.at("in")) {
        n.inputs.push_back(NodeRef{jr.at(0).get<uint32_t>(), jr.at(1).get<uint16_t>()});
      }
    }
    nl.nodes.push_back(std::move(n));
  }
  for (const auto& jr : j.at("outputs")) {
    nl.outputs.push_back(NodeRef{jr.at(0).get<uint32_t>(), jr.at(1).get<uint16_t>()});
  }
  validate_netlist(nl);
}

void save_netlist(const std::string& path, const Netlist& nl) {
  nlohmann::json j;
  to_json(j, nl);
  write_json_atomic(path, j);
}

Netlist load_netlist(const std::string& path) { return read_json(path).get<Netlist>(); }

}  // namespace lgn
