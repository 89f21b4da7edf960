#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace lgn {

enum class NodeOp : uint8_t {
  input,
  const0,
  const1,
  gate2,
  not_op,
  passthrough,
  full_adder,
  half_adder,
  compare_select,
};

const char* node_op_name(NodeOp op);
NodeOp node_op_from_name(const std::string& s);

struct NodeRef {
  uint32_t node = 0;
  uint16_t port = 0;

  bool operator==(const NodeRef&) const = default;
  bool operator<(const NodeRef& o) const {
    return node != o.node ? node < o.node : port < o.port;
  }
};

// Output ports: single-output ops use port 0.  Adders: port 0 = sum,
// port 1 = carry.  compare_select: ports [0,vw) = selected value bits (LSB
// first), ports [vw, vw+iw) = selected index bits (LSB first); inputs are
// ordered value_a, index_a, value_b, index_b.
struct Node {
  NodeOp op = NodeOp::const0;
  uint8_t gate = 0;             // gate2 only
  uint16_t value_width = 0;     // compare_select only
  uint16_t index_width = 0;     // compare_select only
  int32_t stage = 0;
  std::vector<NodeRef> inputs;

  int out_ports() const;
};

struct PipelinePlan {
  int levels_per_stage = 2;  // r: combinational levels packed per stage
  int input_stages = 1;      // c_in
  int output_stages = 1;     // c_out

  void validate() const;
};

// Shared cycle model.  Levels are LUT levels: a 6-LUT absorbs two 2-input
// gate levels, the popcount tree costs 2*(W-5) levels past 31 bits plus
// 2*(W-10) more past 1023 bits (W = sum width), and the comparator tree is
// ceil(log2 C) levels.  The knees were tuned once against the target
// 7..17-cycle envelope for the standard parameter grid; the procedure is
// documented in the README.
struct StageBreakdown {
  int input_stages = 0;
  int logic_stages = 0;
  int adder_stages = 0;
  int cmp_stages = 0;
  int output_stages = 0;
  int logic_levels = 0;
  int adder_levels = 0;
  int cmp_levels = 0;

  int total() const {
    return input_stages + logic_stages + adder_stages + cmp_stages + output_stages;
  }
};

int sum_width(long long n);  // ceil(log2(n+1)), n >= 1
int adder_comb_levels(long long group_size);
StageBreakdown plan_stages(int gate_layers, long long group_size, int class_count,
                           const PipelinePlan& plan);

// Exact FA/HA counts of the weight-queue popcount reduction for n bits.
struct AdderCounts {
  long long full_adders = 0;
  long long half_adders = 0;
  int width = 0;
};
AdderCounts popcount_adder_counts(long long n);

struct Netlist {
  uint32_t input_bits = 0;
  int class_count = 0;
  int group_size = 0;
  int stages = 0;
  PipelinePlan plan;
  std::vector<Node> nodes;
  std::vector<NodeRef> outputs;  // class-index bits, LSB first

  struct Meta {
    long long gates_before = 0;  // gate2 nodes at build time
    long long gates_after = 0;   // gate2 + inverter nodes surviving prune
    int logic_stages = 0;
    int adder_stages = 0;
    int cmp_stages = 0;
  } meta;

  int index_width() const { return int(outputs.size()); }
};

// Checks acyclicity via the inputs-precede-node ordering, port ranges, and
// stage monotonicity along edges.
void validate_netlist(const Netlist& nl);

void to_json(nlohmann::json& j, const Netlist& nl);
void from_json(const nlohmann::json& j, Netlist& nl);

void save_netlist(const std::string& path, const Netlist& nl);
Netlist load_netlist(const std::string& path);

}  // namespace lgn
