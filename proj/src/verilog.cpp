#include <algorithm>
#include <cctype>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lgn/compiler.hpp"
#include "lgn/common.hpp"

namespace lgn {

namespace {

std::string itos(long long v) { return std::to_string(v); }

// Expression templates for the 16 gates, operands A and B.
std::string gate_expr(int g, const std::string& a, const std::string& b) {
  switch (g) {
    case 0: return "1'b0";
    case 1: return "~(" + a + " | " + b + ")";
    case 2: return "~" + a + " & " + b;
    case 3: return "~" + a;
    case 4: return a + " & ~" + b;
    case 5: return "~" + b;
    case 6: return a + " ^ " + b;
    case 7: return "~(" + a + " & " + b + ")";
    case 8: return a + " & " + b;
    case 9: return "~(" + a + " ^ " + b + ")";
    case 10: return b;
    case 11: return "~" + a + " | " + b;
    case 12: return a;
    case 13: return a + " | ~" + b;
    case 14: return a + " | " + b;
    case 15: return "1'b1";
  }
  throw std::domain_error("bad gate id");
}

struct Emitter {
  const Netlist& nl;
  std::vector<int> max_delay;          // per node, registers needed on its outputs
  std::vector<uint32_t> input_pin;     // node id -> pin index (input nodes)

  explicit Emitter(const Netlist& n) : nl(n), max_delay(n.nodes.size(), 0) {}

  bool is_const(uint32_t id) const {
    return nl.nodes[id].op == NodeOp::const0 || nl.nodes[id].op == NodeOp::const1;
  }

  std::string base_name(NodeRef r) const {
    const Node& m = nl.nodes[r.node];
    switch (m.op) {
      case NodeOp::const0:
      case NodeOp::const1:
        return "n" + itos(r.node);  // constants need no delay registers
      case NodeOp::full_adder:
      case NodeOp::half_adder:
        return r.port == 0 ? "n" + itos(r.node) : "n" + itos(r.node) + "_c";
      case NodeOp::compare_select:
        if (r.port < m.value_width) {
          return "n" + itos(r.node) + "_v[" + itos(r.port) + "]";
        }
        return "n" + itos(r.node) + "_x[" + itos(r.port - m.value_width) + "]";
      default:
        return "n" + itos(r.node);
    }
  }

  // Signal name with the delay the consumer stage requires; constants are
  // cycle-invariant so they never take registers.
  std::string sig(NodeRef r, int consumer_stage) {
    if (is_const(r.node)) return base_name(r);
    const Node& m = nl.nodes[r.node];
    const int d = consumer_stage - m.stage;
    if (d < 0) throw std::domain_error("emit: stage decreases along an edge");
    if (d == 0) return base_name(r);
    // Delayed copy: for bus ports the register applies to the whole bus.
    std::string nm = "n" + itos(r.node);
    std::string suffix;
    if (m.op == NodeOp::full_adder || m.op == NodeOp::half_adder) {
      if (r.port == 1) nm += "_c";
    } else if (m.op == NodeOp::compare_select) {
      if (r.port < m.value_width) {
        nm += "_v";
        suffix = "[" + itos(r.port) + "]";
      } else {
        nm += "_x";
        suffix = "[" + itos(r.port - m.value_width) + "]";
      }
    }
    return nm + "_r" + itos(d) + suffix;
  }

  void note_delay(NodeRef r, int consumer_stage) {
    if (is_const(r.node)) return;
    const int d = consumer_stage - nl.nodes[r.node].stage;
    if (d > max_delay[r.node]) max_delay[r.node] = d;
  }

  std::string concat(const std::vector<NodeRef>& refs, int consumer_stage) {
    // MSB first.
    std::string s = "{";
    for (std::size_t k = refs.size(); k-- > 0;) {
      s += sig(refs[k], consumer_stage);
      if (k != 0) s += ", ";
    }
    s += "}";
    return s;
  }
};

}  // namespace

std::string emit_verilog(const Netlist& nl, const std::string& module_name) {
  validate_netlist(nl);
  Emitter em(nl);
  const int total = nl.stages;
  const int root_stage = total - nl.plan.output_stages;

  // Pin indices for input nodes, in order of appearance.
  uint32_t pin = 0;
  em.input_pin.assign(nl.nodes.size(), 0);
  for (uint32_t i = 0; i < nl.nodes.size(); ++i) {
    if (nl.nodes[i].op == NodeOp::input) em.input_pin[i] = pin++;
  }
  if (pin != nl.input_bits) throw std::domain_error("emit: input node count != input_bits");

  // Delay bookkeeping.
  for (const Node& n : nl.nodes) {
    for (const NodeRef& r : n.inputs) em.note_delay(r, n.stage);
  }
  for (const NodeRef& r : nl.outputs) em.note_delay(r, root_stage);
  const int in_bus_delay = nl.plan.input_stages - 1;

  const int iw = nl.index_width();
  std::string v;
  v += "// " + module_name + " : pipelined logic-gate-network classifier core\n";
  v += "// lgn-netlist: input_bits=" + itos(nl.input_bits) + " class_count=" +
       itos(nl.class_count) + " group_size=" + itos(nl.group_size) + " stages=" +
       itos(nl.stages) + " levels_per_stage=" + itos(nl.plan.levels_per_stage) +
       " input_stages=" + itos(nl.plan.input_stages) + " output_stages=" +
       itos(nl.plan.output_stages) + " gates_before=" + itos(nl.meta.gates_before) +
       " gates_after=" + itos(nl.meta.gates_after) + " logic_stages=" +
       itos(nl.meta.logic_stages) + " adder_stages=" + itos(nl.meta.adder_stages) +
       " cmp_stages=" + itos(nl.meta.cmp_stages) + "\n";
  v += "module " + module_name + " (\n";
  v += "  input  wire clk,\n";
  v += "  input  wire rst,\n";
  v += "  input  wire in_valid,\n";
  v += "  input  wire [" + itos(int(nl.input_bits) - 1) + ":0] in_bits,\n";
  v += "  output wire out_valid,\n";
  v += "  output wire [" + itos(iw - 1) + ":0] out_class\n";
  v += ");\n\n";

  // Declarations.
  for (uint32_t i = 0; i < nl.nodes.size(); ++i) {
    const Node& n = nl.nodes[i];
    switch (n.op) {
      case NodeOp::full_adder:
      case NodeOp::half_adder:
        v += "  wire n" + itos(i) + ";\n";
        v += "  wire n" + itos(i) + "_c;\n";
        break;
      case NodeOp::compare_select:
        v += "  wire [" + itos(n.value_width - 1) + ":0] n" + itos(i) + "_v;\n";
        v += "  wire [" + itos(n.index_width - 1) + ":0] n" + itos(i) + "_x;\n";
        v += "  wire n" + itos(i) + "_g;\n";
        break;
      default:
        v += "  wire n" + itos(i) + ";\n";
    }
  }
  for (int d = 1; d <= in_bus_delay; ++d) {
    v += "  reg [" + itos(int(nl.input_bits) - 1) + ":0] in_bits_r" + itos(d) + ";\n";
  }
  for (uint32_t i = 0; i < nl.nodes.size(); ++i) {
    const Node& n = nl.nodes[i];
    for (int d = 1; d <= em.max_delay[i]; ++d) {
      switch (n.op) {
        case NodeOp::full_adder:
        case NodeOp::half_adder:
          v += "  reg n" + itos(i) + "_r" + itos(d) + ";\n";
          v += "  reg n" + itos(i) + "_c_r" + itos(d) + ";\n";
          break;
        case NodeOp::compare_select:
          v += "  reg [" + itos(n.value_width - 1) + ":0] n" + itos(i) + "_v_r" + itos(d) + ";\n";
          v += "  reg [" + itos(n.index_width - 1) + ":0] n" + itos(i) + "_x_r" + itos(d) + ";\n";
          break;
        default:
          v += "  reg n" + itos(i) + "_r" + itos(d) + ";\n";
      }
    }
  }
  for (int d = 1; d <= total; ++d) v += "  reg vld_r" + itos(d) + ";\n";
  for (int d = 1; d <= nl.plan.output_stages + 1; ++d) {
    v += "  reg [" + itos(iw - 1) + ":0] outbuf_r" + itos(d) + ";\n";
  }
  v += "\n";

  // Combinational logic in node order.
  for (uint32_t i = 0; i < nl.nodes.size(); ++i) {
    const Node& n = nl.nodes[i];
    switch (n.op) {
      case NodeOp::const0:
        v += "  assign n" + itos(i) + " = 1'b0;\n";
        break;
      case NodeOp::const1:
        v += "  assign n" + itos(i) + " = 1'b1;\n";
        break;
      case NodeOp::input: {
        const std::string bus =
            in_bus_delay > 0 ? "in_bits_r" + itos(in_bus_delay) : std::string("in_bits");
        v += "  assign n" + itos(i) + " = " + bus + "[" + itos(em.input_pin[i]) + "];\n";
        break;
      }
      case NodeOp::gate2: {
        const std::string a = em.sig(n.inputs[0], n.stage);
        const std::string b = em.sig(n.inputs[1], n.stage);
        v += "  assign n" + itos(i) + " = " + gate_expr(n.gate, a, b) + ";\n";
        break;
      }
      case NodeOp::not_op:
        v += "  assign n" + itos(i) + " = ~" + em.sig(n.inputs[0], n.stage) + ";\n";
        break;
      case NodeOp::passthrough:
        v += "  assign n" + itos(i) + " = " + em.sig(n.inputs[0], n.stage) + ";\n";
        break;
      case NodeOp::half_adder: {
        const std::string a = em.sig(n.inputs[0], n.stage);
        const std::string b = em.sig(n.inputs[1], n.stage);
        v += "  assign n" + itos(i) + " = " + a + " ^ " + b + ";\n";
        v += "  assign n" + itos(i) + "_c = " + a + " & " + b + ";\n";
        break;
      }
      case NodeOp::full_adder: {
        const std::string a = em.sig(n.inputs[0], n.stage);
        const std::string b = em.sig(n.inputs[1], n.stage);
        const std::string c = em.sig(n.inputs[2], n.stage);
        v += "  assign n" + itos(i) + " = " + a + " ^ " + b + " ^ " + c + ";\n";
        v += "  assign n" + itos(i) + "_c = (" + a + " & " + b + ") | (" + a + " & " + c +
             ") | (" + b + " & " + c + ");\n";
        break;
      }
      case NodeOp::compare_select: {
        const int vw = n.value_width;
        const int nw = n.index_width;
        std::vector<NodeRef> va(n.inputs.begin(), n.inputs.begin() + vw);
        std::vector<NodeRef> ia(n.inputs.begin() + vw, n.inputs.begin() + vw + nw);
        std::vector<NodeRef> vb(n.inputs.begin() + vw + nw, n.inputs.begin() + 2 * vw + nw);
        std::vector<NodeRef> ib(n.inputs.begin() + 2 * vw + nw, n.inputs.end());
        v += "  assign n" + itos(i) + "_g = (" + em.concat(vb, n.stage) + " > " +
             em.concat(va, n.stage) + ");\n";
        v += "  assign n" + itos(i) + "_v = n" + itos(i) + "_g ? " + em.concat(vb, n.stage) +
             " : " + em.concat(va, n.stage) + ";\n";
        v += "  assign n" + itos(i) + "_x = n" + itos(i) + "_g ? " + em.concat(ib, n.stage) +
             " : " + em.concat(ia, n.stage) + ";\n";
        break;
      }
    }
  }
  v += "\n";

  // Registers.
  v += "  always @(posedge clk) begin\n";
  v += "    if (rst) begin\n";
  for (int d = 1; d <= total; ++d) v += "      vld_r" + itos(d) + " <= 1'b0;\n";
  v += "    end else begin\n";
  v += "      vld_r1 <= in_valid;\n";
  for (int d = 2; d <= total; ++d) {
    v += "      vld_r" + itos(d) + " <= vld_r" + itos(d - 1) + ";\n";
  }
  v += "    end\n";
  if (in_bus_delay > 0) {
    v += "    in_bits_r1 <= in_bits;\n";
    for (int d = 2; d <= in_bus_delay; ++d) {
      v += "    in_bits_r" + itos(d) + " <= in_bits_r" + itos(d - 1) + ";\n";
    }
  }
  for (uint32_t i = 0; i < nl.nodes.size(); ++i) {
    const Node& n = nl.nodes[i];
    std::vector<std::string> bases;
    switch (n.op) {
      case NodeOp::full_adder:
      case NodeOp::half_adder:
        bases = {"n" + itos(i), "n" + itos(i) + "_c"};
        break;
      case NodeOp::compare_select:
        bases = {"n" + itos(i) + "_v", "n" + itos(i) + "_x"};
        break;
      case NodeOp::const0:
      case NodeOp::const1:
        break;
      default:
        bases = {"n" + itos(i)};
    }
    for (const std::string& b : bases) {
      for (int d = 1; d <= em.max_delay[i]; ++d) {
        v += "    " + b + "_r" + itos(d) + " <= " + (d == 1 ? b : b + "_r" + itos(d - 1)) +
             ";\n";
      }
    }
  }
  {
    std::string s = "{";
    for (std::size_t k = nl.outputs.size(); k-- > 0;) {
      s += em.sig(nl.outputs[k], root_stage);
      if (k != 0) s += ", ";
    }
    s += "}";
    v += "    outbuf_r1 <= " + s + ";\n";
  }
  for (int d = 2; d <= nl.plan.output_stages + 1; ++d) {
    v += "    outbuf_r" + itos(d) + " <= outbuf_r" + itos(d - 1) + ";\n";
  }
  v += "  end\n\n";
  v += "  assign out_valid = vld_r" + itos(total) + ";\n";
  v += "  assign out_class = outbuf_r" + itos(nl.plan.output_stages + 1) + ";\n";
  v += "endmodule\n";
  return v;
}

namespace {

// --- structural reader for self-emitted files ---

struct Token {
  std::string base;  // "n<id>", "n<id>_c", "n<id>_v", "n<id>_x", "in_bits", "1'b0", "1'b1"
  int bit = -1;      // [k] selector if present
};

// Strips a trailing _r<d> delay suffix and a [k] selector.
Token parse_token(std::string t) {
  Token tok;
  const auto lb = t.find('[');
  if (lb != std::string::npos) {
    tok.bit = std::stoi(t.substr(lb + 1));
    t = t.substr(0, lb);
  }
  const auto rp = t.rfind("_r");
  if (rp != std::string::npos && rp + 2 < t.size() &&
      t.find_first_not_of("0123456789", rp + 2) == std::string::npos) {
    t = t.substr(0, rp);
  }
  tok.base = t;
  return tok;
}

struct ReadCtx {
  std::map<std::string, std::string> header;
  std::map<uint32_t, std::string> sum_expr;   // n<id> = ...
  std::map<uint32_t, std::string> carry_expr; // n<id>_c = ...
  std::map<uint32_t, std::string> val_expr;   // n<id>_v = ...
  std::map<uint32_t, std::string> idx_expr;   // n<id>_x = ...
  std::string outbuf_expr;
  std::vector<uint32_t> node_ids;             // in emission order
};

std::vector<std::string> split_ws_tokens(const std::string& s) {
  // Split an expression into identifier-ish tokens, dropping operators.
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (std::isalnum(uint8_t(c)) || c == '_' || c == '\'' || c == '[' || c == ']') {
      cur += c;
    } else {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

NodeRef token_ref(const Token& tok, const std::map<uint32_t, uint32_t>& id_map,
                  const std::vector<Node>& nodes, uint32_t c0, uint32_t c1) {
  if (tok.base == "1'b0") return NodeRef{c0, 0};
  if (tok.base == "1'b1") return NodeRef{c1, 0};
  if (tok.base == "in_bits") return NodeRef{uint32_t(tok.bit), 0};
  if (tok.base.size() < 2 || tok.base[0] != 'n') {
    throw ParseError("unrecognized signal token: " + tok.base, 0);
  }
  std::string rest = tok.base.substr(1);
  uint16_t port = 0;
  bool carry = false, val = false, idx = false;
  if (rest.size() > 2 && rest.compare(rest.size() - 2, 2, "_c") == 0) {
    carry = true;
    rest = rest.substr(0, rest.size() - 2);
  } else if (rest.size() > 2 && rest.compare(rest.size() - 2, 2, "_v") == 0) {
    val = true;
    rest = rest.substr(0, rest.size() - 2);
  } else if (rest.size() > 2 && rest.compare(rest.size() - 2, 2, "_x") == 0) {
    idx = true;
    rest = rest.substr(0, rest.size() - 2);
  }
  const uint32_t emitted_id = uint32_t(std::stoul(rest));
  const auto it = id_map.find(emitted_id);
  if (it == id_map.end()) throw ParseError("reference to unknown node n" + rest, 0);
  const uint32_t id = it->second;
  if (carry) port = 1;
  if (val) port = uint16_t(tok.bit);
  if (idx) port = uint16_t(nodes[id].value_width + tok.bit);
  return NodeRef{id, port};
}

}  // namespace

Netlist read_verilog_structural(const std::string& text) {
  ReadCtx ctx;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    // trim
    const auto b = line.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    line = line.substr(b);
    if (line.rfind("// lgn-netlist:", 0) == 0) {
      std::istringstream hs(line.substr(15));
      std::string kv;
      while (hs >> kv) {
        const auto eq = kv.find('=');
        if (eq != std::string::npos) ctx.header[kv.substr(0, eq)] = kv.substr(eq + 1);
      }
      continue;
    }
    auto grab_assign = [&](const std::string& l) -> std::pair<std::string, std::string> {
      const auto eq = l.find('=');
      std::string lhs = l.substr(7, eq - 7);  // after "assign "
      std::string rhs = l.substr(eq + 1);
      const auto sc = rhs.rfind(';');
      rhs = rhs.substr(0, sc);
      auto trim = [](std::string s) {
        const auto x = s.find_first_not_of(" \t");
        const auto y = s.find_last_not_of(" \t");
        return x == std::string::npos ? std::string() : s.substr(x, y - x + 1);
      };
      return {trim(lhs), trim(rhs)};
    };
    if (line.rfind("assign ", 0) == 0) {
      auto [lhs, rhs] = grab_assign(line);
      if (lhs == "out_valid" || lhs == "out_class") continue;
      if (lhs.size() > 2 && lhs.compare(lhs.size() - 2, 2, "_g") == 0) continue;
      if (lhs[0] != 'n') continue;
      std::string rest = lhs.substr(1);
      if (rest.size() > 2 && rest.compare(rest.size() - 2, 2, "_c") == 0) {
        ctx.carry_expr[uint32_t(std::stoul(rest.substr(0, rest.size() - 2)))] = rhs;
      } else if (rest.size() > 2 && rest.compare(rest.size() - 2, 2, "_v") == 0) {
        ctx.val_expr[uint32_t(std::stoul(rest.substr(0, rest.size() - 2)))] = rhs;
      } else if (rest.size() > 2 && rest.compare(rest.size() - 2, 2, "_x") == 0) {
        ctx.idx_expr[uint32_t(std::stoul(rest.substr(0, rest.size() - 2)))] = rhs;
      } else {
        const uint32_t id = uint32_t(std::stoul(rest));
        ctx.sum_expr[id] = rhs;
        ctx.node_ids.push_back(id);
      }
      continue;
    }
    if (line.rfind("outbuf_r1 <=", 0) == 0) {
      const auto eq = line.find("<=");
      std::string rhs = line.substr(eq + 2);
      const auto sc = rhs.rfind(';');
      ctx.outbuf_expr = rhs.substr(0, sc);
      continue;
    }
  }
  // compare_select nodes have _v assigns but no plain n<id> assign; add their
  // ids in emission order (ids are strictly increasing in emitted order).
  for (const auto& [id, e] : ctx.val_expr) ctx.node_ids.push_back(id);
  std::sort(ctx.node_ids.begin(), ctx.node_ids.end());

  auto hdr = [&](const char* k) -> long long {
    const auto it = ctx.header.find(k);
    if (it == ctx.header.end()) throw ParseError(std::string("missing header field ") + k, 0);
    return std::stoll(it->second);
  };

  Netlist nl;
  nl.input_bits = uint32_t(hdr("input_bits"));
  nl.class_count = int(hdr("class_count"));
  nl.group_size = int(hdr("group_size"));
  nl.stages = int(hdr("stages"));
  nl.plan.levels_per_stage = int(hdr("levels_per_stage"));
  nl.plan.input_stages = int(hdr("input_stages"));
  nl.plan.output_stages = int(hdr("output_stages"));
  nl.meta.gates_before = hdr("gates_before");
  nl.meta.gates_after = hdr("gates_after");
  nl.meta.logic_stages = int(hdr("logic_stages"));
  nl.meta.adder_stages = int(hdr("adder_stages"));
  nl.meta.cmp_stages = int(hdr("cmp_stages"));

  std::map<uint32_t, uint32_t> id_map;
  uint32_t c0 = UINT32_MAX, c1 = UINT32_MAX;
  auto ensure_const = [&](int v) -> uint32_t {
    uint32_t& slot = v ? c1 : c0;
    if (slot == UINT32_MAX) {
      slot = uint32_t(nl.nodes.size());
      nl.nodes.push_back(Node{v ? NodeOp::const1 : NodeOp::const0});
    }
    return slot;
  };
  auto seed_consts = [&] {
    for (uint32_t i = 0; i < nl.nodes.size(); ++i) {
      if (nl.nodes[i].op == NodeOp::const0 && c0 == UINT32_MAX) c0 = i;
      if (nl.nodes[i].op == NodeOp::const1 && c1 == UINT32_MAX) c1 = i;
    }
  };

  // Two passes: create nodes in order first (so forward refs in exprs

  // resolve), then fill inputs.
  for (uint32_t id : ctx.node_ids) {
    Node n;
    const bool is_cmp = ctx.val_expr.count(id) > 0;
    const bool is_adder = !is_cmp && ctx.carry_expr.count(id) > 0;
    const std::string& e = is_cmp ? ctx.val_expr[id] : ctx.sum_expr[id];
    if (is_cmp) {
      n.op = NodeOp::compare_select;
    } else if (is_adder) {
      const auto toks = split_ws_tokens(e);
      n.op = toks.size() == 3 ? NodeOp::full_adder : NodeOp::half_adder;
    } else if (e == "1'b0") {
      n.op = NodeOp::const0;
    } else if (e == "1'b1") {
      n.op = NodeOp::const1;
    } else if (e.rfind("in_bits", 0) == 0) {
      n.op = NodeOp::input;
    } else if (e[0] == '~' && e.find_first_of("&|^") == std::string::npos) {
      n.op = NodeOp::not_op;
    } else {
      const auto toks = split_ws_tokens(e);
      if (toks.size() == 1) {
        n.op = NodeOp::passthrough;
      } else {
        n.op = NodeOp::gate2;
        const bool neg_all = e[0] == '~' && e[1] == '(';
        const bool and_op = e.find('&') != std::string::npos;
        const bool or_op = e.find('|') != std::string::npos;
        const bool xor_op = e.find('^') != std::string::npos;
        // match against the emitted templates
        if (neg_all && or_op) n.gate = 1;
        else if (neg_all && and_op) n.gate = 7;
        else if (neg_all && xor_op) n.gate = 9;
        else if (xor_op) n.gate = 6;
        else if (and_op && e[0] == '~') n.gate = 2;       // ~A & B
        else if (and_op && e.find("& ~") != std::string::npos) n.gate = 4;  // A & ~B
        else if (and_op) n.gate = 8;
        else if (or_op && e[0] == '~') n.gate = 11;       // ~A | B
        else if (or_op && e.find("| ~") != std::string::npos) n.gate = 13;  // A | ~B
        else if (or_op) n.gate = 14;
        else throw ParseError("unrecognized gate expression: " + e, 0);
      }
    }
    if (is_cmp) {
      // widths from the bus expressions
      const auto vtoks = split_ws_tokens(ctx.val_expr[id]);
      const auto xtoks = split_ws_tokens(ctx.idx_expr[id]);
      // tokens: cond, then vw true-branch bits, then vw false-branch bits
      n.value_width = uint16_t((vtoks.size() - 1) / 2);
      n.index_width = uint16_t((xtoks.size() - 1) / 2);
    }
    id_map[id] = uint32_t(nl.nodes.size());
    nl.nodes.push_back(std::move(n));
  }
  seed_consts();

  auto refs_of = [&](const std::string& expr) {
    std::vector<NodeRef> refs;
    for (const auto& t : split_ws_tokens(expr)) {
      if (t == "1'b0") {
        refs.push_back(NodeRef{ensure_const(0), 0});
        continue;
      }
      if (t == "1'b1") {
        refs.push_back(NodeRef{ensure_const(1), 0});
        continue;
      }
      refs.push_back(token_ref(parse_token(t), id_map, nl.nodes, ensure_const(0),
                               ensure_const(1)));
    }
    return refs;
  };

  // ensure_const can grow the node vector, so fill inputs via the index and
  // never hold a Node reference across ref resolution.
  for (uint32_t id : ctx.node_ids) {
    const uint32_t idx = id_map[id];
    const NodeOp op = nl.nodes[idx].op;
    std::vector<NodeRef> inputs;
    switch (op) {
      case NodeOp::input:
      case NodeOp::const0:
      case NodeOp::const1:
        continue;
      case NodeOp::gate2: {
        inputs = refs_of(ctx.sum_expr[id]);
        if (inputs.size() != 2) throw ParseError("gate2 expression arity", 0);
        break;
      }
      case NodeOp::not_op:
      case NodeOp::passthrough: {
        inputs = refs_of(ctx.sum_expr[id]);
        if (inputs.size() != 1) throw ParseError("unary expression arity", 0);
        break;
      }
      case NodeOp::half_adder:
      case NodeOp::full_adder: {
        inputs = refs_of(ctx.sum_expr[id]);
        break;
      }
      case NodeOp::compare_select: {
        // n_v = cond ? {vb...} : {va...} ; n_x = cond ? {ib...} : {ia...}
        auto vtoks = split_ws_tokens(ctx.val_expr[id]);
        auto xtoks = split_ws_tokens(ctx.idx_expr[id]);
        const int vw = nl.nodes[idx].value_width;
        const int iw2 = nl.nodes[idx].index_width;
        auto take = [&](std::vector<std::string>& toks, int from, int count) {
          // tokens are MSB-first inside each concat; skip the cond token
          std::vector<NodeRef> out;
          for (int k = 0; k < count; ++k) {
            const Token tok = parse_token(toks[1 + from + k]);
            const uint32_t k0 = ensure_const(0);
            const uint32_t k1 = ensure_const(1);
            out.push_back(token_ref(tok, id_map, nl.nodes, k0, k1));
          }
          std::reverse(out.begin(), out.end());  // store LSB first
          return out;
        };
        auto vb = take(vtoks, 0, vw);
        auto va = take(vtoks, vw, vw);
        auto ib = take(xtoks, 0, iw2);
        auto ia = take(xtoks, iw2, iw2);
        for (auto& r : va) inputs.push_back(r);
        for (auto& r : ia) inputs.push_back(r);
        for (auto& r : vb) inputs.push_back(r);
        for (auto& r : ib) inputs.push_back(r);
        break;
      }
    }
    nl.nodes[idx].inputs = std::move(inputs);
  }

  // Outputs from the outbuf_r1 concat (MSB first).
  {
    auto toks = split_ws_tokens(ctx.outbuf_expr);
    std::vector<NodeRef> outs;
    for (const auto& t : toks) {
      if (t == "1'b0") {
        outs.push_back(NodeRef{ensure_const(0), 0});
      } else if (t == "1'b1") {
        outs.push_back(NodeRef{ensure_const(1), 0});
      } else {
        outs.push_back(token_ref(parse_token(t), id_map, nl.nodes, ensure_const(0),
                                 ensure_const(1)));
      }
    }
    std::reverse(outs.begin(), outs.end());
    nl.outputs = outs;
  }
  return nl;
}

bool same_dag(const Netlist& a, const Netlist& b) {
  if (a.input_bits != b.input_bits || a.class_count != b.class_count ||
      a.group_size != b.group_size || a.nodes.size() != b.nodes.size() ||
      a.outputs.size() != b.outputs.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.nodes.size(); ++i) {
    const Node& x = a.nodes[i];
    const Node& y = b.nodes[i];
    if (x.op != y.op || x.gate != y.gate || x.value_width != y.value_width ||
        x.index_width != y.index_width || x.inputs != y.inputs) {
      return false;
    }
  }
  return a.outputs == b.outputs;
}

}  // namespace lgn
