#include "lgn/compiler.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

#include "lgn/gates.hpp"

namespace lgn {

namespace {

int ceil_div(long long a, long long b) { return int((a + b - 1) / b); }

// f restricted to one free variable: (f_at_0, f_at_1) -> const / pass / not.
enum class Unary { c0, c1, pass, invert };
Unary classify(int f0, int f1) {
  if (f0 == 0 && f1 == 0) return Unary::c0;
  if (f0 == 1 && f1 == 1) return Unary::c1;
  if (f0 == 0 && f1 == 1) return Unary::pass;
  return Unary::invert;
}

}  // namespace

HardLgn discretize(const SoftLgn& net) {
  HardLgn h;
  h.spec = net.spec;
  h.wires.resize(net.layers.size());
  h.gates.resize(net.layers.size());
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    h.wires[l] = net.layers[l].wires;
    h.gates[l].resize(net.layers[l].size());
    for (std::size_t i = 0; i < net.layers[l].size(); ++i) {
      const auto& w = net.layers[l].logits[i];
      int best = 0;
      for (int j = 1; j < 16; ++j) {
        if (w[j] > w[best]) best = j;
      }
      h.gates[l][i] = uint8_t(best);
    }
  }
  return h;
}

Netlist build_netlist(const HardLgn& h, const PipelinePlan& plan) {
  h.spec.validate();
  plan.validate();
  const auto widths = h.spec.layer_widths();
  const int depth = int(widths.size());
  const int classes = h.spec.class_count;
  const int group = h.spec.group_size();
  const StageBreakdown sb = plan_stages(depth, group, classes, plan);

  Netlist nl;
  nl.input_bits = uint32_t(h.spec.input_bits);
  nl.class_count = classes;
  nl.group_size = group;
  nl.plan = plan;
  nl.stages = sb.total();
  nl.meta.logic_stages = sb.logic_stages;
  nl.meta.adder_stages = sb.adder_stages;
  nl.meta.cmp_stages = sb.cmp_stages;

  for (uint32_t i = 0; i < nl.input_bits; ++i) {
    Node n;
    n.op = NodeOp::input;
    n.stage = plan.input_stages;
    nl.nodes.push_back(std::move(n));
  }
  const uint32_t const0 = uint32_t(nl.nodes.size());
  nl.nodes.push_back(Node{NodeOp::const0});
  const uint32_t const1 = uint32_t(nl.nodes.size());
  nl.nodes.push_back(Node{NodeOp::const1});

  // Decision logic; layer L sits at input_stages + ceil(ceil(L/2) / r).
  const int logic_end = plan.input_stages + sb.logic_stages;
  std::vector<NodeRef> prev(nl.input_bits);
  for (uint32_t i = 0; i < nl.input_bits; ++i) prev[i] = NodeRef{i, 0};
  for (int l = 0; l < depth; ++l) {
    std::vector<NodeRef> cur(widths[l]);
    const int stage = plan.input_stages + ceil_div(ceil_div(l + 1, 2), plan.levels_per_stage);
    for (int i = 0; i < widths[l]; ++i) {
      Node n;
      n.op = NodeOp::gate2;
      n.gate = h.gates[l][i];
      n.stage = stage;
      n.inputs = {prev[h.wires[l][i].in_a], prev[h.wires[l][i].in_b]};
      cur[i] = NodeRef{uint32_t(nl.nodes.size()), 0};
      nl.nodes.push_back(std::move(n));
      ++nl.meta.gates_before;
    }
    prev = std::move(cur);
  }
  nl.meta.gates_after = nl.meta.gates_before;

  // Per-class popcount trees (weight-queue FA/HA reduction).  Node levels
  // are scaled onto the planned adder stages.
  const int w_bits = sum_width(group);
  struct Pending {
    NodeRef ref;
    int level;
  };
  std::vector<std::vector<NodeRef>> sums(classes);
  std::vector<std::pair<std::size_t, int>> adder_levels;  // node idx, level
  int tree_depth = 0;
  for (int c = 0; c < classes; ++c) {
    std::vector<std::deque<Pending>> at_weight(w_bits + 1);
    for (int i = 0; i < group; ++i) at_weight[0].push_back({prev[c * group + i], 0});
    sums[c].resize(w_bits);
    for (int w = 0; w < w_bits; ++w) {
      auto& q = at_weight[w];
      while (q.size() >= 3) {
        Pending a = q.front();
        q.pop_front();
        Pending b = q.front();
        q.pop_front();
        Pending d = q.front();
        q.pop_front();
        const int level = std::max({a.level, b.level, d.level}) + 1;
        Node n;
        n.op = NodeOp::full_adder;
        n.inputs = {a.ref, b.ref, d.ref};
        const uint32_t id = uint32_t(nl.nodes.size());
        nl.nodes.push_back(std::move(n));
        adder_levels.push_back({id, level});
        tree_depth = std::max(tree_depth, level);
        q.push_back({NodeRef{id, 0}, level});
        at_weight[w + 1].push_back({NodeRef{id, 1}, level});
      }
      if (q.size() == 2) {
        Pending a = q.front();
        q.pop_front();
        Pending b = q.front();
        q.pop_front();
        const int level = std::max(a.level, b.level) + 1;
        Node n;
        n.op = NodeOp::half_adder;
        n.inputs = {a.ref, b.ref};
        const uint32_t id = uint32_t(nl.nodes.size());
        nl.nodes.push_back(std::move(n));
        adder_levels.push_back({id, level});
        tree_depth = std::max(tree_depth, level);
        q.push_back({NodeRef{id, 0}, level});
        at_weight[w + 1].push_back({NodeRef{id, 1}, level});
      }
      sums[c][w] = q.empty() ? NodeRef{const0, 0} : q.front().ref;
      if (!q.empty()) q.pop_front();
    }
  }
  const int adder_end = logic_end + sb.adder_stages;
  for (auto [id, level] : adder_levels) {
    int stage = logic_end;
    if (sb.adder_stages > 0 && tree_depth > 0) {
      stage += std::max(1, ceil_div(level * sb.adder_stages, tree_depth));
    }
    nl.nodes[id].stage = stage;
  }

  // Comparator-select tree; the left operand carries the lower class index
  // and wins ties (strict greater-than on the right).
  const int iw = sum_width(classes - 1);
  struct Candidate {
    std::vector<NodeRef> value, index;
    int level = 0;
  };
  std::vector<Candidate> cands(classes);
  for (int c = 0; c < classes; ++c) {
    cands[c].value = sums[c];
    cands[c].index.resize(iw);
    for (int k = 0; k < iw; ++k) {
      cands[c].index[k] = NodeRef{((c >> k) & 1) ? const1 : const0, 0};
    }
  }
  const int cmp_tree_depth = sum_width(classes - 1);
  while (cands.size() > 1) {
    std::vector<Candidate> next;
    for (std::size_t i = 0; i + 1 < cands.size(); i += 2) {
      const Candidate& a = cands[i];
      const Candidate& b = cands[i + 1];
      Node n;
      n.op = NodeOp::compare_select;
      n.value_width = uint16_t(w_bits);
      n.index_width = uint16_t(iw);
      n.inputs.reserve(2 * (w_bits + iw));
      for (const auto& r : a.value) n.inputs.push_back(r);
      for (const auto& r : a.index) n.inputs.push_back(r);
      for (const auto& r : b.value) n.inputs.push_back(r);
      for (const auto& r : b.index) n.inputs.push_back(r);
      const int level = std::max(a.level, b.level) + 1;
      int stage = adder_end;
      if (sb.cmp_stages > 0) {
        stage += std::max(1, ceil_div(level * sb.cmp_stages, cmp_tree_depth));
      }
      n.stage = stage;
      const uint32_t id = uint32_t(nl.nodes.size());
      nl.nodes.push_back(std::move(n));
      Candidate merged;
      merged.level = level;
      merged.value.resize(w_bits);
      merged.index.resize(iw);
      for (int k = 0; k < w_bits; ++k) merged.value[k] = NodeRef{id, uint16_t(k)};
      for (int k = 0; k < iw; ++k) merged.index[k] = NodeRef{id, uint16_t(w_bits + k)};
      next.push_back(std::move(merged));
    }
    if (cands.size() % 2 == 1) next.push_back(cands.back());
    cands = std::move(next);
  }
  nl.outputs = cands[0].index;

  validate_netlist(nl);
  return nl;
}

namespace {

struct Resolved {
  bool is_const = false;
  uint8_t cval = 0;
  NodeRef ref{};
};

}  // namespace

Netlist prune(const Netlist& in) {
  validate_netlist(in);
  const std::size_t n = in.nodes.size();

  std::vector<Node> nodes = in.nodes;  // working copy; ops/inputs may simplify
  // subst[(i,p)]: where consumers of port p of node i should read instead.
  // Entries always point at final targets (consts or kept node ports).
  std::vector<std::vector<Resolved>> subst(n);
  for (std::size_t i = 0; i < n; ++i) subst[i].resize(std::size_t(nodes[i].out_ports()));

  auto resolve = [&](NodeRef r) -> Resolved { return subst[r.node][r.port]; };
  // Identity to start; overwritten entries always point at final targets.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t p = 0; p < subst[i].size(); ++p) {
      subst[i][p].ref = NodeRef{uint32_t(i), uint16_t(p)};
    }
  }
  auto is_self = [&](std::size_t i, uint16_t p) {
    const Resolved& s = subst[i][p];
    return !s.is_const && s.ref.node == i && s.ref.port == p;
  };
  auto const_of = [&](const Resolved& r, bool* is_c, int* v) {
    if (r.is_const) {
      *is_c = true;
      *v = r.cval;
      return;
    }
    const NodeOp op = nodes[r.ref.node].op;
    if (op == NodeOp::const0) {
      *is_c = true;
      *v = 0;
    } else if (op == NodeOp::const1) {
      *is_c = true;
      *v = 1;
    } else {
      *is_c = false;
      *v = -1;
    }
  };

  for (std::size_t i = 0; i < n; ++i) {
    Node& node = nodes[i];
    for (auto& r : node.inputs) {
      const Resolved s = resolve(r);
      if (!s.is_const) r = s.ref;
      // const substitutions keep the ref pointing at a const node; callers
      // below fold them via const_of.
    }
    // Rewrite const-valued substitutions onto concrete const nodes when the
    // source netlist has them; otherwise leave the ref and fold here.
    switch (node.op) {
      case NodeOp::input:
      case NodeOp::const0:
      case NodeOp::const1:
        break;
      case NodeOp::passthrough: {
        subst[i][0] = resolve(node.inputs[0]);
        break;
      }
      case NodeOp::not_op: {
        const Resolved s = resolve(node.inputs[0]);
        bool c;
        int v;
        const_of(s, &c, &v);
        if (c) {
          subst[i][0] = Resolved{true, uint8_t(1 - v), {}};
        } else if (nodes[s.ref.node].op == NodeOp::not_op && is_self(s.ref.node, 0)) {
          subst[i][0] = resolve(nodes[s.ref.node].inputs[0]);  // double negation
        } else {
          node.inputs[0] = s.ref;
        }
        break;
      }
      case NodeOp::gate2: {
        const Resolved ra = resolve(node.inputs[0]);
        const Resolved rb = resolve(node.inputs[1]);
        bool ca, cb;
        int va, vb;
        const_of(ra, &ca, &va);
        const_of(rb, &cb, &vb);
        const int g = node.gate;
        const int t0 = (g >> 0) & 1, t1 = (g >> 1) & 1, t2 = (g >> 2) & 1, t3 = (g >> 3) & 1;

        auto apply_unary = [&](Unary u, const Resolved& src) {
          switch (u) {
            case Unary::c0: subst[i][0] = Resolved{true, 0, {}}; break;
            case Unary::c1: subst[i][0] = Resolved{true, 1, {}}; break;
            case Unary::pass: subst[i][0] = src; break;
            case Unary::invert:
              node.op = NodeOp::not_op;
              node.gate = 0;
              node.inputs = {src.ref};
              break;
          }
        };

        if (ca && cb) {
          subst[i][0] = Resolved{true, uint8_t((g >> (2 * va + vb)) & 1), {}};
        } else if (ca) {
          apply_unary(classify((g >> (2 * va)) & 1, (g >> (2 * va + 1)) & 1), rb);
        } else if (cb) {
          apply_unary(classify((g >> vb) & 1, (g >> (2 + vb)) & 1), ra);
        } else if (t0 == t1 && t1 == t2 && t2 == t3) {
          subst[i][0] = Resolved{true, uint8_t(t0), {}};
        } else if (t0 == t1 && t2 == t3) {
          apply_unary(classify(t0, t2), ra);  // depends on a only
        } else if (t0 == t2 && t1 == t3) {
          apply_unary(classify(t0, t1), rb);  // depends on b only
        } else if (ra.ref == rb.ref) {
          apply_unary(classify(t0, t3), ra);  // both inputs are the same signal
        } else {
          node.inputs = {ra.ref, rb.ref};
        }
        break;
      }
      case NodeOp::half_adder:
      case NodeOp::full_adder: {
        int const_sum = 0, const_cnt = 0;
        std::vector<Resolved> free_in;
        for (auto& rin : node.inputs) {
          const Resolved s = resolve(rin);
          bool c;
          int v;
          const_of(s, &c, &v);
          if (c) {
            ++const_cnt;
            const_sum += v;
          } else {
            free_in.push_back(s);
          }
        }
        const int arity = int(node.inputs.size());
        if (const_cnt == arity) {
          subst[i][0] = Resolved{true, uint8_t(const_sum & 1), {}};
          subst[i][1] = Resolved{true, uint8_t(const_sum >= 2), {}};
        } else if (const_cnt == arity - 1) {
          // one live input x: sum = x ^ (s&1); carry = s>=2 ? 1 : (s==1 ? x : 0)
          const Resolved x = free_in[0];
          if (const_sum & 1) {
            node.op = NodeOp::not_op;
            node.inputs = {x.ref};
          } else {
            subst[i][0] = x;
          }
          if (const_sum >= 2) {
            subst[i][1] = Resolved{true, 1, {}};
          } else if (const_sum == 1) {
            subst[i][1] = x;
          } else {
            subst[i][1] = Resolved{true, 0, {}};
          }
        } else if (node.op == NodeOp::full_adder && const_cnt == 1 && const_sum == 0) {
          node.op = NodeOp::half_adder;
          node.inputs = {free_in[0].ref, free_in[1].ref};
        }
        // live inputs were already rewritten at the top of the visit
        break;
      }
      case NodeOp::compare_select: {
        const int vw = node.value_width, iw = node.index_width;
        bool all_const = true;
        std::vector<int> vals(node.inputs.size());
        for (std::size_t k = 0; k < node.inputs.size(); ++k) {
          Resolved s = resolve(node.inputs[k]);
          bool c;
          int v;
          const_of(s, &c, &v);
          if (!c) {
            all_const = false;
            node.inputs[k] = s.ref;
          } else {
            vals[k] = v;
          }
        }
        if (all_const) {
          long long va = 0, vb = 0;
          for (int k = 0; k < vw; ++k) va |= (long long)(vals[k]) << k;
          for (int k = 0; k < vw; ++k) vb |= (long long)(vals[vw + iw + k]) << k;
          const bool take_b = vb > va;
          for (int k = 0; k < vw; ++k) {
            subst[i][k] = Resolved{true, uint8_t(vals[(take_b ? vw + iw : 0) + k]), {}};
          }
          for (int k = 0; k < iw; ++k) {
            subst[i][vw + k] =
                Resolved{true, uint8_t(vals[(take_b ? 2 * vw + iw : vw) + k]), {}};
          }
        }
        break;
      }
    }
  }

  // Resolve outputs, then mark reachable nodes (inputs always stay: ports).
  Netlist out;
  out.input_bits = in.input_bits;
  out.class_count = in.class_count;
  out.group_size = in.group_size;
  out.stages = in.stages;
  out.plan = in.plan;
  out.meta = in.meta;

  std::vector<Resolved> routs;
  bool need_c0 = false, need_c1 = false;
  for (const NodeRef& r : in.outputs) {
    Resolved s = subst[r.node][r.port];
    if (s.is_const) (s.cval ? need_c1 : need_c0) = true;
    routs.push_back(s);
  }

  std::vector<char> reach(n, 0);
  std::vector<uint32_t> stack;
  auto mark = [&](NodeRef r) {
    if (!reach[r.node]) {
      reach[r.node] = 1;
      stack.push_back(r.node);
    }
  };
  for (const Resolved& s : routs) {
    if (!s.is_const) mark(s.ref);
  }
  while (!stack.empty()) {
    const uint32_t id = stack.back();
    stack.pop_back();
    for (const NodeRef& r : nodes[id].inputs) {
      const Resolved s = subst[r.node][r.port];
      if (s.is_const) {
        (s.cval ? need_c1 : need_c0) = true;
      } else {
        mark(s.ref);
      }
    }
  }
  // A node is kept only if reachable AND still serves at least one port
  // itself.
  std::vector<char> keep(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (nodes[i].op == NodeOp::input) {
      keep[i] = 1;
      continue;
    }
    if (!reach[i]) continue;
    bool serves = false;
    for (uint16_t p = 0; p < subst[i].size(); ++p) {
      if (is_self(i, p)) serves = true;
    }
    keep[i] = serves ? 1 : 0;
  }

  // Rebuild: inputs, consts, then surviving nodes in original order.
  std::vector<uint32_t> remap(n, UINT32_MAX);
  for (std::size_t i = 0; i < n; ++i) {
    if (nodes[i].op == NodeOp::input && keep[i]) {
      remap[i] = uint32_t(out.nodes.size());
      out.nodes.push_back(nodes[i]);
    }
  }
  uint32_t c0_id = UINT32_MAX, c1_id = UINT32_MAX;
  // Reuse existing const nodes when kept, else add fresh ones on demand.
  for (std::size_t i = 0; i < n; ++i) {
    if (keep[i] && nodes[i].op == NodeOp::const0 && c0_id == UINT32_MAX) {
      c0_id = uint32_t(out.nodes.size());
      remap[i] = c0_id;
      out.nodes.push_back(nodes[i]);
    }
    if (keep[i] && nodes[i].op == NodeOp::const1 && c1_id == UINT32_MAX) {
      c1_id = uint32_t(out.nodes.size());
      remap[i] = c1_id;
      out.nodes.push_back(nodes[i]);
    }
  }
  if (need_c0 && c0_id == UINT32_MAX) {
    c0_id = uint32_t(out.nodes.size());
    out.nodes.push_back(Node{NodeOp::const0});
  }
  if (need_c1 && c1_id == UINT32_MAX) {
    c1_id = uint32_t(out.nodes.size());
    out.nodes.push_back(Node{NodeOp::const1});
  }
  auto remap_resolved = [&](const Resolved& s) -> NodeRef {
    if (s.is_const) return NodeRef{s.cval ? c1_id : c0_id, 0};
    return NodeRef{remap[s.ref.node], s.ref.port};
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (!keep[i] || remap[i] != UINT32_MAX) continue;
    remap[i] = uint32_t(out.nodes.size());
    out.nodes.push_back(nodes[i]);
  }
  for (Node& node : out.nodes) {
    for (NodeRef& r : node.inputs) {
      const Resolved s = subst[r.node][r.port];
      r = remap_resolved(s.is_const ? s : Resolved{false, 0, r});
    }
  }
  for (const Resolved& s : routs) out.outputs.push_back(remap_resolved(s));

  out.meta.gates_after = 0;
  for (const Node& node : out.nodes) {
    if (node.op == NodeOp::gate2 || node.op == NodeOp::not_op) ++out.meta.gates_after;
  }
  validate_netlist(out);
  return out;
}

}  // namespace lgn
