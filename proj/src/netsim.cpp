#include "lgn/netsim.hpp"

#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lgn {

namespace {

struct PortMap {
  std::vector<uint32_t> offset;  // per node, into the flat value array
  uint32_t total = 0;
  std::vector<uint32_t> pin;     // node -> input pin index

  explicit PortMap(const Netlist& nl) {
    offset.resize(nl.nodes.size());
    pin.resize(nl.nodes.size(), 0);
    uint32_t p = 0;
    for (std::size_t i = 0; i < nl.nodes.size(); ++i) {
      offset[i] = total;
      total += uint32_t(nl.nodes[i].out_ports());
      if (nl.nodes[i].op == NodeOp::input) pin[i] = p++;
    }
  }
};

// Combinational evaluation into `vals`; `read` maps an operand ref to a bit.
template <typename ReadFn>
void eval_node(const Netlist& nl, const PortMap& pm, std::size_t i, ReadFn&& read,
               const uint8_t* pins, std::vector<uint8_t>& vals) {
  const Node& n = nl.nodes[i];
  uint8_t* out = vals.data() + pm.offset[i];
  switch (n.op) {
    case NodeOp::input:
      out[0] = pins[pm.pin[i]];
      break;
    case NodeOp::const0:
      out[0] = 0;
      break;
    case NodeOp::const1:
      out[0] = 1;
      break;
    case NodeOp::gate2: {
      const int a = read(i, n.inputs[0]);
      const int b = read(i, n.inputs[1]);
      out[0] = uint8_t((n.gate >> (2 * a + b)) & 1);
      break;
    }
    case NodeOp::not_op:
      out[0] = uint8_t(1 - read(i, n.inputs[0]));
      break;
    case NodeOp::passthrough:
      out[0] = uint8_t(read(i, n.inputs[0]));
      break;
    case NodeOp::half_adder: {
      const int a = read(i, n.inputs[0]);
      const int b = read(i, n.inputs[1]);
      out[0] = uint8_t(a ^ b);
      out[1] = uint8_t(a & b);
      break;
    }
    case NodeOp::full_adder: {
      const int a = read(i, n.inputs[0]);
      const int b = read(i, n.inputs[1]);
      const int c = read(i, n.inputs[2]);
      out[0] = uint8_t(a ^ b ^ c);
      out[1] = uint8_t((a & b) | (a & c) | (b & c));
      break;
    }
    case NodeOp::compare_select: {
      const int vw = n.value_width, iw = n.index_width;
      long long va = 0, vb = 0;
      for (int k = 0; k < vw; ++k) {
        va |= (long long)(read(i, n.inputs[k])) << k;
        vb |= (long long)(read(i, n.inputs[vw + iw + k])) << k;
      }
      const bool take_b = vb > va;  // ties keep the left (lower-index) side
      const int vbase = take_b ? vw + iw : 0;
      const int ibase = take_b ? 2 * vw + iw : vw;
      for (int k = 0; k < vw; ++k) out[k] = uint8_t(read(i, n.inputs[vbase + k]));
      for (int k = 0; k < iw; ++k) out[vw + k] = uint8_t(read(i, n.inputs[ibase + k]));
      break;
    }
  }
}

int class_from_outputs(const Netlist& nl, const PortMap& pm, const std::vector<uint8_t>& vals) {
  int cls = 0;
  for (std::size_t k = 0; k < nl.outputs.size(); ++k) {
    const NodeRef& r = nl.outputs[k];
    cls |= int(vals[pm.offset[r.node] + r.port]) << k;
  }
  return cls;
}

int simulate_with(const Netlist& nl, const PortMap& pm, const uint8_t* pins,
                  std::vector<uint8_t>& vals) {
  vals.assign(pm.total, 0);
  auto read = [&](std::size_t, const NodeRef& r) -> int {
    return vals[pm.offset[r.node] + r.port];
  };
  for (std::size_t i = 0; i < nl.nodes.size(); ++i) eval_node(nl, pm, i, read, pins, vals);
  return class_from_outputs(nl, pm, vals);
}

}  // namespace

int simulate(const Netlist& nl, const std::vector<uint8_t>& bits) {
  if (bits.size() != nl.input_bits) {
    throw std::domain_error("simulate: input width " + std::to_string(bits.size()) +
                            " != netlist input_bits " + std::to_string(nl.input_bits));
  }
  const PortMap pm(nl);
  std::vector<uint8_t> vals;
  return simulate_with(nl, pm, bits.data(), vals);
}

std::vector<int> simulate_batch(const Netlist& nl, const BitMatrix& inputs,
                                const std::vector<uint32_t>& rows, bool parallel) {
  if (inputs.cols != nl.input_bits) throw std::domain_error("simulate_batch: width mismatch");
  const PortMap pm(nl);
  std::vector<int> out(rows.size());
#ifdef _OPENMP
#pragma omp parallel if (parallel)
#endif
  {
    std::vector<uint8_t> vals;
    std::vector<uint8_t> bits(nl.input_bits);
#ifdef _OPENMP
#pragma omp for schedule(static)
#endif
    for (long s = 0; s < long(rows.size()); ++s) {
      for (std::size_t c = 0; c < nl.input_bits; ++c) bits[c] = uint8_t(inputs.get(rows[s], c));
      out[s] = simulate_with(nl, pm, bits.data(), vals);
    }
  }
  (void)parallel;
  return out;
}

SimTrace simulate_pipelined(const Netlist& nl, const std::vector<std::vector<uint8_t>>& inputs,
                            bool want_trace) {
  if (inputs.empty()) throw std::domain_error("simulate_pipelined: empty input sequence");
  for (const auto& b : inputs) {
    if (b.size() != nl.input_bits) throw std::domain_error("simulate_pipelined: width mismatch");
  }
  const PortMap pm(nl);
  const int total = nl.stages;

  // Register depth needed per node: consumer stage distance, plus the output
  // read path (root value is read total - stage + 1 registers later).
  std::vector<int> max_delay(nl.nodes.size(), 0);
  auto is_const = [&](uint32_t id) {
    return nl.nodes[id].op == NodeOp::const0 || nl.nodes[id].op == NodeOp::const1;
  };
  for (const Node& n : nl.nodes) {
    for (const NodeRef& r : n.inputs) {
      if (is_const(r.node)) continue;
      max_delay[r.node] = std::max(max_delay[r.node], int(n.stage - nl.nodes[r.node].stage));
    }
  }
  for (const NodeRef& r : nl.outputs) {
    if (is_const(r.node)) continue;
    max_delay[r.node] = std::max(max_delay[r.node], total - nl.nodes[r.node].stage + 1);
  }

  // Flat register file: per node, max_delay slots per port.
  std::vector<uint32_t> reg_off(nl.nodes.size() + 1, 0);
  for (std::size_t i = 0; i < nl.nodes.size(); ++i) {
    reg_off[i + 1] = reg_off[i] + uint32_t(max_delay[i] * nl.nodes[i].out_ports());
  }
  std::vector<uint8_t> regs(reg_off.back(), 0);
  auto reg_at = [&](uint32_t node, uint16_t port, int d) -> uint8_t& {
    // slot d in [1, max_delay]; layout: port-major, delay-minor
    return regs[reg_off[node] + uint32_t(port) * max_delay[node] + uint32_t(d - 1)];
  };

  std::vector<uint8_t> vals(pm.total, 0);
  const std::vector<uint8_t> zero_pins(nl.input_bits, 0);

  SimTrace trace;
  trace.latency_cycles = total;
  const long n_in = long(inputs.size());
  const long last_cycle = n_in - 1 + total;

  auto read = [&](std::size_t consumer, const NodeRef& r) -> int {
    if (is_const(r.node)) return nl.nodes[r.node].op == NodeOp::const1 ? 1 : 0;
    const int d = nl.nodes[consumer].stage - nl.nodes[r.node].stage;
    if (d == 0) return vals[pm.offset[r.node] + r.port];
    return reg_at(r.node, r.port, d);
  };

  for (long cycle = 0; cycle <= last_cycle; ++cycle) {
    // Input nodes sit at stage c_in, so their combinational slot sees pins
    // presented c_in-1 cycles earlier.
    const long src = cycle - (nl.plan.input_stages - 1);
    const uint8_t* pins = (src >= 0 && src < n_in) ? inputs[src].data() : zero_pins.data();
    for (std::size_t i = 0; i < nl.nodes.size(); ++i) eval_node(nl, pm, i, read, pins, vals);

    // Output side: item (cycle - total) becomes visible this cycle.
    const long item = cycle - total;
    const bool ov = item >= 0 && item < n_in;
    int cls = 0;
    if (ov) {
      for (std::size_t k = 0; k < nl.outputs.size(); ++k) {
        const NodeRef& r = nl.outputs[k];
        const int bit = is_const(r.node)
                            ? (nl.nodes[r.node].op == NodeOp::const1 ? 1 : 0)
                            : reg_at(r.node, r.port, total - nl.nodes[r.node].stage + 1);
        cls |= bit << k;
      }
      trace.results.push_back(PipeResult{int(item), cycle, cls});
    }
    if (want_trace) {
      std::string line = "C " + std::to_string(cycle) + " iv=" +
                         (cycle < n_in ? "1" : "0") + " ov=" + (ov ? "1" : "0") +
                         " class=" + (ov ? std::to_string(cls) : std::string("-"));
      trace.lines.push_back(std::move(line));
      // register contents, kept to small netlists to stay readable
      if (regs.size() <= 256) {
        for (std::size_t i = 0; i < nl.nodes.size(); ++i) {
          const int md = max_delay[i];
          if (md == 0) continue;
          std::string rl = "R " + std::to_string(cycle) + " n" + std::to_string(i) + "=";
          for (int p = 0; p < nl.nodes[i].out_ports(); ++p) {
            if (p) rl += "/";
            for (int d = 1; d <= md; ++d) {
              rl += char('0' + reg_at(uint32_t(i), uint16_t(p), d));
            }
          }
          trace.lines.push_back(std::move(rl));
        }
      }
    }

    // Clock edge: shift every register chain, then capture comb values.
    for (std::size_t i = 0; i < nl.nodes.size(); ++i) {
      const int md = max_delay[i];
      if (md == 0) continue;
      const int ports = nl.nodes[i].out_ports();
      for (int p = 0; p < ports; ++p) {
        for (int d = md; d >= 2; --d) {
          reg_at(uint32_t(i), uint16_t(p), d) = reg_at(uint32_t(i), uint16_t(p), d - 1);
        }
        reg_at(uint32_t(i), uint16_t(p), 1) = vals[pm.offset[i] + p];
      }
    }
  }
  return trace;
}

}  // namespace lgn
