#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lgn/arch.hpp"
#include "lgn/netlist.hpp"
#include "lgn/network.hpp"

namespace lgn {

// Discretized network: one concrete gate per neuron, wiring unchanged.
struct HardLgn {
  ArchitectureSpec spec;
  std::vector<std::vector<Neuron>> wires;
  std::vector<std::vector<uint8_t>> gates;
};

// argmax over each neuron's 16 logits, ties to the lowest gate id.
HardLgn discretize(const SoftLgn& net);

// Lower to a staged gate-level netlist: decision logic as gate2 nodes, one
// FA/HA popcount tree per class group, and a comparator-select tree whose
// ties keep the lower class index.
Netlist build_netlist(const HardLgn& h, const PipelinePlan& plan = {});

// Constant propagation, unary-gate collapse (passthrough rewiring, inverter
// chains), and removal of nodes unreachable from the outputs.  Stage labels
// and the total stage count are preserved, so latency is unchanged.
Netlist prune(const Netlist& nl);

// Synthesizable Verilog-2001 subset; byte-identical output for equal
// netlists.  Ports: clk, rst, in_valid, in_bits[...], out_valid, out_class.
std::string emit_verilog(const Netlist& nl, const std::string& module_name);

// Structural reader for self-emitted files; rebuilds ops/edges/outputs.
Netlist read_verilog_structural(const std::string& text);

// DAG equality ignoring stage labels (the reader does not recover stages).
bool same_dag(const Netlist& a, const Netlist& b);

}  // namespace lgn
