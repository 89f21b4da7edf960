#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lgn/dataset.hpp"
#include "lgn/netlist.hpp"

namespace lgn {

// Functional (single-input) evaluation; returns the predicted class.
int simulate(const Netlist& nl, const std::vector<uint8_t>& bits);

// Rows of a packed dataset through the netlist, optionally OpenMP-parallel.
std::vector<int> simulate_batch(const Netlist& nl, const BitMatrix& inputs,
                                const std::vector<uint32_t>& rows, bool parallel = true);

struct PipeResult {
  int input_index = 0;
  long cycle = 0;  // cycle at which out_valid asserts for this input
  int class_index = 0;
};

// Cycle-stepped register-accurate pipeline simulation: one input issued per
// cycle, results appear exactly latency_cycles later.
struct SimTrace {
  int latency_cycles = 0;
  std::vector<PipeResult> results;
  std::vector<std::string> lines;  // per-cycle trace when requested
};
SimTrace simulate_pipelined(const Netlist& nl,
                            const std::vector<std::vector<uint8_t>>& inputs,
                            bool want_trace = false);

}  // namespace lgn
