#pragma once

#include <array>
#include <cstdint>
#include <utility>

namespace lgn {

// The 16 two-input boolean functions, indexed by truth table:
// gate i on (a,b) returns bit (i >> (2a+b)) & 1.  So gate 0 is constant-0,
// gate 6 is XOR, gate 8 is AND, gate 14 is OR, gate 15 is constant-1.
inline constexpr int kGateCount = 16;

int gate_truth(int gate, int a, int b);

// Multilinear relaxation of gate i; equals gate_truth at the boolean corners
// and is multilinear in (a,b).  Inputs outside [0,1] are rejected.
double gate_soft(int gate, double a, double b);

// Analytic partials (df/da, df/db) of gate_soft.
std::pair<double, double> gate_soft_grad(int gate, double a, double b);

struct GateWeights {
  std::array<double, 16> logits{};
};

// Max-subtracted softmax over 16 logits; throws on non-finite input.
std::array<double, 16> softmax16(const std::array<double, 16>& logits);

// Softmax mixture of all 16 relaxed gates.
double mixture_forward(const GateWeights& w, double a, double b);

// Corner-basis helpers used by the training kernels.  The relaxed output of
// any mixture is q . phi where phi = [(1-a)(1-b), (1-a)b, a(1-b), ab] and
// q_c = sum_j p_j * truth(j, corner c).
inline std::array<double, 4> corner_basis(double a, double b) {
  const double na = 1.0 - a, nb = 1.0 - b;
  return {na * nb, na * b, a * nb, a * b};
}

std::array<double, 4> corner_mix(const std::array<double, 16>& probs);

// truth(gate, corner) with corner = 2a+b.
inline int gate_corner(int gate, int corner) { return (gate >> corner) & 1; }

}  // namespace lgn
