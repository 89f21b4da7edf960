#include "lgn/gates.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lgn/common.hpp"

namespace lgn {

double SplitMix64::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double m = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * m;
  has_spare_ = true;
  return u * m;
}

namespace {

void check_gate(int gate) {
  if (gate < 0 || gate >= kGateCount) {
    throw std::domain_error("gate id out of range [0,15]: " + std::to_string(gate));
  }
}

void check_unit(double x, const char* name) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::domain_error(std::string(name) + " outside [0,1]: " + std::to_string(x));
  }
}

}  // namespace

int gate_truth(int gate, int a, int b) {
  check_gate(gate);
  if ((a != 0 && a != 1) || (b != 0 && b != 1)) {
    throw std::domain_error("gate_truth inputs must be bits");
  }
  return (gate >> (2 * a + b)) & 1;
}

double gate_soft(int gate, double a, double b) {
  check_gate(gate);
  check_unit(a, "a");
  check_unit(b, "b");
  const auto phi = corner_basis(a, b);
  double f = 0.0;
  for (int c = 0; c < 4; ++c) {
    if (gate_corner(gate, c)) f += phi[c];
  }
  return f;
}

std::pair<double, double> gate_soft_grad(int gate, double a, double b) {
  check_gate(gate);
  check_unit(a, "a");
  check_unit(b, "b");
  // f = q0(1-a)(1-b) + q1(1-a)b + q2 a(1-b) + q3 ab with q = truth bits.
  const double q0 = gate_corner(gate, 0), q1 = gate_corner(gate, 1);
  const double q2 = gate_corner(gate, 2), q3 = gate_corner(gate, 3);
  const double da = (q2 - q0) * (1.0 - b) + (q3 - q1) * b;
  const double db = (q1 - q0) * (1.0 - a) + (q3 - q2) * a;
  return {da, db};
}

std::array<double, 16> softmax16(const std::array<double, 16>& logits) {
  double mx = logits[0];
  for (double v : logits) {
    if (!std::isfinite(v)) throw std::domain_error("non-finite gate logit");
    mx = std::max(mx, v);
  }
  std::array<double, 16> p{};
  double sum = 0.0;
  for (int j = 0; j < 16; ++j) {
    p[j] = std::exp(logits[j] - mx);
    sum += p[j];
  }
  for (int j = 0; j < 16; ++j) p[j] /= sum;
  return p;
}

std::array<double, 4> corner_mix(const std::array<double, 16>& probs) {
  std::array<double, 4> q{};
  for (int j = 0; j < 16; ++j) {
    const double pj = probs[j];
    for (int c = 0; c < 4; ++c) {
      if (gate_corner(j, c)) q[c] += pj;
    }
  }
  return q;
}

double mixture_forward(const GateWeights& w, double a, double b) {
  check_unit(a, "a");
  check_unit(b, "b");
  const auto q = corner_mix(softmax16(w.logits));
  const auto phi = corner_basis(a, b);
  return q[0] * phi[0] + q[1] * phi[1] + q[2] * phi[2] + q[3] * phi[3];
}

}  // namespace lgn
