#include <doctest.h>

#include <cmath>
#include <limits>

#include "lgn/common.hpp"
#include "lgn/gates.hpp"

using namespace lgn;

TEST_CASE("gate_truth matches the stated encoding") {
  CHECK(gate_truth(8, 1, 1) == 1);  // AND
  CHECK(gate_truth(8, 0, 1) == 0);
  CHECK(gate_truth(8, 1, 0) == 0);
  CHECK(gate_truth(6, 1, 0) == 1);  // XOR
  CHECK(gate_truth(6, 1, 1) == 0);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      CHECK(gate_truth(0, a, b) == 0);
      CHECK(gate_truth(15, a, b) == 1);
      CHECK(gate_truth(14, a, b) == (a | b));
      CHECK(gate_truth(7, a, b) == 1 - (a & b));
    }
  }
  CHECK_THROWS_AS(gate_truth(16, 0, 0), std::domain_error);
  CHECK_THROWS_AS(gate_truth(-1, 0, 0), std::domain_error);
  CHECK_THROWS_AS(gate_truth(3, 2, 0), std::domain_error);
}

TEST_CASE("gate_soft equals gate_truth at all 64 corners") {
  for (int g = 0; g < 16; ++g) {
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        CHECK(gate_soft(g, a, b) == double(gate_truth(g, a, b)));
      }
    }
  }
}

TEST_CASE("gate_soft point values and domain checks") {
  CHECK(gate_soft(8, 0.5, 0.5) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(gate_soft(6, 0.5, 0.5) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(gate_soft(8, -0.1, 0.5), std::domain_error);
  CHECK_THROWS_AS(gate_soft(8, 0.5, 1.1), std::domain_error);
}

TEST_CASE("gate_soft stays in [0,1] and complements mirror") {
  SplitMix64 rng(42);
  for (int trial = 0; trial < 2000; ++trial) {
    const int g = int(rng.bounded(16));
    const double a = rng.uniform();
    const double b = rng.uniform();
    const double f = gate_soft(g, a, b);
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
    CHECK(gate_soft(15 - g, a, b) == doctest::Approx(1.0 - f).epsilon(1e-12));
  }
}

TEST_CASE("analytic gradients match central finite differences") {
  CHECK(gate_soft_grad(8, 0.3, 0.7).first == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(gate_soft_grad(8, 0.3, 0.7).second == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(gate_soft_grad(0, 0.3, 0.7).first == 0.0);
  CHECK(gate_soft_grad(0, 0.3, 0.7).second == 0.0);

  const double h = 1e-5;
  SplitMix64 rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    const int g = int(rng.bounded(16));
    const double a = h + (1.0 - 2.0 * h) * rng.uniform();
    const double b = h + (1.0 - 2.0 * h) * rng.uniform();
    const auto [da, db] = gate_soft_grad(g, a, b);
    const double fda = (gate_soft(g, a + h, b) - gate_soft(g, a - h, b)) / (2.0 * h);
    const double fdb = (gate_soft(g, a, b + h) - gate_soft(g, a, b - h)) / (2.0 * h);
    CHECK(std::abs(da - fda) <= 1e-6 * std::max(1.0, std::abs(da)));
    CHECK(std::abs(db - fdb) <= 1e-6 * std::max(1.0, std::abs(db)));
  }
}

TEST_CASE("softmax normalizes and mixture behaves") {
  SplitMix64 rng(99);
  GateWeights w;
  for (auto& v : w.logits) v = rng.normal() * 3.0;
  const auto p = softmax16(w.logits);
  double sum = 0.0;
  for (double v : p) {
    CHECK(v >= 0.0);
    sum += v;
  }
  CHECK(std::abs(sum - 1.0) < 1e-9);

  // degenerate softmax picks out one gate
  for (int j : {3, 6, 8, 15}) {
    GateWeights hot;
    hot.logits.fill(0.0);
    hot.logits[j] = 1e6;
    for (int t = 0; t < 20; ++t) {
      const double a = rng.uniform(), b = rng.uniform();
      CHECK(mixture_forward(hot, a, b) ==
            doctest::Approx(gate_soft(j, a, b)).epsilon(1e-12));
    }
  }

  // uniform weights at the (0,0) corner: mean over the 16 gate outputs,
  // computed here by enumeration
  GateWeights uniform;
  uniform.logits.fill(0.25);
  double expected = 0.0;
  for (int g = 0; g < 16; ++g) expected += gate_truth(g, 0, 0);
  expected /= 16.0;
  CHECK(expected == 0.5);  // eight gates output 1 at (0,0)
  CHECK(mixture_forward(uniform, 0.0, 0.0) == doctest::Approx(0.5).epsilon(1e-12));

  GateWeights one;
  one.logits.fill(0.0);
  one.logits[15] = 1e6;
  CHECK(mixture_forward(one, 0.123, 0.921) == doctest::Approx(1.0).epsilon(1e-12));

  GateWeights bad;
  bad.logits.fill(0.0);
  bad.logits[4] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(mixture_forward(bad, 0.5, 0.5), std::domain_error);

  // mixtures stay inside [0,1]
  for (int t = 0; t < 500; ++t) {
    GateWeights m;
    for (auto& v : m.logits) v = rng.normal() * 2.0;
    const double f = mixture_forward(m, rng.uniform(), rng.uniform());
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
  }
}
