#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "lgn/search.hpp"

using namespace lgn;

TEST_CASE("sample_space stays inside the standard bounds") {
  SampleBounds bounds;
  const auto specs = sample_space(bounds, 100, 42, 784, 10);
  REQUIRE(specs.size() == 100);
  for (const auto& s : specs) {
    CHECK(s.layer_width >= 1000);
    CHECK(s.layer_width <= 64000);
    CHECK(s.depth >= 1);
    CHECK(s.depth <= 8);
    CHECK(s.bit_depth >= 1);
    CHECK(s.bit_depth <= 8);
    CHECK(s.input_bits == 784 * s.bit_depth);
    if (s.front_width) {
      CHECK(*s.front_width >= 2000);
      CHECK(*s.front_width <= 4000);
      CHECK(s.layer_width >= 8000);
      CHECK(s.depth >= 3);
      CHECK(s.depth <= 6);
    }
    if (s.end_fraction) {
      CHECK((*s.end_fraction == 0.5 || *s.end_fraction == 0.75));
      CHECK(s.layer_width >= 8000);
    }
    CHECK_NOTHROW(s.validate());
  }

  const auto again = sample_space(bounds, 100, 42, 784, 10);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    CHECK(spec_hash(specs[i]) == spec_hash(again[i]));
  }

  // bounds pinned to a point yield identical specs
  SampleBounds point;
  point.lw_min = point.lw_max = 4000;
  point.ld_min = point.ld_max = 3;
  point.b_min = point.b_max = 2;
  point.allow_front = point.allow_end = false;
  const auto fixed = sample_space(point, 5, 1, 784, 10);
  for (const auto& s : fixed) {
    CHECK(s.layer_width == 4000);
    CHECK(s.depth == 3);
    CHECK(s.bit_depth == 2);
  }
  CHECK_THROWS_AS(sample_space(bounds, 0, 1, 784, 10), std::domain_error);
}

TEST_CASE("proxy score orders depth up and bit depth down") {
  ArchitectureSpec a;
  a.layer_width = 8000;
  a.depth = 3;
  a.bit_depth = 1;
  a.input_bits = 784;
  ArchitectureSpec deeper = a;
  deeper.depth = 5;
  ArchitectureSpec more_bits = a;
  more_bits.bit_depth = 4;
  more_bits.input_bits = 784 * 4;

  CHECK(proxy_score(deeper) > proxy_score(a));
  CHECK(proxy_score(more_bits) < proxy_score(a));
  CHECK(proxy_score(a) == proxy_score(a));
}

TEST_CASE("search returns only audited-feasible candidates, Pareto-clean") {
  Budget budget;
  budget.lut_budget = kSlrLuts;
  budget.require_single_slr = true;
  budget.max_cycles = 12;
  budget.ff_budget = 200000;
  SearchConfig cfg;
  cfg.samples = 160;
  cfg.chains = 4;
  cfg.steps_per_chain = 24;
  cfg.seed = 7;
  const CalibrationParams cal;
  const PipelinePlan plan;

  const SearchOutcome out = search(budget, cfg, cal, plan);
  REQUIRE(!out.pareto.empty());
  for (const auto& c : out.pareto) {
    // independent re-audit
    const ResourceEstimate redo = estimate(c.spec, cal, plan);
    CHECK(redo.lut_total == c.estimate.lut_total);
    CHECK(redo.lut_total <= kSlrLuts);
    CHECK(redo.cycles <= 12);
    CHECK(redo.ff_total <= budget.ff_budget);
    CHECK(feasible_under(redo, budget));
  }
  // brute-force dominance check
  for (const auto& a : out.pareto) {
    for (const auto& b : out.pareto) {
      if (&a != &b) CHECK(!dominates(a, b));
    }
  }
  // determinism
  const SearchOutcome again = search(budget, cfg, cal, plan);
  REQUIRE(again.pareto.size() == out.pareto.size());
  for (std::size_t i = 0; i < out.pareto.size(); ++i) {
    CHECK(spec_hash(again.pareto[i].spec) == spec_hash(out.pareto[i].spec));
  }
}

TEST_CASE("infeasible budgets return empty with diagnostics") {
  Budget budget;
  budget.lut_budget = 1;
  SearchConfig cfg;
  cfg.samples = 32;
  cfg.chains = 2;
  cfg.steps_per_chain = 4;
  const SearchOutcome out = search(budget, cfg, CalibrationParams{}, PipelinePlan{});
  CHECK(out.pareto.empty());
  CHECK(out.feasible_seen == 0);
  REQUIRE(out.nearest_miss.has_value());
  CHECK(!out.nearest_miss->reason.empty());
}

TEST_CASE("the L_end soft constraint lowers the median end width") {
  Budget budget;
  budget.lut_budget = kSlrLuts;
  SearchConfig cfg;
  cfg.samples = 128;
  cfg.chains = 6;
  cfg.steps_per_chain = 40;
  cfg.seed = 11;
  cfg.lambda_lend = 0.0;
  const SearchOutcome loose = search(budget, cfg, CalibrationParams{}, PipelinePlan{});
  cfg.lambda_lend = 1e-3;
  const SearchOutcome tight = search(budget, cfg, CalibrationParams{}, PipelinePlan{});
  REQUIRE(!loose.pareto.empty());
  REQUIRE(!tight.pareto.empty());
  auto median_lend = [](const SearchOutcome& o) {
    std::vector<int> v;
    for (const auto& c : o.pareto) v.push_back(c.spec.padded_end_width());
    std::sort(v.begin(), v.end());
    return double(v[v.size() / 2]);
  };
  CHECK(median_lend(tight) < median_lend(loose));
}

TEST_CASE("feasible count responds monotonically to the budget") {
  SearchConfig cfg;
  cfg.samples = 96;
  cfg.chains = 0;
  cfg.seed = 3;
  Budget small;
  small.lut_budget = 30000;
  Budget large = small;
  large.lut_budget = 300000;
  const auto a = search(small, cfg, CalibrationParams{}, PipelinePlan{});
  const auto b = search(large, cfg, CalibrationParams{}, PipelinePlan{});
  CHECK(b.feasible_seen >= a.feasible_seen);
}

TEST_CASE("refine_with_measurements recovers known parameters") {
  CalibrationParams truth;
  truth.survival = 0.34;
  truth.delta_const = 3100.0;
  truth.ff_per_input_bit = 2.4;
  truth.ff_per_group_bit = 0.09;
  const PipelinePlan plan;

  SampleBounds bounds;
  const auto specs = sample_space(bounds, 10, 5, 784, 10);
  std::vector<Measurement> measured;
  for (const auto& s : specs) {
    const ResourceEstimate e = estimate(s, truth, plan);
    measured.push_back(Measurement{s, e.lut_total, e.ff_total});
  }
  const CalibrationParams base;  // defaults, different from truth
  const CalibrationParams fit = refine_with_measurements(base, measured, plan);
  CHECK(std::abs(fit.survival - truth.survival) / truth.survival < 0.01);
  CHECK(std::abs(fit.delta_const - truth.delta_const) / truth.delta_const < 0.01);
  CHECK(std::abs(fit.ff_per_input_bit - truth.ff_per_input_bit) / truth.ff_per_input_bit < 0.01);

  // split-fit validation: refit on half, error drops on the held-out half
  std::vector<Measurement> train_half(measured.begin(), measured.begin() + 5);
  std::vector<Measurement> test_half(measured.begin() + 5, measured.end());
  const CalibrationParams half_fit = refine_with_measurements(base, train_half, plan);
  double mae_base = 0, mae_fit = 0;
  for (const auto& m : test_half) {
    mae_base += std::abs(double(estimate(m.spec, base, plan).lut_total - m.lut_synth));
    mae_fit += std::abs(double(estimate(m.spec, half_fit, plan).lut_total - m.lut_synth));
  }
  CHECK(mae_fit < mae_base);

  CHECK_THROWS_AS(refine_with_measurements(base, {measured[0]}, plan), std::domain_error);
  // degenerate: identical gate counts
  std::vector<Measurement> degenerate{measured[0], measured[0]};
  CHECK_THROWS_AS(refine_with_measurements(base, degenerate, plan), std::domain_error);
}

TEST_CASE("budget and search config JSON round-trip with key checking") {
  nlohmann::json jb{{"lut_budget", 297333}, {"ff_budget", 100000},
                    {"input_pixels", 784},  {"require_single_slr", true},
                    {"max_cycles", 12}};
  const Budget b = jb.get<Budget>();
  CHECK(b.require_single_slr);
  CHECK(*b.max_cycles == 12);
  jb["oops"] = 1;
  CHECK_THROWS_AS(jb.get<Budget>(), std::domain_error);

  nlohmann::json jc{{"samples", 64}, {"lambda_lend", 0.001}};
  const SearchConfig c = jc.get<SearchConfig>();
  CHECK(c.samples == 64);
  CHECK(c.lambda_lend == 0.001);
  jc["bogus"] = 2;
  CHECK_THROWS_AS(jc.get<SearchConfig>(), std::domain_error);
}
