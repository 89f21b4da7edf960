#include <doctest.h>

#include <cmath>

#include "lgn/common.hpp"
#include "lgn/report.hpp"

using namespace lgn;

namespace {

GridRow make_row(int lw, int ld, int b, std::optional<double> fend, long long lut,
                 long long ff, int cycles) {
  GridRow r;
  r.spec.layer_width = lw;
  r.spec.depth = ld;
  r.spec.bit_depth = b;
  r.spec.end_fraction = fend;
  r.spec.class_count = 10;
  r.spec.input_bits = 784 * b;
  r.spec.wiring_seed = 1;
  r.study = r.spec.study();
  r.est.lut_total = lut;
  r.est.lut_input = lut / 4;
  r.est.lut_logic = lut / 4;
  r.est.lut_sum = lut / 4;
  r.est.lut_delta = lut - 3 * (lut / 4);
  r.est.ff_total = ff;
  r.est.cycles = cycles;
  r.est.power_watts = 13.0;
  return r;
}

}  // namespace

TEST_CASE("pearson: exact values and direct-formula agreement") {
  CHECK(pearson({1, 2, 3}, {2, 4, 6}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pearson({1, 2, 3}, {3, 2, 1}) == doctest::Approx(-1.0).epsilon(1e-12));

  SplitMix64 rng(19);
  std::vector<double> x, y;
  for (int i = 0; i < 200; ++i) {
    x.push_back(rng.uniform() * 100.0);
    y.push_back(rng.uniform() * 50.0 + 0.2 * x.back());
  }
  // direct sum formula with long double accumulation as the oracle
  long double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  const long double n = x.size();
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
    sxy += x[i] * y[i];
  }
  const long double r_direct =
      (n * sxy - sx * sy) / sqrtl((n * sxx - sx * sx) * (n * syy - sy * sy));
  CHECK(std::abs(pearson(x, y) - double(r_direct)) < 1e-12);
  CHECK(pearson(x, y) == pearson(y, x));
  CHECK(pearson(x, y) >= -1.0);
  CHECK(pearson(x, y) <= 1.0);

  CHECK_THROWS_AS(pearson({1, 1, 1}, {1, 2, 3}), std::domain_error);
  CHECK_THROWS_AS(pearson({1}, {2}), std::domain_error);
  CHECK_THROWS_AS(pearson({1, 2}, {1, 2, 3}), std::domain_error);
}

TEST_CASE("cap comparison on a constructed grid reports exact percentages") {
  std::vector<GridRow> rows;
  // matched pairs: capped LUTs exactly 0.72x baseline
  for (int lw : {8000, 16000}) {
    for (int ld : {3, 4}) {
      rows.push_back(make_row(lw, ld, 1, {}, 100000, 20000, 12));
      rows.push_back(make_row(lw, ld, 1, 0.5, 72000, 18000, 11));
    }
  }
  const CapComparison cc = cap_comparison(rows);
  const CapCell cell = cc.cells.at("lut_pct").at("0.5").at("-");
  CHECK(cell.pairs == 4);
  CHECK(cell.mean == doctest::Approx(-28.0).epsilon(1e-9));
  CHECK(cell.stddev == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
  const CapCell cyc = cc.cells.at("cycles").at("0.5").at("-");
  CHECK(cyc.mean == doctest::Approx(-1.0).epsilon(1e-9));
  // baseline reference column is zero by definition
  CHECK(cc.cells.at("lut_pct").at("-").at("-").mean == doctest::Approx(0.0));
  CHECK(cc.warnings.empty());

  // unmatched capped rows are excluded with a warning
  rows.push_back(make_row(32000, 5, 2, 0.75, 50000, 9000, 10));
  const CapComparison with_warn = cap_comparison(rows);
  CHECK(with_warn.warnings.size() == 1);

  CHECK_THROWS_AS(cap_comparison({}), std::domain_error);
}

TEST_CASE("the canonical grid drives Table-style reports") {
  const auto specs = table1_grid();
  CHECK(specs.size() == 224 + 128 + 128 + 256);
  for (const auto& s : specs) CHECK_NOTHROW(s.validate());

  const auto rows = estimate_grid(specs, CalibrationParams{}, PipelinePlan{});
  const CorrelationReport corr = correlation_matrix(rows);
  for (const auto& row : corr.matrix) {
    for (double v : row) {
      CHECK(v >= -1.0);
      CHECK(v <= 1.0);
    }
  }
  // expected ordering: LUTs track L_end, FFs track b
  CHECK(corr.at("lut_total", "l_end") > corr.at("lut_total", "b"));
  CHECK(corr.at("lut_total", "l_end") > corr.at("lut_total", "l_d"));
  CHECK(corr.at("ff_total", "b") > corr.at("ff_total", "l_end"));

  // the ordering also holds over the baseline rows alone
  std::vector<GridRow> baselines;
  for (const auto& r : rows) {
    if (r.study == "baseline") baselines.push_back(r);
  }
  const CorrelationReport base_corr = correlation_matrix(baselines);
  CHECK(base_corr.at("lut_total", "l_end") > base_corr.at("lut_total", "b"));
  CHECK(base_corr.at("lut_total", "l_end") > base_corr.at("lut_total", "l_d"));
  CHECK(base_corr.at("ff_total", "b") > base_corr.at("ff_total", "l_end"));

  const CapComparison cc = cap_comparison(rows);
  const CapCell end_only = cc.cells.at("lut_pct").at("0.5").at("-");
  CHECK(end_only.pairs == 64);
  CHECK(end_only.mean <= -13.7);
  CHECK(end_only.mean >= -42.5);
  const CapCell end_weak = cc.cells.at("lut_pct").at("0.75").at("-");
  CHECK(std::abs(end_weak.mean) < std::abs(end_only.mean));
}

TEST_CASE("grid CSV round-trips") {
  const auto specs = table1_grid(784, 10, 3);
  std::vector<ArchitectureSpec> few(specs.begin(), specs.begin() + 40);
  auto rows = estimate_grid(few, CalibrationParams{}, PipelinePlan{});
  rows[0].accuracy = 0.912345;
  const std::string csv = grid_csv(rows);
  const auto back = parse_grid_csv(csv);
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(spec_hash(back[i].spec) == spec_hash(rows[i].spec));
    CHECK(back[i].est.lut_total == rows[i].est.lut_total);
    CHECK(back[i].est.ff_total == rows[i].est.ff_total);
    CHECK(back[i].est.cycles == rows[i].est.cycles);
    CHECK(back[i].study == rows[i].study);
  }
  CHECK(back[0].accuracy.has_value());
  CHECK(*back[0].accuracy == doctest::Approx(0.912345));
  CHECK_THROWS_AS(parse_grid_csv(""), std::domain_error);
}
