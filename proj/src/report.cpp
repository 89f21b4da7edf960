#include "lgn/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lgn {

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::domain_error("pearson: length mismatch");
  if (x.size() < 2) throw std::domain_error("pearson: need at least 2 points");
  const double n = double(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw std::domain_error("pearson: zero variance, correlation undefined");
  }
  return sxy / std::sqrt(sxx * syy);
}

std::vector<ArchitectureSpec> table1_grid(int input_pixels, int class_count,
                                          uint64_t wiring_seed) {
  const std::vector<int> lws{1000, 2000, 4000, 8000, 16000, 32000, 64000};
  const std::vector<int> capped_lws{8000, 16000, 32000, 64000};
  const std::vector<int> bs{1, 2, 4, 8};
  const std::vector<double> fends{0.5, 0.75};
  const std::vector<int> fronts{2000, 4000};

  std::vector<ArchitectureSpec> grid;
  auto push = [&](int lw, int ld, int b, std::optional<int> front, std::optional<double> fend) {
    ArchitectureSpec s;
    s.layer_width = lw;
    s.depth = ld;
    s.bit_depth = b;
    s.front_width = front;
    s.end_fraction = fend;
    s.class_count = class_count;
    s.input_bits = input_pixels * b;
    s.wiring_seed = wiring_seed;
    s.validate();
    grid.push_back(std::move(s));
  };
  for (int lw : lws) {
    for (int ld = 1; ld <= 8; ++ld) {
      for (int b : bs) push(lw, ld, b, std::nullopt, std::nullopt);
    }
  }
  for (int lw : capped_lws) {
    for (int ld = 3; ld <= 6; ++ld) {
      for (int b : bs) {
        for (double f : fends) push(lw, ld, b, std::nullopt, f);
        for (int fr : fronts) push(lw, ld, b, fr, std::nullopt);
        for (double f : fends) {
          for (int fr : fronts) push(lw, ld, b, fr, f);
        }
      }
    }
  }
  return grid;
}

std::vector<GridRow> estimate_grid(const std::vector<ArchitectureSpec>& specs,
                                   const CalibrationParams& cal, const PipelinePlan& plan,
                                   bool parallel) {
  std::vector<GridRow> rows(specs.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
  for (long i = 0; i < long(specs.size()); ++i) {
    rows[i].spec = specs[i];
    rows[i].est = estimate(specs[i], cal, plan);
    rows[i].study = specs[i].study();
  }
  (void)parallel;
  return rows;
}

double CorrelationReport::at(const std::string& metric, const std::string& param) const {
  for (std::size_t i = 0; i < metrics.size(); ++i) {
    for (std::size_t j = 0; j < params.size(); ++j) {
      if (metrics[i] == metric && params[j] == param) return matrix[i][j];
    }
  }
  throw std::domain_error("correlation: unknown metric/param " + metric + "/" + param);
}

CorrelationReport correlation_matrix(const std::vector<GridRow>& rows) {
  std::vector<const GridRow*> use;
  for (const auto& r : rows) {
    if (r.study == "baseline" || r.study == "end_cap") use.push_back(&r);
  }
  if (use.size() < 2) throw std::domain_error("correlation: not enough baseline/end-cap rows");

  CorrelationReport rep;
  rep.metrics = {"lut_total", "ff_total", "cycles"};
  rep.params = {"b", "bits", "l_d", "l_w", "l_end", "gates"};
  auto metric_of = [](const GridRow& r, const std::string& m) -> double {
    if (m == "lut_total") return double(r.est.lut_total);
    if (m == "ff_total") return double(r.est.ff_total);
    return double(r.est.cycles);
  };
  auto param_of = [](const GridRow& r, const std::string& p) -> double {
    if (p == "b") return double(r.spec.bit_depth);
    if (p == "bits") return double(r.spec.input_bits);
    if (p == "l_d") return double(r.spec.depth);
    if (p == "l_w") return double(r.spec.layer_width);
    if (p == "l_end") return double(r.spec.padded_end_width());
    return double(r.spec.total_gates());
  };
  for (const auto& m : rep.metrics) {
    std::vector<double> row;
    std::vector<double> ys;
    for (const auto* r : use) ys.push_back(metric_of(*r, m));
    for (const auto& p : rep.params) {
      std::vector<double> xs;
      for (const auto* r : use) xs.push_back(param_of(*r, p));
      row.push_back(pearson(xs, ys));
    }
    rep.matrix.push_back(std::move(row));
  }
  return rep;
}

namespace {

std::string fend_label(const ArchitectureSpec& s) {
  if (!s.end_fraction) return "-";
  char buf[16];
  std::snprintf(buf, sizeof buf, "%g", *s.end_fraction);
  return buf;
}

std::string front_label(const ArchitectureSpec& s) {
  return s.front_width ? std::to_string(*s.front_width) : "-";
}

CapCell cell_stats(const std::vector<double>& deltas) {
  CapCell c;
  c.pairs = int(deltas.size());
  if (deltas.empty()) return c;
  double mean = 0;
  for (double d : deltas) mean += d;
  mean /= double(deltas.size());
  double var = 0;
  for (double d : deltas) var += (d - mean) * (d - mean);
  c.mean = mean;
  c.stddev = std::sqrt(var / double(deltas.size()));
  return c;
}

}  // namespace

CapComparison cap_comparison(const std::vector<GridRow>& rows) {
  if (rows.empty()) throw std::domain_error("cap_comparison: empty grid");
  std::map<std::string, const GridRow*> baselines;
  auto pair_key = [](const ArchitectureSpec& s) {
    return std::to_string(s.layer_width) + "/" + std::to_string(s.depth) + "/" +
           std::to_string(s.bit_depth) + "/" + std::to_string(s.wiring_seed);
  };
  for (const auto& r : rows) {
    if (r.study == "baseline") baselines[pair_key(r.spec)] = &r;
  }

  // metric -> f_end -> front -> deltas
  std::map<std::string, std::map<std::string, std::map<std::string, std::vector<double>>>> acc;
  CapComparison out;
  for (const auto& r : rows) {
    const std::string fe = fend_label(r.spec);
    const std::string fr = front_label(r.spec);
    if (r.study == "baseline") {
      // baseline-vs-itself column: zero deltas by definition
      acc["lut_pct"][fe][fr].push_back(0.0);
      acc["ff_pct"][fe][fr].push_back(0.0);
      acc["cycles"][fe][fr].push_back(0.0);
      if (r.accuracy) acc["accuracy_pct"][fe][fr].push_back(0.0);
      continue;
    }
    const auto it = baselines.find(pair_key(r.spec));
    if (it == baselines.end()) {
      out.warnings.push_back("no matched baseline for spec " + spec_hash(r.spec) + " (" +
                             r.study + " L_W=" + std::to_string(r.spec.layer_width) +
                             " L_D=" + std::to_string(r.spec.depth) + " b=" +
                             std::to_string(r.spec.bit_depth) + ")");
      continue;
    }
    const GridRow& b = *it->second;
    acc["lut_pct"][fe][fr].push_back(
        100.0 * (double(r.est.lut_total) - double(b.est.lut_total)) / double(b.est.lut_total));
    acc["ff_pct"][fe][fr].push_back(
        100.0 * (double(r.est.ff_total) - double(b.est.ff_total)) / double(b.est.ff_total));
    acc["cycles"][fe][fr].push_back(double(r.est.cycles - b.est.cycles));
    if (r.accuracy && b.accuracy) {
      acc["accuracy_pct"][fe][fr].push_back(100.0 * (*r.accuracy - *b.accuracy));
    }
  }
  for (auto& [metric, by_fe] : acc) {
    for (auto& [fe, by_fr] : by_fe) {
      for (auto& [fr, deltas] : by_fr) out.cells[metric][fe][fr] = cell_stats(deltas);
    }
  }
  return out;
}

std::string grid_csv(const std::vector<GridRow>& rows) {
  std::string out =
      "spec_hash,study,b,bits,l_w,l_d,l_front,f_end,l_end,gates,lut_input,lut_logic,"
      "lut_sum,lut_delta,lut_total,ff_total,cycles,power_watts,fits_slr,fits_device,"
      "wiring_seed,class_count,accuracy\n";
  char buf[64];
  for (const auto& r : rows) {
    const auto& s = r.spec;
    out += spec_hash(s) + "," + r.study + "," + std::to_string(s.bit_depth) + "," +
           std::to_string(s.input_bits) + "," + std::to_string(s.layer_width) + "," +
           std::to_string(s.depth) + ",";
    out += s.front_width ? std::to_string(*s.front_width) : "";
    out += ",";
    if (s.end_fraction) {
      std::snprintf(buf, sizeof buf, "%g", *s.end_fraction);
      out += buf;
    }
    out += "," + std::to_string(s.padded_end_width()) + "," + std::to_string(s.total_gates());
    out += "," + std::to_string(r.est.lut_input) + "," + std::to_string(r.est.lut_logic) + "," +
           std::to_string(r.est.lut_sum) + "," + std::to_string(r.est.lut_delta) + "," +
           std::to_string(r.est.lut_total) + "," + std::to_string(r.est.ff_total) + "," +
           std::to_string(r.est.cycles);
    std::snprintf(buf, sizeof buf, ",%.6f,", r.est.power_watts);
    out += buf;
    out += std::string(r.est.fits_slr ? "1" : "0") + "," + (r.est.fits_device ? "1" : "0");
    out += "," + std::to_string(s.wiring_seed) + "," + std::to_string(s.class_count) + ",";
    if (r.accuracy) {
      std::snprintf(buf, sizeof buf, "%.6f", *r.accuracy);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

std::vector<GridRow> parse_grid_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::domain_error("grid csv: empty file");
  std::vector<GridRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::string cur;
    for (char ch : line) {
      if (ch == ',') {
        f.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
    f.push_back(cur);
    if (f.size() != 23) throw std::domain_error("grid csv: bad column count");
    GridRow r;
    r.study = f[1];
    r.spec.bit_depth = std::stoi(f[2]);
    r.spec.input_bits = std::stoi(f[3]);
    r.spec.layer_width = std::stoi(f[4]);
    r.spec.depth = std::stoi(f[5]);
    if (!f[6].empty()) r.spec.front_width = std::stoi(f[6]);
    if (!f[7].empty()) r.spec.end_fraction = std::stod(f[7]);
    r.est.lut_input = std::stoll(f[10]);
    r.est.lut_logic = std::stoll(f[11]);
    r.est.lut_sum = std::stoll(f[12]);
    r.est.lut_delta = std::stoll(f[13]);
    r.est.lut_total = std::stoll(f[14]);
    r.est.ff_total = std::stoll(f[15]);
    r.est.cycles = std::stoi(f[16]);
    r.est.power_watts = std::stod(f[17]);
    r.est.fits_slr = f[18] == "1";
    r.est.fits_device = f[19] == "1";
    r.spec.wiring_seed = std::stoull(f[20]);
    r.spec.class_count = std::stoi(f[21]);
    if (!f[22].empty()) r.accuracy = std::stod(f[22]);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string correlation_csv(const CorrelationReport& r) {
  std::string out = "metric";
  for (const auto& p : r.params) out += "," + p;
  out += "\n";
  char buf[32];
  for (std::size_t i = 0; i < r.metrics.size(); ++i) {
    out += r.metrics[i];
    for (std::size_t j = 0; j < r.params.size(); ++j) {
      std::snprintf(buf, sizeof buf, ",%.4f", r.matrix[i][j]);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

std::string cap_comparison_csv(const CapComparison& c) {
  std::string out = "metric,f_end,l_front,mean,stddev,pairs\n";
  char buf[64];
  for (const auto& [metric, by_fe] : c.cells) {
    for (const auto& [fe, by_fr] : by_fe) {
      for (const auto& [fr, cell] : by_fr) {
        std::snprintf(buf, sizeof buf, ",%.4f,%.4f,%d\n", cell.mean, cell.stddev, cell.pairs);
        out += metric + "," + fe + "," + fr + buf;
      }
    }
  }
  return out;
}

}  // namespace lgn
