#include "lgn/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lgn/compiler.hpp"
#include "lgn/dataset.hpp"
#include "lgn/estimator.hpp"
#include "lgn/jsonio.hpp"
#include "lgn/netsim.hpp"
#include "lgn/report.hpp"
#include "lgn/search.hpp"
#include "lgn/trainer.hpp"

namespace fs = std::filesystem;

namespace lgn::cli {

namespace {

std::string out_dir() {
  const char* env = std::getenv("LGN_OUT_DIR");
  return env && *env ? env : ".";
}

std::string resolve_out(const std::string& value, const std::string& fallback_name) {
  if (!value.empty()) return value;
  return (fs::path(out_dir()) / fallback_name).string();
}

TrainConfig load_train_config(const std::string& path) {
  TrainConfig cfg;
  if (path.empty()) return cfg;
  const nlohmann::json j = read_json(path);
  check_keys(j, "train config",
             {"learning_rate", "batch_size", "patience", "max_epochs", "tau", "seed", "folds",
              "optimizer", "grad_chunks", "parallel", "verbose"});
  if (j.contains("learning_rate")) cfg.learning_rate = j.at("learning_rate").get<double>();
  if (j.contains("batch_size")) cfg.batch_size = j.at("batch_size").get<int>();
  if (j.contains("patience")) cfg.patience = j.at("patience").get<int>();
  if (j.contains("max_epochs")) cfg.max_epochs = j.at("max_epochs").get<int>();
  if (j.contains("tau")) cfg.tau = j.at("tau").get<double>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<uint64_t>();
  if (j.contains("folds")) cfg.folds = j.at("folds").get<int>();
  if (j.contains("optimizer")) cfg.optimizer = j.at("optimizer").get<std::string>();
  if (j.contains("grad_chunks")) cfg.grad_chunks = j.at("grad_chunks").get<int>();
  if (j.contains("parallel")) cfg.parallel = j.at("parallel").get<bool>();
  if (j.contains("verbose")) cfg.verbose = j.at("verbose").get<bool>();
  cfg.validate();
  return cfg;
}

CalibrationParams load_cal_or_default(const std::string& path) {
  if (path.empty()) return CalibrationParams{};
  return load_calibration(path);
}

struct PlanFlags {
  int levels_per_stage = 2;
  int input_stages = 1;
  int output_stages = 1;

  PipelinePlan plan() const {
    PipelinePlan p;
    p.levels_per_stage = levels_per_stage;
    p.input_stages = input_stages;
    p.output_stages = output_stages;
    p.validate();
    return p;
  }
};

void add_plan_flags(CLI::App* cmd, PlanFlags& pf) {
  cmd->add_option("--levels-per-stage", pf.levels_per_stage,
                  "combinational levels packed per pipeline stage");
  cmd->add_option("--input-stages", pf.input_stages, "input capture stages");
  cmd->add_option("--output-stages", pf.output_stages, "output register stages");
}

int cmd_encode(const std::string& dataset, const std::string& images, const std::string& labels,
               const std::vector<std::string>& cifar_batches, int bits, long limit, int classes,
               const std::string& out) {
  const DatasetKind kind = dataset_kind_from_name(dataset);
  auto class_count = [&](const std::vector<uint8_t>& lv) {
    if (classes > 0) return classes;
    int top = 1;
    for (uint8_t l : lv) top = std::max(top, int(l) + 1);
    return std::max(top, 2);
  };
  EncodedDataset ds;
  if (kind == DatasetKind::cifar10) {
    if (cifar_batches.empty()) throw std::runtime_error("encode: cifar10 needs --cifar-batch");
    ByteTensor images_t;
    std::vector<uint8_t> labels_v;
    std::size_t count = 0;
    std::vector<uint8_t> pixels;
    for (const auto& path : cifar_batches) {
      const auto batch = load_cifar10_grayscale(read_file_bytes(path));
      pixels.insert(pixels.end(), batch.pixels.begin(), batch.pixels.end());
      labels_v.insert(labels_v.end(), batch.labels.begin(), batch.labels.end());
      count += batch.count;
    }
    images_t.dims = {count, 32, 32};
    images_t.data = std::move(pixels);
    if (limit > 0 && std::size_t(limit) < count) {
      images_t.dims[0] = std::size_t(limit);
      images_t.data.resize(std::size_t(limit) * 1024);
      labels_v.resize(std::size_t(limit));
    }
    ds = encode_dataset(kind, images_t, labels_v, bits, class_count(labels_v));
  } else {
    if (images.empty() || labels.empty()) {
      throw std::runtime_error("encode: need --images and --labels IDX files");
    }
    ByteTensor images_t = parse_idx_file(images);
    ByteTensor labels_t = parse_idx_file(labels);
    if (labels_t.dims.size() != 1 || labels_t.count() != images_t.count()) {
      throw std::runtime_error("encode: image/label tensors disagree");
    }
    std::vector<uint8_t> labels_v(labels_t.data.begin(), labels_t.data.end());
    if (limit > 0 && std::size_t(limit) < images_t.count()) {
      images_t.dims[0] = std::size_t(limit);
      images_t.data.resize(std::size_t(limit) * images_t.item_size());
      labels_v.resize(std::size_t(limit));
    }
    ds = encode_dataset(kind, images_t, labels_v, bits, class_count(labels_v));
  }
  write_cache(out, ds);
  std::printf("encoded %zu rows, %zu bits/row (b=%d) -> %s\n", ds.size(), ds.bits(),
              ds.bit_depth, out.c_str());
  return 0;
}

int cmd_train(const std::string& cache, const std::string& arch, const std::string& config,
              long long seed_override, int folds_override, const std::string& out) {
  const EncodedDataset ds = read_cache(cache);
  const auto spec = read_json(arch).get<ArchitectureSpec>();
  TrainConfig cfg = load_train_config(config);
  if (seed_override >= 0) cfg.seed = uint64_t(seed_override);
  if (folds_override > 0) cfg.folds = folds_override;

  const SplitPlan plan = make_splits(ds, cfg.seed, 5);
  const TrainedResult result = train(spec, ds, cfg, &plan);

  const double test_soft = evaluate(result.model, ds, plan.test, EvalMode::soft, cfg.tau);
  const double test_hard = evaluate(result.model, ds, plan.test, EvalMode::hard, cfg.tau);

  nlohmann::json folds = nlohmann::json::array();
  for (const auto& m : result.folds) {
    folds.push_back({{"fold", m.fold},
                     {"epochs_run", m.epochs_run},
                     {"best_val_loss", m.best_val_loss},
                     {"val_accuracy", m.val_accuracy},
                     {"val_accuracy_hard", m.val_accuracy_hard},
                     {"final_train_loss", m.final_train_loss}});
  }
  nlohmann::json metrics{{"folds", folds},
                         {"best_fold", result.best_fold},
                         {"val_acc_mean", result.val_acc_mean},
                         {"val_acc_std", result.val_acc_std},
                         {"test_accuracy_soft", test_soft},
                         {"test_accuracy_hard", test_hard}};
  save_model(out, result.model, metrics);
  std::printf("trained %d folds: val %.4f +- %.4f, test soft %.4f hard %.4f -> %s\n",
              int(result.folds.size()), result.val_acc_mean, result.val_acc_std, test_soft,
              test_hard, out.c_str());
  return 0;
}

int cmd_compile(const std::string& model, const PlanFlags& pf, bool no_prune,
                const std::string& module_name, const std::string& out,
                const std::string& verilog_out) {
  const SoftLgn net = load_model(model);
  const HardLgn hard = discretize(net);
  Netlist nl = build_netlist(hard, pf.plan());
  if (!no_prune) nl = prune(nl);
  save_netlist(out, nl);
  std::printf("netlist: %zu nodes, %lld/%lld gates after prune, %d stages -> %s\n",
              nl.nodes.size(), nl.meta.gates_after, nl.meta.gates_before, nl.stages,
              out.c_str());
  if (!verilog_out.empty()) {
    write_file_atomic(verilog_out, emit_verilog(nl, module_name));
    std::printf("verilog -> %s\n", verilog_out.c_str());
  }
  return 0;
}

int cmd_simulate(const std::string& netlist, const std::string& cache, const std::string& bits,
                 long limit, const std::string& out, const std::string& trace_out) {
  const Netlist nl = load_netlist(netlist);
  nlohmann::json result;
  if (!bits.empty()) {
    std::vector<uint8_t> in;
    for (char c : bits) {
      if (c == '0' || c == '1') in.push_back(uint8_t(c - '0'));
    }
    const int cls = simulate(nl, in);
    result = {{"class", cls}};
    std::printf("class %d\n", cls);
  } else if (!cache.empty()) {
    const EncodedDataset ds = read_cache(cache);
    std::vector<uint32_t> rows;
    const std::size_t n = limit > 0 ? std::min<std::size_t>(ds.size(), std::size_t(limit))
                                    : ds.size();
    for (uint32_t i = 0; i < n; ++i) rows.push_back(i);
    const auto preds = simulate_batch(nl, ds.inputs, rows);
    long correct = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (preds[i] == ds.labels[rows[i]]) ++correct;
    }
    result = {{"count", rows.size()},
              {"accuracy", double(correct) / double(rows.size())},
              {"predictions", preds}};
    std::printf("simulated %zu rows, accuracy %.4f\n", rows.size(),
                double(correct) / double(rows.size()));
  } else {
    throw std::runtime_error("simulate: need --cache or --bits");
  }
  if (!trace_out.empty()) {
    // pipelined trace of the first few inputs
    std::vector<std::vector<uint8_t>> ins;
    if (!bits.empty()) {
      std::vector<uint8_t> in;
      for (char c : bits) {
        if (c == '0' || c == '1') in.push_back(uint8_t(c - '0'));
      }
      ins.push_back(in);
    } else {
      const EncodedDataset ds = read_cache(cache);
      const std::size_t n = std::min<std::size_t>(ds.size(), 4);
      for (std::size_t r = 0; r < n; ++r) {
        std::vector<uint8_t> in(ds.bits());
        for (std::size_t c = 0; c < ds.bits(); ++c) in[c] = uint8_t(ds.inputs.get(r, c));
        ins.push_back(std::move(in));
      }
    }
    const SimTrace trace = simulate_pipelined(nl, ins, true);
    std::string text;
    for (const auto& line : trace.lines) text += line + "\n";
    write_file_atomic(trace_out, text);
  }
  if (!out.empty()) write_json_atomic(out, result);
  return 0;
}

int cmd_estimate(const std::string& arch, const std::string& netlist, const std::string& cal_path,
                 const PlanFlags& pf, const std::string& out, const std::string& csv_out) {
  const CalibrationParams cal = load_cal_or_default(cal_path);
  ResourceEstimate est;
  if (!netlist.empty()) {
    est = estimate(load_netlist(netlist), cal);
  } else if (!arch.empty()) {
    est = estimate(read_json(arch).get<ArchitectureSpec>(), cal, pf.plan());
  } else {
    throw std::runtime_error("estimate: need --arch or --netlist");
  }
  nlohmann::json j;
  to_json(j, est);
  write_json_atomic(out, j);
  if (!csv_out.empty()) {
    std::string csv;
    if (!fs::exists(csv_out)) {
      csv = "source,lut_input,lut_logic,lut_sum,lut_delta,lut_total,ff_total,cycles,"
            "power_watts,fits_slr,fits_device\n";
    } else {
      const auto bytes = read_file_bytes(csv_out);
      csv.assign(bytes.begin(), bytes.end());
    }
    char buf[64];
    csv += (netlist.empty() ? arch : netlist) + "," + std::to_string(est.lut_input) + "," +
           std::to_string(est.lut_logic) + "," + std::to_string(est.lut_sum) + "," +
           std::to_string(est.lut_delta) + "," + std::to_string(est.lut_total) + "," +
           std::to_string(est.ff_total) + "," + std::to_string(est.cycles);
    std::snprintf(buf, sizeof buf, ",%.6f,", est.power_watts);
    csv += buf;
    csv += std::string(est.fits_slr ? "1" : "0") + "," + (est.fits_device ? "1" : "0") + "\n";
    write_file_atomic(csv_out, csv);
  }
  std::printf("lut_total %lld (input %lld logic %lld sum %lld delta %lld) ff %lld cycles %d "
              "power %.2fW slr=%d -> %s\n",
              est.lut_total, est.lut_input, est.lut_logic, est.lut_sum, est.lut_delta,
              est.ff_total, est.cycles, est.power_watts, est.fits_slr ? 1 : 0, out.c_str());
  return 0;
}

int cmd_search(const std::string& budget_path, const std::string& config_path,
               const std::string& cal_path, const PlanFlags& pf, const std::string& out,
               const std::string& csv_out) {
  const auto budget = read_json(budget_path).get<Budget>();
  SearchConfig cfg;
  if (!config_path.empty()) cfg = read_json(config_path).get<SearchConfig>();
  const CalibrationParams cal = load_cal_or_default(cal_path);
  const SearchOutcome outcome = search(budget, cfg, cal, pf.plan());

  nlohmann::json j{{"version", 1},
                   {"kind", "lgn-search-results"},
                   {"evaluated", outcome.evaluated},
                   {"feasible_seen", outcome.feasible_seen},
                   {"pareto", outcome.pareto}};
  if (outcome.nearest_miss) {
    j["nearest_miss"] = {{"spec", outcome.nearest_miss->spec},
                         {"estimate", outcome.nearest_miss->estimate},
                         {"reason", outcome.nearest_miss->reason}};
  }
  write_json_atomic(out, j);
  if (!csv_out.empty()) {
    std::string csv =
        "spec_hash,study,b,l_w,l_d,l_front,f_end,l_end,lut_total,ff_total,cycles,"
        "power_watts,proxy_score\n";
    char buf[64];
    for (const auto& c : outcome.pareto) {
      const auto& s = c.spec;
      csv += spec_hash(s) + "," + s.study() + "," + std::to_string(s.bit_depth) + "," +
             std::to_string(s.layer_width) + "," + std::to_string(s.depth) + ",";
      csv += s.front_width ? std::to_string(*s.front_width) : "";
      csv += ",";
      if (s.end_fraction) {
        std::snprintf(buf, sizeof buf, "%g", *s.end_fraction);
        csv += buf;
      }
      csv += "," + std::to_string(s.padded_end_width()) + "," +
             std::to_string(c.estimate.lut_total) + "," + std::to_string(c.estimate.ff_total) +
             "," + std::to_string(c.estimate.cycles);
      std::snprintf(buf, sizeof buf, ",%.4f,%.4f\n", c.estimate.power_watts, c.proxy);
      csv += buf;
    }
    write_file_atomic(csv_out, csv);
  }
  if (outcome.pareto.empty()) {
    std::fprintf(stderr, "no feasible candidate found (%zu evaluated)\n", outcome.evaluated);
    if (outcome.nearest_miss) {
      std::fprintf(stderr, "nearest miss: %s\n", outcome.nearest_miss->reason.c_str());
    }
    return 3;
  }
  std::printf("pareto set: %zu candidates (%zu feasible of %zu evaluated) -> %s\n",
              outcome.pareto.size(), outcome.feasible_seen, outcome.evaluated, out.c_str());
  return 0;
}

int cmd_grid(bool table1, const std::string& cal_path, const PlanFlags& pf, int input_pixels,
             int classes, bool serial, const std::string& out_dir_path) {
  if (!table1) throw std::runtime_error("grid: only --table1 is available");
  const CalibrationParams cal = load_cal_or_default(cal_path);
  const PipelinePlan plan = pf.plan();
  const auto specs = table1_grid(input_pixels, classes);

  fs::create_directories(fs::path(out_dir_path) / "rows");
  std::vector<GridRow> rows(specs.size());
  std::vector<std::size_t> missing;
  std::size_t reused = 0;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    rows[i].spec = specs[i];
    rows[i].study = specs[i].study();
    const fs::path row_path =
        fs::path(out_dir_path) / "rows" / (spec_hash(specs[i]) + ".json");
    if (fs::exists(row_path)) {
      from_json(read_json(row_path.string()).at("estimate"), rows[i].est);
      ++reused;
    } else {
      missing.push_back(i);
    }
  }
  // worker pool over the missing rows; writes are atomic per row
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (!serial)
#endif
  for (long k = 0; k < long(missing.size()); ++k) {
    const std::size_t i = missing[k];
    rows[i].est = estimate(specs[i], cal, plan);
    nlohmann::json jr{{"spec", rows[i].spec}, {"estimate", nlohmann::json()}};
    to_json(jr["estimate"], rows[i].est);
    write_json_atomic(
        (fs::path(out_dir_path) / "rows" / (spec_hash(specs[i]) + ".json")).string(), jr);
  }
  (void)serial;
  write_file_atomic((fs::path(out_dir_path) / "grid.csv").string(), grid_csv(rows));
  std::printf("grid: %zu rows (%zu reused) -> %s/grid.csv\n", rows.size(), reused,
              out_dir_path.c_str());
  return 0;
}

int cmd_report(const std::string& grid_path, const std::string& out_dir_path) {
  const auto bytes = read_file_bytes(grid_path);
  const auto rows =
      parse_grid_csv(std::string(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  fs::create_directories(out_dir_path);
  const CorrelationReport corr = correlation_matrix(rows);
  const CapComparison caps = cap_comparison(rows);
  write_file_atomic((fs::path(out_dir_path) / "correlations.csv").string(),
                    correlation_csv(corr));
  write_file_atomic((fs::path(out_dir_path) / "cap_effects.csv").string(),
                    cap_comparison_csv(caps));
  for (const auto& w : caps.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  std::printf("corr(lut_total, l_end)=%.3f vs b=%.3f l_d=%.3f; corr(ff,b)=%.3f vs l_end=%.3f\n",
              corr.at("lut_total", "l_end"), corr.at("lut_total", "b"),
              corr.at("lut_total", "l_d"), corr.at("ff_total", "b"),
              corr.at("ff_total", "l_end"));
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"LGN toolchain: train, compile, estimate and search logic-gate networks"};
  app.require_subcommand(1);

  // encode
  std::string enc_dataset, enc_images, enc_labels, enc_out;
  std::vector<std::string> enc_cifar;
  int enc_bits = 1;
  int enc_classes = 0;
  long enc_limit = 0;
  auto* enc = app.add_subcommand("encode", "encode a dataset into a packed bit cache");
  enc->add_option("--dataset", enc_dataset, "mnist|fashion_mnist|cifar10")->required();
  enc->add_option("--images", enc_images, "IDX image file");
  enc->add_option("--labels", enc_labels, "IDX label file");
  enc->add_option("--cifar-batch", enc_cifar, "CIFAR-10 binary batch (repeatable)");
  enc->add_option("--bits", enc_bits, "thermometer bit depth b in [1,8]");
  enc->add_option("--limit", enc_limit, "keep only the first N rows");
  enc->add_option("--classes", enc_classes, "class count (default: max label + 1)");
  enc->add_option("--out", enc_out, "output cache path");

  // train
  std::string tr_cache, tr_arch, tr_config, tr_out;
  long long tr_seed = -1;
  int tr_folds = 0;
  auto* tr = app.add_subcommand("train", "train gate weights with Adam + early stopping");
  tr->add_option("--cache", tr_cache, "encoded dataset cache")->required();
  tr->add_option("--arch", tr_arch, "architecture spec JSON")->required();
  tr->add_option("--config", tr_config, "train config JSON");
  tr->add_option("--seed", tr_seed, "override config seed");
  tr->add_option("--folds", tr_folds, "override fold count");
  tr->add_option("--out", tr_out, "output model path");

  // compile
  std::string co_model, co_out, co_verilog, co_module = "lgn_core";
  bool co_no_prune = false;
  PlanFlags co_plan;
  auto* co = app.add_subcommand("compile", "discretize, prune and lower to a netlist");
  co->add_option("--model", co_model, "trained model JSON")->required();
  co->add_option("--out", co_out, "output netlist path");
  co->add_option("--verilog", co_verilog, "also emit Verilog here");
  co->add_option("--module", co_module, "Verilog module name");
  co->add_flag("--no-prune", co_no_prune, "skip pruning");
  add_plan_flags(co, co_plan);

  // simulate
  std::string si_netlist, si_cache, si_bits, si_out, si_trace;
  long si_limit = 0;
  auto* si = app.add_subcommand("simulate", "run the netlist golden-model interpreter");
  si->add_option("--netlist", si_netlist, "netlist JSON")->required();
  si->add_option("--cache", si_cache, "encoded dataset cache to replay");
  si->add_option("--bits", si_bits, "single input as a 0/1 string");
  si->add_option("--limit", si_limit, "simulate only the first N rows");
  si->add_option("--out", si_out, "results JSON");
  si->add_option("--trace", si_trace, "write a pipelined cycle trace here");

  // estimate
  std::string es_arch, es_netlist, es_cal, es_out, es_csv;
  PlanFlags es_plan;
  auto* es = app.add_subcommand("estimate", "predict FPGA resources for a spec or netlist");
  es->add_option("--arch", es_arch, "architecture spec JSON");
  es->add_option("--netlist", es_netlist, "netlist JSON (netlist-mode estimate)");
  es->add_option("--cal", es_cal, "calibration JSON (defaults when omitted)");
  es->add_option("--out", es_out, "estimate JSON");
  es->add_option("--csv", es_csv, "append a CSV row here");
  add_plan_flags(es, es_plan);

  // search
  std::string se_budget, se_config, se_cal, se_out, se_csv;
  PlanFlags se_plan;
  auto* se = app.add_subcommand("search", "constrained architecture search (Pareto set)");
  se->add_option("--budget", se_budget, "budget JSON")->required();
  se->add_option("--config", se_config, "search config JSON");
  se->add_option("--cal", se_cal, "calibration JSON");
  se->add_option("--out", se_out, "results JSON");
  se->add_option("--csv", se_csv, "also write a CSV of the Pareto set");
  add_plan_flags(se, se_plan);

  // grid
  bool gr_table1 = false, gr_serial = false;
  std::string gr_cal, gr_out;
  int gr_pixels = 784, gr_classes = 10;
  PlanFlags gr_plan;
  auto* gr = app.add_subcommand("grid", "estimate the canonical parameter grid (resumable)");
  gr->add_flag("--table1", gr_table1, "use the standard parameter grid");
  gr->add_option("--cal", gr_cal, "calibration JSON");
  gr->add_option("--input-pixels", gr_pixels, "raw feature count (bits at b=1)");
  gr->add_option("--classes", gr_classes, "class count");
  gr->add_flag("--serial", gr_serial, "disable parallel row evaluation");
  gr->add_option("--out", gr_out, "output directory");
  add_plan_flags(gr, gr_plan);

  // report
  std::string re_grid, re_out;
  auto* re = app.add_subcommand("report", "correlation matrix and cap-effect table from a grid");
  re->add_option("--grid", re_grid, "grid.csv produced by the grid subcommand")->required();
  re->add_option("--out", re_out, "output directory");

  std::vector<const char*> argv;
  argv.push_back("lgn");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(int(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (enc->parsed()) {
      return cmd_encode(enc_dataset, enc_images, enc_labels, enc_cifar, enc_bits, enc_limit,
                        enc_classes, resolve_out(enc_out, "dataset.lgnb"));
    }
    if (tr->parsed()) {
      return cmd_train(tr_cache, tr_arch, tr_config, tr_seed, tr_folds,
                       resolve_out(tr_out, "model.json"));
    }
    if (co->parsed()) {
      return cmd_compile(co_model, co_plan, co_no_prune, co_module,
                         resolve_out(co_out, "netlist.json"), co_verilog);
    }
    if (si->parsed()) {
      return cmd_simulate(si_netlist, si_cache, si_bits, si_limit, si_out, si_trace);
    }
    if (es->parsed()) {
      return cmd_estimate(es_arch, es_netlist, es_cal, es_plan,
                          resolve_out(es_out, "estimate.json"), es_csv);
    }
    if (se->parsed()) {
      return cmd_search(se_budget, se_config, se_cal, se_plan,
                        resolve_out(se_out, "search_results.json"), se_csv);
    }
    if (gr->parsed()) {
      return cmd_grid(gr_table1, gr_cal, gr_plan, gr_pixels, gr_classes, gr_serial,
                      resolve_out(gr_out, "grid_out"));
    }
    if (re->parsed()) {
      return cmd_report(re_grid, resolve_out(re_out, "report_out"));
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}

}  // namespace lgn::cli
