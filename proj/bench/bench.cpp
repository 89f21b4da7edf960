// Serial vs OpenMP throughput for the three hot kernels: batch gradients,
// hard evaluation, netlist batch simulation.  Both lanes share the chunked
// accumulation order, so outputs are bitwise identical; this target only
// reports timing.

#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "lgn/compiler.hpp"
#include "lgn/netsim.hpp"
#include "lgn/trainer.hpp"

using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

lgn::EncodedDataset random_dataset(std::size_t n, int bits, int classes, uint64_t seed) {
  lgn::EncodedDataset ds;
  ds.bit_depth = 1;
  ds.class_count = classes;
  ds.inputs = lgn::BitMatrix(n, std::size_t(bits));
  ds.labels.resize(n);
  lgn::SplitMix64 rng(seed);
  for (std::size_t r = 0; r < n; ++r) {
    ds.labels[r] = uint8_t(rng.bounded(classes));
    for (int c = 0; c < bits; ++c) ds.inputs.set(r, c, int(rng.bounded(2)));
  }
  return ds;
}

}  // namespace

int main(int argc, char** argv) {
  int width = 2000, depth = 4, samples = 512, reps = 3;
  if (argc > 1) width = std::atoi(argv[1]);
  if (argc > 2) depth = std::atoi(argv[2]);
  if (argc > 3) samples = std::atoi(argv[3]);

  lgn::ArchitectureSpec spec;
  spec.layer_width = width;
  spec.depth = depth;
  spec.bit_depth = 1;
  spec.input_bits = 784;
  spec.class_count = 10;
  spec.wiring_seed = 7;

  const auto ds = random_dataset(std::size_t(samples), spec.input_bits, spec.class_count, 11);
  std::vector<uint32_t> idx(ds.size());
  for (uint32_t i = 0; i < idx.size(); ++i) idx[i] = i;

  const lgn::SoftLgn net = lgn::init_network(spec);
#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (OpenMP disabled)\n");
#endif
  std::printf("network: L_W=%d L_D=%d (%zu neurons), %d samples\n", width, depth,
              net.neuron_count(), samples);
  std::printf("%-22s %10s %10s %8s\n", "kernel", "serial(s)", "omp(s)", "speedup");

  auto bench_pair = [&](const char* name, auto&& serial_fn, auto&& parallel_fn) {
    double best_s = 1e300, best_p = 1e300;
    for (int r = 0; r < reps; ++r) {
      auto t0 = Clock::now();
      serial_fn();
      best_s = std::min(best_s, seconds_since(t0));
      t0 = Clock::now();
      parallel_fn();
      best_p = std::min(best_p, seconds_since(t0));
    }
    std::printf("%-22s %10.3f %10.3f %7.2fx\n", name, best_s, best_p, best_s / best_p);
  };

  bench_pair(
      "batch_gradients",
      [&] { lgn::weight_gradients_kernel(net, ds, idx, 0.0, 8, false); },
      [&] { lgn::weight_gradients_kernel(net, ds, idx, 0.0, 8, true); });

  bench_pair(
      "hard_evaluate",
      [&] { lgn::evaluate(net, ds, idx, lgn::EvalMode::hard, 0.0, false); },
      [&] { lgn::evaluate(net, ds, idx, lgn::EvalMode::hard, 0.0, true); });

  const lgn::Netlist nl = lgn::prune(lgn::build_netlist(lgn::discretize(net), {}));
  bench_pair(
      "netlist_simulate",
      [&] { lgn::simulate_batch(nl, ds.inputs, idx, false); },
      [&] { lgn::simulate_batch(nl, ds.inputs, idx, true); });

  return 0;
}
