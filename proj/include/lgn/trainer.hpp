#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "lgn/dataset.hpp"
#include "lgn/network.hpp"

namespace lgn {

struct TrainConfig {
  double learning_rate = 0.01;
  int batch_size = 64;
  int patience = 10;       // epochs without val-loss improvement
  int max_epochs = 200;
  double tau = 0.0;        // groupsum temperature; 0 -> group_size/16
  uint64_t seed = 0;
  int folds = 5;           // how many CV folds to train (1 = single holdout)
  std::string optimizer = "adam";  // "adam" | "sgd"
  int grad_chunks = 8;     // fixed partial-sum count; merge order is chunk order
  bool parallel = true;    // OpenMP over gradient chunks / eval samples
  bool verbose = false;

  void validate() const;
};

struct FoldMetrics {
  int fold = 0;
  int epochs_run = 0;
  double best_val_loss = 0.0;
  double val_accuracy = 0.0;        // soft accuracy at the restored best epoch
  double val_accuracy_hard = 0.0;
  double final_train_loss = 0.0;
};

struct TrainedResult {
  SoftLgn model;                    // best fold's model (restored best epoch)
  std::vector<FoldMetrics> folds;
  int best_fold = 0;
  double val_acc_mean = 0.0;
  double val_acc_std = 0.0;
};

enum class EvalMode { soft, hard };

TrainedResult train(const ArchitectureSpec& spec, const EncodedDataset& ds,
                    const TrainConfig& cfg, const SplitPlan* plan = nullptr);

// Fraction of correct argmax predictions over the given rows (all rows when
// `indices` is empty... callers pass explicit index sets).
double evaluate(const SoftLgn& net, const EncodedDataset& ds,
                const std::vector<uint32_t>& indices, EvalMode mode, double tau = 0.0,
                bool parallel = true);

// Per-neuron argmax gate ids (ties -> lowest id), layer by layer.
std::vector<std::vector<uint8_t>> hard_gates(const SoftLgn& net);

// Mean cross-entropy of the soft forward pass over the given rows.
double batch_loss(const SoftLgn& net, const EncodedDataset& ds,
                  const std::vector<uint32_t>& indices, double tau = 0.0);

// Loss plus dL/dlogits for every neuron; single deterministic chunk.  This is
// the reference path the finite-difference tests check against.
struct WeightGradients {
  double loss = 0.0;
  std::vector<std::vector<std::array<double, 16>>> grads;  // layer x neuron x 16
};
WeightGradients weight_gradients(const SoftLgn& net, const EncodedDataset& ds,
                                 const std::vector<uint32_t>& indices, double tau = 0.0);

// One optimizer pass over the given rows as a single full batch (used by the
// descent sanity tests); returns the pre-step loss.
double full_batch_step(SoftLgn& net, const EncodedDataset& ds,
                       const std::vector<uint32_t>& indices, const TrainConfig& cfg);

// Chunked gradient kernel exposed for the serial-vs-parallel benchmark and
// the bitwise-equality test.  Results are identical for both lanes because
// partial buffers merge in chunk order either way.
WeightGradients weight_gradients_kernel(const SoftLgn& net, const EncodedDataset& ds,
                                        const std::vector<uint32_t>& indices, double tau,
                                        int chunks, bool parallel);

}  // namespace lgn
