#include "lgn/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "lgn/common.hpp"
#include "lgn/gates.hpp"

namespace lgn {

namespace {

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

using CornerGrads = std::vector<std::vector<std::array<double, 4>>>;  // layer x neuron x corner

CornerGrads make_corner_grads(const SoftLgn& net) {
  CornerGrads dq(net.layers.size());
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    dq[l].assign(net.layers[l].size(), {0.0, 0.0, 0.0, 0.0});
  }
  return dq;
}

void zero_corner_grads(CornerGrads& dq) {
  for (auto& layer : dq) {
    std::memset(layer.data(), 0, layer.size() * sizeof(layer[0]));
  }
}

struct ChunkWork {
  CornerGrads dq;
  double loss = 0.0;
  long correct = 0;
  ForwardScratch fwd;
  std::vector<std::vector<double>> g;  // activation gradients per layer
  std::vector<double> input;
  std::vector<double> z;               // class logits scratch
};

void unpack_row(const EncodedDataset& ds, uint32_t row, std::vector<double>& out) {
  out.resize(ds.bits());
  for (std::size_t c = 0; c < ds.bits(); ++c) out[c] = double(ds.inputs.get(row, c));
}

// Forward + cross-entropy + backward for one sample, accumulating corner
// gradients scaled by `scale` (1/batch).
void accumulate_sample(const SoftLgn& net, const MixtureView& view, const EncodedDataset& ds,
                       uint32_t row, double tau, double scale, ChunkWork& w) {
  unpack_row(ds, row, w.input);
  forward_layers(net, view, w.input.data(), w.fwd);

  const int classes = net.spec.class_count;
  const auto& last = w.fwd.acts.back();
  const std::size_t group = last.size() / classes;

  double zmax = -1e300;
  auto& z = w.z;
  z.resize(classes);
  for (int c = 0; c < classes; ++c) {
    double s = 0.0;
    for (std::size_t i = 0; i < group; ++i) s += last[c * group + i];
    z[c] = s / tau;
    zmax = std::max(zmax, z[c]);
  }
  double denom = 0.0;
  for (int c = 0; c < classes; ++c) denom += std::exp(z[c] - zmax);
  const int label = ds.labels[row];
  w.loss += -(z[label] - zmax - std::log(denom));
  int pred = 0;
  for (int c = 1; c < classes; ++c) {
    if (z[c] > z[pred]) pred = c;
  }
  if (pred == label) ++w.correct;

  // dL/dz_c = softmax(z)_c - y_c; dL/dact = dL/dz / tau, scaled for the mean.
  const std::size_t nlayers = net.layers.size();
  if (w.g.size() != nlayers) w.g.resize(nlayers);
  auto& glast = w.g[nlayers - 1];
  glast.resize(last.size());
  for (int c = 0; c < classes; ++c) {
    const double p = std::exp(z[c] - zmax) / denom;
    const double gz = (p - (c == label ? 1.0 : 0.0)) / tau * scale;
    for (std::size_t i = 0; i < group; ++i) glast[c * group + i] = gz;
  }

  for (int l = int(nlayers) - 1; l >= 0; --l) {
    const auto& layer = net.layers[l];
    const double* prev = (l == 0) ? w.input.data() : w.fwd.acts[l - 1].data();
    std::vector<double>* gprev = nullptr;
    if (l > 0) {
      gprev = &w.g[l - 1];
      gprev->assign(w.fwd.acts[l - 1].size(), 0.0);
    }
    const auto& gl = w.g[l];
    auto& dql = w.dq[l];
    const auto& qs = view.q[l];
    for (std::size_t i = 0; i < layer.size(); ++i) {
      const double gh = gl[i];
      const Neuron& nrn = layer.wires[i];
      const double a = prev[nrn.in_a], b = prev[nrn.in_b];
      const double na = 1.0 - a, nb = 1.0 - b;
      auto& dqn = dql[i];
      dqn[0] += gh * na * nb;
      dqn[1] += gh * na * b;
      dqn[2] += gh * a * nb;
      dqn[3] += gh * a * b;
      if (l > 0) {
        const auto& q = qs[i];
        (*gprev)[nrn.in_a] += gh * ((q[2] - q[0]) * nb + (q[3] - q[1]) * b);
        (*gprev)[nrn.in_b] += gh * ((q[1] - q[0]) * na + (q[3] - q[2]) * a);
      }
    }
  }
}

// Chunked accumulation.  Chunk ranges and the merge order are fixed by the
// chunk count alone, so serial and parallel execution produce bitwise
// identical sums.
void accumulate_batch(const SoftLgn& net, const MixtureView& view, const EncodedDataset& ds,
                      const uint32_t* idx, std::size_t count, double tau,
                      std::vector<ChunkWork>& chunks, bool parallel,
                      CornerGrads& dq_total, double& loss, long& correct) {
  const int nchunks = int(chunks.size());
  const double scale = 1.0 / double(count);

#ifdef _OPENMP
#pragma omp parallel for schedule(static, 1) if (parallel)
#endif
  for (int k = 0; k < nchunks; ++k) {
    auto& w = chunks[k];
    zero_corner_grads(w.dq);
    w.loss = 0.0;
    w.correct = 0;
    const std::size_t lo = count * k / nchunks;
    const std::size_t hi = count * (k + 1) / nchunks;
    for (std::size_t s = lo; s < hi; ++s) {
      accumulate_sample(net, view, ds, idx[s], tau, scale, w);
    }
  }
  (void)parallel;

  loss = 0.0;
  correct = 0;
  for (int k = 0; k < nchunks; ++k) {
    loss += chunks[k].loss;
    correct += chunks[k].correct;
    for (std::size_t l = 0; l < dq_total.size(); ++l) {
      auto& dst = dq_total[l];
      const auto& src = chunks[k].dq[l];
      for (std::size_t i = 0; i < dst.size(); ++i) {
        dst[i][0] += src[i][0];
        dst[i][1] += src[i][1];
        dst[i][2] += src[i][2];
        dst[i][3] += src[i][3];
      }
    }
  }
  loss /= double(count);
}

struct OptimizerState {
  std::vector<std::vector<std::array<double, 16>>> probs;
  std::vector<std::vector<std::array<double, 16>>> m, v;
  long long t = 0;

  explicit OptimizerState(const SoftLgn& net) {
    probs.resize(net.layers.size());
    m.resize(net.layers.size());
    v.resize(net.layers.size());
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
      probs[l].resize(net.layers[l].size());
      m[l].assign(net.layers[l].size(), {});
      v[l].assign(net.layers[l].size(), {});
      for (std::size_t i = 0; i < net.layers[l].size(); ++i) {
        probs[l][i] = softmax16(net.layers[l].logits[i]);
      }
    }
  }
};

// dL/dw for one neuron from its corner gradients via the softmax Jacobian.
inline void weight_grad_from_corners(const std::array<double, 16>& p,
                                     const std::array<double, 4>& dq,
                                     std::array<double, 16>& gw) {
  double mean = 0.0;
  for (int j = 0; j < 16; ++j) {
    double dldp = 0.0;
    for (int c = 0; c < 4; ++c) {
      if (gate_corner(j, c)) dldp += dq[c];
    }
    gw[j] = dldp;
    mean += p[j] * dldp;
  }
  for (int j = 0; j < 16; ++j) gw[j] = p[j] * (gw[j] - mean);
}

void apply_step(SoftLgn& net, MixtureView& view, OptimizerState& opt, const CornerGrads& dq,
                const TrainConfig& cfg) {
  const bool adam = cfg.optimizer == "adam";
  ++opt.t;
  const double bc1 = 1.0 - std::pow(kAdamBeta1, double(opt.t));
  const double bc2 = 1.0 - std::pow(kAdamBeta2, double(opt.t));
  std::array<double, 16> gw;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    auto& layer = net.layers[l];
    for (std::size_t i = 0; i < layer.size(); ++i) {
      weight_grad_from_corners(opt.probs[l][i], dq[l][i], gw);
      auto& w = layer.logits[i];
      if (adam) {
        auto& m = opt.m[l][i];
        auto& v = opt.v[l][i];
        for (int j = 0; j < 16; ++j) {
          m[j] = kAdamBeta1 * m[j] + (1.0 - kAdamBeta1) * gw[j];
          v[j] = kAdamBeta2 * v[j] + (1.0 - kAdamBeta2) * gw[j] * gw[j];
          w[j] -= cfg.learning_rate * (m[j] / bc1) / (std::sqrt(v[j] / bc2) + kAdamEps);
        }
      } else {
        for (int j = 0; j < 16; ++j) w[j] -= cfg.learning_rate * gw[j];
      }
      opt.probs[l][i] = softmax16(w);
      view.q[l][i] = corner_mix(opt.probs[l][i]);
    }
  }
}

double resolve_tau(const SoftLgn& net, double tau) {
  return tau > 0.0 ? tau : net.default_tau();
}

// Mean CE + accuracy over rows with a prebuilt view.  Losses accumulate in
// fixed chunks merged in chunk order, so the sum is identical for any thread
// count.
void eval_soft_with_view(const SoftLgn& net, const MixtureView& view, const EncodedDataset& ds,
                         const std::vector<uint32_t>& idx, double tau, bool parallel,
                         double* loss_out, double* acc_out) {
  const int classes = net.spec.class_count;
  constexpr int kChunks = 8;
  double chunk_loss[kChunks] = {};
  long chunk_correct[kChunks] = {};
#ifdef _OPENMP
#pragma omp parallel for schedule(static, 1) if (parallel)
#endif
  for (int k = 0; k < kChunks; ++k) {
    ForwardScratch fwd;
    std::vector<double> input;
    std::vector<double> z(classes);
    const std::size_t lo = idx.size() * k / kChunks;
    const std::size_t hi = idx.size() * (k + 1) / kChunks;
    for (std::size_t s = lo; s < hi; ++s) {
      unpack_row(ds, idx[s], input);
      forward_layers(net, view, input.data(), fwd);
      const auto& last = fwd.acts.back();
      const std::size_t group = last.size() / classes;
      double zmax = -1e300;
      for (int c = 0; c < classes; ++c) {
        double sum = 0.0;
        for (std::size_t i = 0; i < group; ++i) sum += last[c * group + i];
        z[c] = sum / tau;
        zmax = std::max(zmax, z[c]);
      }
      double denom = 0.0;
      for (int c = 0; c < classes; ++c) denom += std::exp(z[c] - zmax);
      chunk_loss[k] += -(z[ds.labels[idx[s]]] - zmax - std::log(denom));
      int pred = 0;
      for (int c = 1; c < classes; ++c) {
        if (z[c] > z[pred]) pred = c;
      }
      if (pred == ds.labels[idx[s]]) ++chunk_correct[k];
    }
  }
  (void)parallel;
  double loss = 0.0;
  long correct = 0;
  for (int k = 0; k < kChunks; ++k) {
    loss += chunk_loss[k];
    correct += chunk_correct[k];
  }
  if (loss_out) *loss_out = loss / double(idx.size());
  if (acc_out) *acc_out = double(correct) / double(idx.size());
}

}  // namespace

void TrainConfig::validate() const {
  if (learning_rate <= 0) throw std::domain_error("learning_rate must be positive");
  if (batch_size < 1) throw std::domain_error("batch_size must be positive");
  if (patience < 1) throw std::domain_error("patience must be positive");
  if (max_epochs < 1) throw std::domain_error("max_epochs must be positive");
  if (tau < 0) throw std::domain_error("tau must be positive (or 0 for the default)");
  if (folds < 1) throw std::domain_error("folds must be >= 1");
  if (optimizer != "adam" && optimizer != "sgd") throw std::domain_error("unknown optimizer");
  if (grad_chunks < 1) throw std::domain_error("grad_chunks must be >= 1");
}

std::vector<std::vector<uint8_t>> hard_gates(const SoftLgn& net) {
  std::vector<std::vector<uint8_t>> gates(net.layers.size());
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const auto& layer = net.layers[l];
    gates[l].resize(layer.size());
    for (std::size_t i = 0; i < layer.size(); ++i) {
      const auto& w = layer.logits[i];
      int best = 0;
      for (int j = 1; j < 16; ++j) {
        if (w[j] > w[best]) best = j;  // ties keep the lowest id
      }
      gates[l][i] = uint8_t(best);
    }
  }
  return gates;
}

double evaluate(const SoftLgn& net, const EncodedDataset& ds,
                const std::vector<uint32_t>& indices, EvalMode mode, double tau, bool parallel) {
  if (indices.empty()) throw std::domain_error("evaluate: empty index set");
  if (int(ds.bits()) != net.spec.input_bits) throw std::domain_error("evaluate: input width mismatch");
  tau = resolve_tau(net, tau);

  if (mode == EvalMode::soft) {
    const MixtureView view = build_mixture_view(net);
    double acc = 0.0;
    eval_soft_with_view(net, view, ds, indices, tau, parallel, nullptr, &acc);
    return acc;
  }

  const auto gates = hard_gates(net);
  const int classes = net.spec.class_count;
  long correct = 0;
#ifdef _OPENMP
#pragma omp parallel if (parallel) reduction(+ : correct)
#endif
  {
    std::vector<uint8_t> cur, next;
#ifdef _OPENMP
#pragma omp for schedule(static)
#endif
    for (long s = 0; s < long(indices.size()); ++s) {
      const uint32_t row = indices[s];
      cur.resize(ds.bits());
      for (std::size_t c = 0; c < ds.bits(); ++c) cur[c] = uint8_t(ds.inputs.get(row, c));
      for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const auto& layer = net.layers[l];
        next.resize(layer.size());
        for (std::size_t i = 0; i < layer.size(); ++i) {
          const Neuron& nrn = layer.wires[i];
          const int corner = 2 * cur[nrn.in_a] + cur[nrn.in_b];
          next[i] = uint8_t((gates[l][i] >> corner) & 1);
        }
        std::swap(cur, next);
      }
      const std::size_t group = cur.size() / classes;
      int best = 0;
      long best_sum = -1;
      for (int c = 0; c < classes; ++c) {
        long sum = 0;
        for (std::size_t i = 0; i < group; ++i) sum += cur[c * group + i];
        if (sum > best_sum) {
          best_sum = sum;
          best = c;
        }
      }
      if (best == ds.labels[indices[s]]) ++correct;
    }
  }
  (void)parallel;
  return double(correct) / double(indices.size());
}

double batch_loss(const SoftLgn& net, const EncodedDataset& ds,
                  const std::vector<uint32_t>& indices, double tau) {
  if (indices.empty()) throw std::domain_error("batch_loss: empty index set");
  tau = resolve_tau(net, tau);
  const MixtureView view = build_mixture_view(net);
  double loss = 0.0;
  eval_soft_with_view(net, view, ds, indices, tau, false, &loss, nullptr);
  return loss;
}

WeightGradients weight_gradients_kernel(const SoftLgn& net, const EncodedDataset& ds,
                                        const std::vector<uint32_t>& indices, double tau,
                                        int chunks, bool parallel) {
  if (indices.empty()) throw std::domain_error("weight_gradients: empty index set");
  tau = resolve_tau(net, tau);
  const MixtureView view = build_mixture_view(net);

  std::vector<ChunkWork> work(std::size_t(std::max(1, chunks)));
  for (auto& w : work) w.dq = make_corner_grads(net);
  CornerGrads dq_total = make_corner_grads(net);
  double loss = 0.0;
  long correct = 0;
  accumulate_batch(net, view, ds, indices.data(), indices.size(), tau, work, parallel,
                   dq_total, loss, correct);

  WeightGradients out;
  out.loss = loss;
  out.grads.resize(net.layers.size());
  std::array<double, 16> gw;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    out.grads[l].resize(net.layers[l].size());
    for (std::size_t i = 0; i < net.layers[l].size(); ++i) {
      const auto p = softmax16(net.layers[l].logits[i]);
      weight_grad_from_corners(p, dq_total[l][i], gw);
      out.grads[l][i] = gw;
    }
  }
  return out;
}

WeightGradients weight_gradients(const SoftLgn& net, const EncodedDataset& ds,
                                 const std::vector<uint32_t>& indices, double tau) {
  return weight_gradients_kernel(net, ds, indices, tau, 1, false);
}

double full_batch_step(SoftLgn& net, const EncodedDataset& ds,
                       const std::vector<uint32_t>& indices, const TrainConfig& cfg) {
  cfg.validate();
  const double tau = resolve_tau(net, cfg.tau);
  MixtureView view = build_mixture_view(net);
  OptimizerState opt(net);
  std::vector<ChunkWork> work(std::size_t(cfg.grad_chunks));
  for (auto& w : work) w.dq = make_corner_grads(net);
  CornerGrads dq = make_corner_grads(net);
  double loss = 0.0;
  long correct = 0;
  accumulate_batch(net, view, ds, indices.data(), indices.size(), tau, work, cfg.parallel,
                   dq, loss, correct);
  apply_step(net, view, opt, dq, cfg);
  return loss;
}

TrainedResult train(const ArchitectureSpec& spec, const EncodedDataset& ds,
                    const TrainConfig& cfg, const SplitPlan* plan) {
  spec.validate();
  cfg.validate();
  if (int(ds.bits()) != spec.input_bits) {
    throw std::domain_error("train: dataset bits " + std::to_string(ds.bits()) +
                            " != spec input_bits " + std::to_string(spec.input_bits));
  }
  if (ds.bit_depth != spec.bit_depth) {
    throw std::domain_error("train: dataset encoded at b=" + std::to_string(ds.bit_depth) +
                            " but spec wants b=" + std::to_string(spec.bit_depth));
  }
  if (ds.class_count != spec.class_count) throw std::domain_error("train: class count mismatch");

  SplitPlan local;
  if (!plan) {
    local = make_splits(ds, cfg.seed, 5);
    plan = &local;
  }
  const int fold_runs = std::min(cfg.folds, plan->folds);

  TrainedResult result;
  double best_acc = -1.0;
  for (int fold = 0; fold < fold_runs; ++fold) {
    const auto train_idx = plan->fold_train(fold);
    const auto val_idx = plan->fold_val(fold);
    if (train_idx.empty() || val_idx.empty()) throw std::domain_error("train: empty fold");

    SoftLgn net = init_network(spec);
    const double tau = resolve_tau(net, cfg.tau);
    MixtureView view = build_mixture_view(net);
    OptimizerState opt(net);
    std::vector<ChunkWork> work(std::size_t(cfg.grad_chunks));
    for (auto& w : work) w.dq = make_corner_grads(net);
    CornerGrads dq = make_corner_grads(net);

    SplitMix64 shuffle_rng(cfg.seed * 0x9e3779b97f4a7c15ULL + uint64_t(fold) + 1);
    std::vector<uint32_t> order = train_idx;

    FoldMetrics metrics;
    metrics.fold = fold;
    double best_val = 1e300;
    int best_epoch = -1;
    std::vector<std::vector<std::array<double, 16>>> best_logits;

    for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
      for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[shuffle_rng.bounded(i)]);
      }
      double epoch_loss = 0.0;
      std::size_t seen = 0;
      for (std::size_t at = 0; at < order.size(); at += std::size_t(cfg.batch_size)) {
        const std::size_t count = std::min(std::size_t(cfg.batch_size), order.size() - at);
        zero_corner_grads(dq);
        double loss = 0.0;
        long correct = 0;
        accumulate_batch(net, view, ds, order.data() + at, count, tau, work, cfg.parallel,
                         dq, loss, correct);
        if (!std::isfinite(loss)) {
          throw std::runtime_error("training diverged (non-finite loss at epoch " +
                                   std::to_string(epoch) + "); try a lower learning rate");
        }
        apply_step(net, view, opt, dq, cfg);
        epoch_loss += loss * double(count);
        seen += count;
      }
      metrics.final_train_loss = epoch_loss / double(seen);

      double val_loss = 0.0, val_acc = 0.0;
      eval_soft_with_view(net, view, ds, val_idx, tau, cfg.parallel, &val_loss, &val_acc);
      if (!std::isfinite(val_loss)) {
        throw std::runtime_error("training diverged (non-finite validation loss); "
                                 "try a lower learning rate");
      }
      metrics.epochs_run = epoch + 1;
      if (cfg.verbose) {
        std::fprintf(stderr, "fold %d epoch %3d train %.4f val %.4f acc %.4f\n", fold, epoch,
                     metrics.final_train_loss, val_loss, val_acc);
      }
      if (val_loss < best_val - 1e-12) {
        best_val = val_loss;
        best_epoch = epoch;
        best_logits.clear();
        for (const auto& layer : net.layers) best_logits.push_back(layer.logits);
      } else if (epoch - best_epoch >= cfg.patience) {
        break;
      }
    }

    if (!best_logits.empty()) {
      for (std::size_t l = 0; l < net.layers.size(); ++l) net.layers[l].logits = best_logits[l];
      view = build_mixture_view(net);
    }
    metrics.best_val_loss = best_val;
    eval_soft_with_view(net, view, ds, val_idx, tau, cfg.parallel, nullptr,
                        &metrics.val_accuracy);
    metrics.val_accuracy_hard = evaluate(net, ds, val_idx, EvalMode::hard, tau, cfg.parallel);
    result.folds.push_back(metrics);

    if (metrics.val_accuracy > best_acc) {
      best_acc = metrics.val_accuracy;
      result.best_fold = fold;
      result.model = std::move(net);
    }
  }

  double mean = 0.0;
  for (const auto& m : result.folds) mean += m.val_accuracy;
  mean /= double(result.folds.size());
  double var = 0.0;
  for (const auto& m : result.folds) var += (m.val_accuracy - mean) * (m.val_accuracy - mean);
  result.val_acc_mean = mean;
  result.val_acc_std = result.folds.size() > 1 ? std::sqrt(var / double(result.folds.size())) : 0.0;
  return result;
}

}  // namespace lgn
