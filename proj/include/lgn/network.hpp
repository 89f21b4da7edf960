#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "lgn/arch.hpp"

namespace lgn {

struct Neuron {
  uint32_t in_a = 0, in_b = 0;  // distinct indices into the previous layer
};

struct SoftLayer {
  std::vector<Neuron> wires;
  std::vector<std::array<double, 16>> logits;

  std::size_t size() const { return wires.size(); }
};

// Relaxed LGN: fixed random wiring, 16-way softmax gate mixture per neuron.
struct SoftLgn {
  ArchitectureSpec spec;
  std::vector<SoftLayer> layers;

  std::size_t neuron_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.size();
    return n;
  }
  int last_width() const { return int(layers.back().size()); }
  // Default groupsum temperature: group_size / 16.
  double default_tau() const;
};

// Seeded uniform wiring (distinct pairs) and standard-normal logits.
SoftLgn init_network(const ArchitectureSpec& spec);

// Class logits: per-group sum of last-layer activations divided by tau
// (tau <= 0 selects the default).  Input entries must be in [0,1].
std::vector<double> forward_soft(const SoftLgn& net, const std::vector<double>& input,
                                 double tau = 0.0);

// argmax with ties broken toward the lowest class index.
int argmax_class(const std::vector<double>& logits);

// Per-neuron corner mixtures (q = corner_mix(softmax(logits))) for every
// layer; the kernels consume these instead of re-running softmax per sample.
struct MixtureView {
  std::vector<std::vector<std::array<double, 4>>> q;
};
MixtureView build_mixture_view(const SoftLgn& net);

// Forward pass that records all activations (workspace reused across calls).
struct ForwardScratch {
  std::vector<std::vector<double>> acts;  // one vector per layer
};
void forward_layers(const SoftLgn& net, const MixtureView& view, const double* input,
                    ForwardScratch& scratch);

void to_json(nlohmann::json& j, const SoftLgn& net);
void from_json(const nlohmann::json& j, SoftLgn& net);

void save_model(const std::string& path, const SoftLgn& net, const nlohmann::json& metrics);
SoftLgn load_model(const std::string& path);

}  // namespace lgn
