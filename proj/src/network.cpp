#include "lgn/network.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "lgn/common.hpp"
#include "lgn/gates.hpp"
#include "lgn/jsonio.hpp"

namespace lgn {

double SoftLgn::default_tau() const { return double(spec.group_size()) / 16.0; }

SoftLgn init_network(const ArchitectureSpec& spec) {
  spec.validate();
  SoftLgn net;
  net.spec = spec;

  SplitMix64 wire_rng(spec.wiring_seed ^ 0x9d2c5680557e1e2dULL);
  SplitMix64 logit_rng(spec.wiring_seed ^ 0x1f83d9abfb41bd6bULL);

  uint32_t prev_width = uint32_t(spec.input_bits);
  for (int w : spec.layer_widths()) {
    SoftLayer layer;
    layer.wires.resize(std::size_t(w));
    layer.logits.resize(std::size_t(w));
    for (int i = 0; i < w; ++i) {
      Neuron& nrn = layer.wires[i];
      nrn.in_a = uint32_t(wire_rng.bounded(prev_width));
      do {
        nrn.in_b = uint32_t(wire_rng.bounded(prev_width));
      } while (prev_width > 1 && nrn.in_b == nrn.in_a);
      for (auto& v : layer.logits[i]) v = logit_rng.normal();
    }
    net.layers.push_back(std::move(layer));
    prev_width = uint32_t(w);
  }
  return net;
}

MixtureView build_mixture_view(const SoftLgn& net) {
  MixtureView view;
  view.q.resize(net.layers.size());
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const auto& layer = net.layers[l];
    view.q[l].resize(layer.size());
    for (std::size_t i = 0; i < layer.size(); ++i) {
      view.q[l][i] = corner_mix(softmax16(layer.logits[i]));
    }
  }
  return view;
}

void forward_layers(const SoftLgn& net, const MixtureView& view, const double* input,
                    ForwardScratch& scratch) {
  scratch.acts.resize(net.layers.size());
  const double* prev = input;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const auto& layer = net.layers[l];
    auto& out = scratch.acts[l];
    out.resize(layer.size());
    const auto& qs = view.q[l];
    for (std::size_t i = 0; i < layer.size(); ++i) {
      const Neuron& nrn = layer.wires[i];
      const double a = prev[nrn.in_a], b = prev[nrn.in_b];
      const auto& q = qs[i];
      const double na = 1.0 - a, nb = 1.0 - b;
      out[i] = q[0] * (na * nb) + q[1] * (na * b) + q[2] * (a * nb) + q[3] * (a * b);
    }
    prev = out.data();
  }
}

std::vector<double> forward_soft(const SoftLgn& net, const std::vector<double>& input,
                                 double tau) {
  if (int(input.size()) != net.spec.input_bits) {
    throw std::domain_error("input length " + std::to_string(input.size()) +
                            " does not match spec input_bits " +
                            std::to_string(net.spec.input_bits));
  }
  for (double v : input) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::domain_error("input entry outside [0,1]");
  }
  if (tau <= 0.0) tau = net.default_tau();

  const MixtureView view = build_mixture_view(net);
  ForwardScratch scratch;
  forward_layers(net, view, input.data(), scratch);

  const auto& last = scratch.acts.back();
  const int groups = net.spec.class_count;
  const std::size_t group_size = last.size() / groups;
  std::vector<double> logits(groups, 0.0);
  for (int c = 0; c < groups; ++c) {
    double sum = 0.0;
    for (std::size_t i = 0; i < group_size; ++i) sum += last[c * group_size + i];
    logits[c] = sum / tau;
  }
  return logits;
}

int argmax_class(const std::vector<double>& logits) {
  int best = 0;
  for (int c = 1; c < int(logits.size()); ++c) {
    if (logits[c] > logits[best]) best = c;
  }
  return best;
}

void to_json(nlohmann::json& j, const SoftLgn& net) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& layer : net.layers) {
    nlohmann::json wires = nlohmann::json::array();
    nlohmann::json logits = nlohmann::json::array();
    for (std::size_t i = 0; i < layer.size(); ++i) {
      wires.push_back({layer.wires[i].in_a, layer.wires[i].in_b});
      logits.push_back(layer.logits[i]);
    }
    layers.push_back({{"wires", std::move(wires)}, {"logits", std::move(logits)}});
  }
  j = nlohmann::json{{"version", 1},
                     {"kind", "lgn-model"},
                     {"spec", net.spec},
                     {"layers", std::move(layers)}};
}

void from_json(const nlohmann::json& j, SoftLgn& net) {
  if (j.value("kind", "") != "lgn-model") throw std::domain_error("not a model file");
  if (j.value("version", 0) != 1) throw std::domain_error("unsupported model version");
  net = SoftLgn{};
  net.spec = j.at("spec").get<ArchitectureSpec>();
  for (const auto& jl : j.at("layers")) {
    SoftLayer layer;
    for (const auto& w : jl.at("wires")) {
      layer.wires.push_back(Neuron{w.at(0).get<uint32_t>(), w.at(1).get<uint32_t>()});
    }
    for (const auto& lg : jl.at("logits")) {
      layer.logits.push_back(lg.get<std::array<double, 16>>());
    }
    if (layer.wires.size() != layer.logits.size()) {
      throw std::domain_error("model layer wires/logits size mismatch");
    }
    net.layers.push_back(std::move(layer));
  }
  const auto widths = net.spec.layer_widths();
  if (widths.size() != net.layers.size()) throw std::domain_error("model layer count mismatch");
  for (std::size_t l = 0; l < widths.size(); ++l) {
    if (std::size_t(widths[l]) != net.layers[l].size()) {
      throw std::domain_error("model layer width mismatch at layer " + std::to_string(l));
    }
  }
}

void save_model(const std::string& path, const SoftLgn& net, const nlohmann::json& metrics) {
  nlohmann::json j;
  to_json(j, net);
  if (!metrics.is_null()) j["metrics"] = metrics;
  write_json_atomic(path, j);
}

SoftLgn load_model(const std::string& path) {
  return read_json(path).get<SoftLgn>();
}

}  // namespace lgn
