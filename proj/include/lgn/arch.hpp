#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace lgn {

// One LGN candidate: bit depth, baseline width/depth, optional front and end
// caps, output classes, and the wiring seed.
struct ArchitectureSpec {
  int bit_depth = 1;                      // b
  int layer_width = 1000;                 // L_W
  int depth = 2;                          // L_D
  std::optional<int> front_width;         // L_front
  std::optional<double> end_fraction;     // f_end, 0.5 or 0.75
  int class_count = 10;
  uint64_t wiring_seed = 0;
  int input_bits = 784;

  // L_end before class padding: round(L_W * f_end), or L_W with no end cap.
  int end_width() const;
  // Final layer width after rounding up to a multiple of class_count.
  int padded_end_width() const;
  // Gate layer widths: [front?] + L_W x L_D with the final layer padded,
  // plus the end-cap layer when present.
  std::vector<int> layer_widths() const;
  long long total_gates() const;
  int group_size() const { return padded_end_width() / class_count; }

  // Enforces field ranges and the layers-never-below-half-of-predecessor rule
  // (applied across consecutive gate layers).
  void validate() const;

  std::string study() const;  // baseline | front_cap | end_cap | dual_cap
};

void to_json(nlohmann::json& j, const ArchitectureSpec& s);
void from_json(const nlohmann::json& j, ArchitectureSpec& s);

// Hash of the canonical JSON form; used for grid resumability.
std::string spec_hash(const ArchitectureSpec& s);

}  // namespace lgn
