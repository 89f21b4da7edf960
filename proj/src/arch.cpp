#include "lgn/arch.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "lgn/common.hpp"
#include "lgn/jsonio.hpp"

namespace lgn {

int ArchitectureSpec::end_width() const {
  if (end_fraction) return int(std::lround(double(layer_width) * *end_fraction));
  return layer_width;
}

int ArchitectureSpec::padded_end_width() const {
  const int w = end_width();
  const int rem = w % class_count;
  return rem == 0 ? w : w + (class_count - rem);
}

std::vector<int> ArchitectureSpec::layer_widths() const {
  std::vector<int> widths;
  if (front_width) widths.push_back(*front_width);
  for (int i = 0; i < depth; ++i) widths.push_back(layer_width);
  if (end_fraction) {
    widths.push_back(padded_end_width());
  } else {
    widths.back() = padded_end_width();
  }
  return widths;
}

long long ArchitectureSpec::total_gates() const {
  long long total = 0;
  for (int w : layer_widths()) total += w;
  return total;
}

void ArchitectureSpec::validate() const {
  if (bit_depth < 1 || bit_depth > 8) throw std::domain_error("spec: bit depth must be in [1,8]");
  if (layer_width < 1) throw std::domain_error("spec: layer width must be positive");
  if (depth < 1 || depth > 8) throw std::domain_error("spec: depth must be in [1,8]");
  if (class_count < 2) throw std::domain_error("spec: need at least 2 classes");
  if (input_bits < 2) throw std::domain_error("spec: need at least 2 input bits");
  if (front_width && *front_width < 1) throw std::domain_error("spec: front width must be positive");
  if (end_fraction && !(*end_fraction == 0.5 || *end_fraction == 0.75)) {
    throw std::domain_error("spec: end fraction must be 0.5 or 0.75");
  }
  const auto widths = layer_widths();
  for (std::size_t i = 1; i < widths.size(); ++i) {
    if (2 * widths[i] < widths[i - 1]) {
      throw std::domain_error("spec: layer " + std::to_string(i) + " of width " +
                              std::to_string(widths[i]) + " is narrower than half its predecessor (" +
                              std::to_string(widths[i - 1]) + ")");
    }
  }
}

std::string ArchitectureSpec::study() const {
  if (front_width && end_fraction) return "dual_cap";
  if (front_width) return "front_cap";
  if (end_fraction) return "end_cap";
  return "baseline";
}

void to_json(nlohmann::json& j, const ArchitectureSpec& s) {
  j = nlohmann::json{{"b", s.bit_depth},
                     {"l_w", s.layer_width},
                     {"l_d", s.depth},
                     {"class_count", s.class_count},
                     {"wiring_seed", s.wiring_seed},
                     {"input_bits", s.input_bits}};
  if (s.front_width) j["l_front"] = *s.front_width;
  if (s.end_fraction) j["f_end"] = *s.end_fraction;
}

void from_json(const nlohmann::json& j, ArchitectureSpec& s) {
  check_keys(j, "architecture spec",
             {"b", "l_w", "l_d", "l_front", "f_end", "class_count", "wiring_seed", "input_bits"});
  s = ArchitectureSpec{};
  s.bit_depth = j.at("b").get<int>();
  s.layer_width = j.at("l_w").get<int>();
  s.depth = j.at("l_d").get<int>();
  if (j.contains("l_front")) s.front_width = j.at("l_front").get<int>();
  if (j.contains("f_end")) s.end_fraction = j.at("f_end").get<double>();
  s.class_count = j.at("class_count").get<int>();
  s.wiring_seed = j.at("wiring_seed").get<uint64_t>();
  s.input_bits = j.at("input_bits").get<int>();
  s.validate();
}

std::string spec_hash(const ArchitectureSpec& s) {
  nlohmann::json j;
  to_json(j, s);
  const uint64_t h = fnv1a64(j.dump());
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace lgn
