#pragma once

#include <initializer_list>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "lgn/dataset.hpp"

namespace lgn {

// Config objects reject unknown keys so typos fail loudly.
inline void check_keys(const nlohmann::json& j, const std::string& what,
                       std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw std::domain_error(what + ": expected a JSON object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!ok.count(it.key())) throw std::domain_error(what + ": unknown key '" + it.key() + "'");
  }
}

inline void write_json_atomic(const std::string& path, const nlohmann::json& j) {
  write_file_atomic(path, j.dump(2) + "\n");
}

inline nlohmann::json read_json(const std::string& path) {
  const auto bytes = read_file_bytes(path);
  return nlohmann::json::parse(bytes.begin(), bytes.end());
}

}  // namespace lgn
