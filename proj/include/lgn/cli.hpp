#pragma once

#include <string>
#include <vector>

namespace lgn::cli {

// Exit codes: 0 ok, 1 runtime failure, 2 usage error, 3 search found no
// feasible candidate.
int run(const std::vector<std::string>& args);

}  // namespace lgn::cli
