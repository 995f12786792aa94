#pragma once

#include <string>
#include <vector>

namespace frlc::cli {

// Exit codes: 0 ok, 1 input error, 2 finished without meeting the stopping
// criterion (outputs are still written).
constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNotConverged = 2;

// args excludes the program name.
int run(const std::vector<std::string>& args);

}  // namespace frlc::cli
