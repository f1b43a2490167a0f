#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace natalg::cli {

inline constexpr const char* kVersion = "0.1.0";

// Exit codes: 0 decided/success, 1 honest Undecided/Unknown outcome,
// 2 input or usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace natalg::cli
