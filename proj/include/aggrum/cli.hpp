#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace aggrum {

// Exit codes: 0 pass, 1 domain-level failure, 2 usage or input error.
inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace aggrum
