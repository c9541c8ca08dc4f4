#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace flowscope::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 2;   // library error; JSON on stderr
inline constexpr int kExitUsage = 64;  // EX_USAGE

// args excludes the program name.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace flowscope::cli
