#pragma once

// The pnc command-line front end as a library, so tests can drive it
// in-process. The JSON report goes to `out`, the human summary to `err`.
//
// Exit codes: 0 all checks passed, 1 some check failed, 2 usage error,
// 3 input or runtime error.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace pnc::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitError = 3;

/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// FNV-1a 64-bit digest as 16 lowercase hex digits.
std::string fnv1a64(std::string_view data);

}  // namespace pnc::cli
