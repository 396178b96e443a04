#pragma once

#include <iosfwd>

namespace ecx::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPipeline = 1;
inline constexpr int kExitUsage = 2;

// Entry point behind the `ecx` binary; streams are injected for tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ecx::cli
