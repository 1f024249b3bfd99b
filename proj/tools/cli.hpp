#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vsg::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsageError = 2;

// Runs one subcommand. `args` excludes the program name. Results and the
// resolved configuration go to `out`; warnings and the single-line error
// report go to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vsg::cli
