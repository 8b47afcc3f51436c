#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace phasefilter {

// exit codes besides the certify verdicts (0 / 2 / 3)
inline constexpr int exit_precondition = 1;
inline constexpr int exit_inconclusive = 4;
inline constexpr int exit_numerical = 5;

// args excludes the program name
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace phasefilter
