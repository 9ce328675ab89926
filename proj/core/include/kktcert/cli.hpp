#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kktcert {

// Command-line front end. Commands: solve, certify, check-slater,
// check-nondegeneracy, falsify-convexity, recover-multipliers, fritz-john,
// oracle, probe-lagrangian.
//
// Exit codes: 0 success/certified, 1 refuted/degenerate/failed run,
// 2 usage or file errors. With --json exactly one JSON document goes to
// `out`; diagnostics and the optional solver trace go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace kktcert
