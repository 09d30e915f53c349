// racheck command line. Exit codes: 0 consistent/success, 1 inconsistent,
// 2 usage or input error, 3 budget exceeded.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rac {

enum ExitStatus : int { kExitOk = 0, kExitInconsistent = 1, kExitUsage = 2, kExitBudget = 3 };

// args excludes the program name. "-" as a file name means `in` / `out`.
int run_cli(const std::vector<std::string> &args, std::istream &in, std::ostream &out, std::ostream &err);

} // namespace rac
