#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hdtele {

// Runs one command line (without the program name). Exit codes: 0 success,
// 1 usage or input error, 2 numerical failure (non-convergence, unresolved grid).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// "1:6:0.5" (stop exclusive), "0.5,1,2", or a mix of both separated by commas.
std::vector<double> parse_number_list(const std::string& text);

}  // namespace hdtele
