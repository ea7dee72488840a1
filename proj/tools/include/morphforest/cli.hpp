#pragma once

#include <exception>
#include <ostream>
#include <string>
#include <vector>

namespace morphforest::cli {

// Runs one command line (argv[0] is the program name). Never throws;
// returns the process exit code: 0 ok, 1 usage, 2 data or format, 3 internal.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

int exit_code(const std::exception& error);

}  // namespace morphforest::cli
