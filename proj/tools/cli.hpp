#pragma once

#include <string>
#include <vector>

namespace lpma::cli {

/// @brief Entry point of the lpma command line tool.
///
/// args excludes the program name. Returns the process exit code: 0 on success,
/// 2 on invalid inputs or specs, 3 on runtime pipeline failures.
int run_main(const std::vector<std::string>& args);

}  // namespace lpma::cli
