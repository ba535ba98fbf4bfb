#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "enstro/io.hpp"

namespace enstro::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitAssertion = 1;
inline constexpr int kExitUsage = 2;

/// Every key a config file may set; each subcommand reads a subset.
std::vector<ConfigKey> config_schema();

/// Subcommand names in help order.
std::vector<std::string> command_names();

/// Entry point behind the enstro executable. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace enstro::cli
