#pragma once

#include <iosfwd>
#include <string>

namespace locus::cli {

/// Drives the scripted field clients of a SimScript against a running
/// server and prints the final alert list. Returns the process exit code.
int run_simulation(const std::string& script_path, const std::string& server_url, std::ostream& out,
                   std::ostream& err);

}  // namespace locus::cli
