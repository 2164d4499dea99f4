#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace descentlab {

/// Environment variable consulted for the master seed when --seed is absent.
inline constexpr const char* kSeedEnvVar = "DESCENTLAB_SEED";

/// Runs the command line with args[0] as the program name. Returns 0 on
/// success, 2 on usage errors and 1 on any other failure.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_main(int argc, char** argv);

}  // namespace descentlab
