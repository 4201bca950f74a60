#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gf {

// Exit codes shared by every command.
enum ExitCode { kExitOk = 0, kExitFailed = 1, kExitIo = 2 };

// gasket-forge <validate|pack|render|stats|gallery> [flags]
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

struct CliResult {
    int code = 0;
    std::string out, err;
};
// Same, with args excluding the program name; output captured.
CliResult run_cli(const std::vector<std::string>& args);

}  // namespace gf
