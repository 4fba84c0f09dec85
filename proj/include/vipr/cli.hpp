#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace CLI {
class App;
}

namespace vipr::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitBadInput = 2,
  kExitAborted = 3,
};

/// Runs one command line (args[0] is the program name). Regular output goes
/// to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct Settings;

/// The full command tree bound to `settings`; exposed so tests can walk
/// every subcommand and option.
std::unique_ptr<CLI::App> make_app(Settings& settings);

/// Owns the option storage for make_app.
std::shared_ptr<Settings> make_settings();

}  // namespace vipr::cli
