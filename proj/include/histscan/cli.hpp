#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace histscan {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitDomainError = 1, kExitEnvironmentError = 2 };

/// One diagnostic line per invalid code: "line <n>: <Code> at chars <a>-<b>: <message>".
/// Returns the number of invalid lines through `invalid`.
std::string validation_report(std::string_view content, std::size_t& invalid);

/// Runs the tool with argv-style arguments (args[0] is the program name).
/// Data goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace histscan
