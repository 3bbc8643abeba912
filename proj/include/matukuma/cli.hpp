#pragma once

#include <ostream>

namespace matukuma::cli {

enum ExitCode : int { Ok = 0, ConfigFailure = 2, ValidationFailure = 3, NumericFailure = 4 };

/// Entry point of the command-line tool. Subcommands: classify, scan,
/// pohozaev, hypotheses, construct, oracle. Human-readable tables go to
/// `out`; failures are reported on `err` as one line of JSON
/// {"error": code, "message": ...}.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace matukuma::cli
