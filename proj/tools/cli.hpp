#pragma once

#include <iosfwd>

namespace stokeslab::cli {

// Exit codes of the command-line tool.
enum Exit { kOk = 0, kCheckFailure = 1, kConfigError = 2, kNumericalFailure = 3 };

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace stokeslab::cli
