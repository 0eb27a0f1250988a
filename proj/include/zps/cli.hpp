#pragma once

#include <iosfwd>

namespace zps {

/// Full command-line front end; `main` is a thin wrapper around this so the
/// whole surface stays testable in-process. Returns the process exit code:
/// 0 success, 2 domain/usage error, 3 I/O error. Diagnostics go to `err` as a
/// single line naming the violated precondition.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace zps
