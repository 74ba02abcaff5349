#pragma once

#include <iosfwd>

namespace byrdtd {

// Entry point of the byrdtd command line tool.  Returns the process exit code:
// 0 success, 1 failed check or runtime error, 2 missing input file or usage error.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace byrdtd
