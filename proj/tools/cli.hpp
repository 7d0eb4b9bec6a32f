#pragma once

#include <iosfwd>

namespace betapoly::cli {

// Exit codes: 0 success, 2 usage/domain error, 3 statistical regression,
// 4 tolerance not reached, 1 internal failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace betapoly::cli
