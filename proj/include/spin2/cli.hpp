#pragma once

#include <ostream>

namespace spin2 {

// Exit codes: 0 success, 1 internal failure, 2 bad input / precondition /
// region, 3 size cap.
int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace spin2
