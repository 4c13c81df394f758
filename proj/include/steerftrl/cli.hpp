#pragma once

namespace steerftrl {

// Full command-line front end: analyze | simulate | reach | steer |
// witness | brackets. Returns the process exit code: 0 success (for
// analyze: controllable or sufficient condition met), 2 not
// controllable, 3 inconclusive, 1 any error.
int run_cli(int argc, const char* const* argv);

}  // namespace steerftrl
