#pragma once

#include "intent/config.hpp"

#include <iosfwd>

namespace intent {

/// Entry point of `intentctl`. Exit status: 0 success, 1 classified trial
/// failure, 2 configuration or harness error.
int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out,
            std::ostream& err, const EnvLookup& env);

} // namespace intent
