#pragma once

#include <string>
#include <vector>

namespace coopq {

// Parses argv-style arguments and dispatches to the subcommands
// {collective, spectrum, random-media, beats, oracle, validate}.
// Returns 0 on success, 1 on numerical failure, 2 on usage errors.
int run_cli(const std::vector<std::string>& args);

}  // namespace coopq
