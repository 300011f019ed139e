#pragma once

namespace proact {

// Entry point of the `proact` binary. Exit codes: 0 ok, 2 configuration
// error, 3 environment/contract error, 1 anything else.
int run_cli(int argc, char** argv);

}  // namespace proact
