#pragma once

namespace loggas {

// Exit codes: 0 ok, 1 acceptance failure, 2 config error, 3 numerical failure.
int run_cli(int argc, char** argv);

}  // namespace loggas
