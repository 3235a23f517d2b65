#pragma once

namespace tenc {

/// Entry point behind the tenc binary. Returns 0 on success, 2 on usage
/// errors (unknown flags or subcommands, missing arguments), 1 on runtime
/// failures, with diagnostics on stderr.
int cli_main(int argc, const char* const* argv);

}  // namespace tenc
