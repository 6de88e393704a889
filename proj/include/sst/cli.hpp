#pragma once

namespace sst {

/// Entry point of the sstc command-line tool. Exit codes: 0 success,
/// 2 parse or configuration error, 3 numerical degeneracy, 4 training
/// diverged.
int cli_main(int argc, char** argv);

}  // namespace sst
