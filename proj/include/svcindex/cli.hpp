#pragma once

#include <iosfwd>

namespace svcindex {

/// Entry point of the `svcbench` tool.
///
///   svcbench generate       --out DIR [--config F] [--seed N] [--scale desk|paper] [--scenario S|all]
///   svcbench bench-retrieve [--out CSV] [--data DIR] ...
///   svcbench bench-add      [--out CSV] [--data DIR] ...
///   svcbench report         CSV [--out FILE]
///
/// Returns the process exit code; usage errors return 2, runtime errors 1.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace svcindex
