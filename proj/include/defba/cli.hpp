#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace defba {

/// Dispatches the defba/sdefba/horizon/toy subcommands. args excludes the
/// program name. Returns 0 on success, 1 on infeasible/unbounded/numerical
/// outcomes, 2 on usage or schema errors.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

} // namespace defba
