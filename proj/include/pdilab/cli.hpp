#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pdilab::cli {

/// Runs one pdi-lab invocation. `args` excludes the program name.
/// Returns 0 on success, 1 on a failed audit or verdict mismatch, 2 on usage errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pdilab::cli
