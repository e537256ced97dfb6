#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace infoorder::cli {

/// Runs one command. args excludes the program name. Results go to out as
/// JSON, diagnostics to err. Returns 0 on success, 1 when a compare verdict
/// fails, 2 on parse or validation errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace infoorder::cli
