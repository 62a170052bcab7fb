#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace cyclochron::cli {

// Executes one command line (without the program name) against the given
// output and error streams. Returns the process exit code: 0 success,
// 1 domain/physical-validity failures, 2 usage errors. Errors are emitted
// as structured JSON on `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Canonical ownership table: every public library operation and the one
// subcommand that exercises it. The test suite audits this against the real
// subcommand set.
const std::vector<std::pair<std::string, std::string>>& operation_coverage();

} // namespace cyclochron::cli
