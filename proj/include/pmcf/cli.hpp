#ifndef PMCF_CLI_HPP
#define PMCF_CLI_HPP

#include <iosfwd>

namespace pmcf::cli {

enum ExitCode : int { Ok = 0, UsageError = 1, SolverFailure = 2 };

//! Entry point of the `pmcf_lab` tool. Files go to --out, else to
//! $PMCF_OUTPUT_DIR, else to the working directory.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace pmcf::cli

#endif
