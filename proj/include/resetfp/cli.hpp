#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "resetfp/output.hpp"

/// The `resetfp` command-line tool as a library, so it can be driven in-process.
///
///   resetfp moments   closed-form moments at the given x values
///   resetfp sweep     a quantity along an x (or z) grid, with nine preset curves
///   resetfp simulate  Monte Carlo estimates from the exact or path engine
///   resetfp bvp       finite-difference transforms and moments
///   resetfp density   first-passage density by Laplace inversion
///   resetfp compare   analytic / bvp / Monte Carlo consistency report
namespace resetfp::cli {

inline constexpr std::string_view kToolVersion = "1.0.0";

enum ExitCode : int {
  kOk = 0,
  kComparisonFailure = 1,
  kUsage = 2,
  kNumeric = 3,
};

/// Parses `args` (without the program name), runs the command and writes the
/// record to `out` or to --out. Diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Command line that reproduces `record`: the command name followed by every
/// `--flag` entry of its metadata.
std::vector<std::string> rerun_args(const output::OutputRecord& record);

}  // namespace resetfp::cli
