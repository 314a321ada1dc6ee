#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace dspace::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,           // bad flags or unknown sub-command / method
  kConfig = 2,          // invalid problem file, bounds, inputs or artifacts
  kModelFailure = 3,    // failed rows above the allowed fraction, diverged training
  kNoUnifiedShape = 4,  // no single-region shape within the method's limits
  kNopOutside = 5,      // NOP outside the identified space
  kInternal = 6,
};

/// Schema versions written into the manifest.
inline constexpr int kCloudSchema = 1;
inline constexpr int kDesignSpaceSchema = 1;
inline constexpr int kAorSchema = 1;
inline constexpr int kComparisonSchema = 1;
inline constexpr int kSurrogateSchema = 1;
inline constexpr int kProblemSchema = 1;

/// Runs the `dspace` command line; `args` excludes the program name.
/// Commands: sample, run, train-surrogate, identify, aor, compare, report.
int run_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dspace::cli
