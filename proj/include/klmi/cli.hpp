#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace klmi::cli {

/// Exit statuses of run().
inline constexpr int kOk = 0;
inline constexpr int kDataError = 1;
inline constexpr int kUsageError = 2;

/// Runs one `klmi` invocation. `args` excludes the program name. Results go
/// to `out`; failures print a one-line diagnostic to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace klmi::cli
