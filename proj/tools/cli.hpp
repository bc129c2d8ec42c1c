#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace capelast::cli {

enum ExitCode { kOk = 0, kFailure = 1, kUsage = 2 };

/// Entry point behind the capelast executable. Output goes to `out`, messages to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct VerifyOptions {
  int nx = 32;
  int ny = 32;
  int nz = 17;
  std::size_t history = 6;
};

/// Writes the residual table of the named suite as CSV and returns kOk when every row is within
/// tolerance, kFailure otherwise. Throws PreconditionError for unusable options and
/// std::invalid_argument for an unknown suite.
int verify_suite(const std::string& suite, const VerifyOptions& opts, std::ostream& csv);

const std::vector<std::string>& suite_names();

}  // namespace capelast::cli
