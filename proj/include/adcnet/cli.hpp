#pragma once

#include <string>
#include <vector>

namespace adcnet::cli {

constexpr const char* kVersion = "0.1.0";

/// Runs one `adcnet` invocation. Returns 0 on success, 1 on a domain error
/// and 2 on a usage error. Diagnostics go to stderr.
int dispatch(int argc, const char* const* argv);
int dispatch(const std::vector<std::string>& args);  // args[0] is the program name

}  // namespace adcnet::cli
