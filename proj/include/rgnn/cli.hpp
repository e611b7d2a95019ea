#pragma once

#include <string>
#include <vector>

namespace rgnn {

inline const std::string kToolVersion = "0.1.0";

// Entry point behind the rgnn binary; returns the process exit status
// (0 success, 1 domain error, 2 usage error).
int cli_run(const std::vector<std::string>& args);

}  // namespace rgnn
