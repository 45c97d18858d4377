#pragma once

#include <string>
#include <vector>

namespace multisym::cli {

/// Entry point shared by the binary and the tests. Exit codes: 0 success,
/// 1 check failure, 2 usage error.
int run(const std::vector<std::string>& args);

}  // namespace multisym::cli
