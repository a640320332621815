#pragma once

#include <string>
#include <vector>

namespace tomo {

// Entry point shared by the binary and the tests. args excludes the
// program name, e.g. {"simulate", "--d", "8"}. Exit codes: 0 success,
// 1 failure (selftest or decode failure), 2 invalid configuration or
// input, 3 detector capability error.
int run_cli(const std::vector<std::string>& args);

}  // namespace tomo
