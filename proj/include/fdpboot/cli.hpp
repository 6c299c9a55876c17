#pragma once

#include <string>
#include <vector>

namespace fdpboot {

// Exit codes: 0 ok, 2 parse error, 3 dimension mismatch, 4 invalid scenario.
int run_cli(const std::vector<std::string>& args);

}  // namespace fdpboot
