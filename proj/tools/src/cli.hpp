#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace spb::cli {

// Exit codes.
constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kAssumptionsFailed = 2;

constexpr unsigned long long kDefaultSeed = 1;

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace spb::cli
