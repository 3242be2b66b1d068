#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace sdwan {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitInfeasible = 2;

// Environment variable naming a directory searched for topology files that
// are not found at the given path.
inline constexpr const char* kFixtureDirEnv = "SDWAN_FIXTURE_DIR";

// Entry point of the sdwan-plan tool. `args` excludes the program name.
// Structured documents go to --out or `out`; human summaries go to `err`.
int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sdwan
