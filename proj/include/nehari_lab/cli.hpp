#pragma once

namespace nehari_lab {

inline constexpr const char* kVersion = "0.1.0";
/// Environment variable holding the default worker thread count.
inline constexpr const char* kThreadsEnv = "NEHARI_LAB_THREADS";

/// Entry point of the nehari-lab executable. Returns 0 on success, 2 on
/// validation errors, 3 on accuracy or convergence failures.
int run_cli(int argc, char** argv);

}  // namespace nehari_lab
