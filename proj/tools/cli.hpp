#pragma once

#include <string>
#include <vector>

namespace polysplit::cli {

// Parsed command line for one experiment run.  A fixed seed makes every
// seed-dependent artifact byte-identical across runs on one platform;
// wall-clock columns are the only exception.
struct ExperimentSpec {
  std::string command;
  std::string input;                 // problem or system JSON path
  std::string method = "fixed_point";  // fixed_point | admm | oracle
  std::vector<int> horizons;         // bench sweep; other commands use front()
  std::vector<double> theta;         // empty means all ones
  double xi = 10.0;
  double gamma = 0.5;
  double eps = 1e-3;
  int max_iter = 50000;
  double rho = 10.0;
  std::uint64_t seed = 0;
  int K = 1000;                      // multistart sample count
  int steps = 10;                    // closed-loop length
  int jobs = 0;                      // 0 means pick per command
  long cap = 1000000;                // oracle combination budget
  long max_structures = 100000;      // union-structure enumeration budget
  std::string out;                   // artifact path; empty means stdout
};

// Exit codes: 0 success, 2 negative mathematical outcome (non-convergence
// or a violated check), 3 input or usage error, 4 infeasible instance.
int dispatch(int argc, const char* const* argv);

}  // namespace polysplit::cli
