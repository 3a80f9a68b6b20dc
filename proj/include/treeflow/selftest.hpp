#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace treeflow {

struct SelftestConfig {
  std::uint64_t seed = 0;
  std::string suite;     // empty: all suites
  bool corrupt = false;  // perturb the Gibbs fixture so additivity must fail
};

// graph_core, patterson, crossratio, dynamics, quotient.
const std::vector<std::string>& selftest_suites();

// Runs the property suites on the built-in fixtures and writes a
// deterministic report. Returns 0 when every check passes, 1 otherwise.
// Throws InvalidArgument for an unknown suite.
int run_selftest(const SelftestConfig& config, std::ostream& out);

}  // namespace treeflow
