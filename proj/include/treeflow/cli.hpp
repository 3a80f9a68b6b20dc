#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace treeflow {

// Exit codes shared by every subcommand.
enum ExitCode : int { kExitOk = 0, kExitInvariant = 1, kExitInput = 2, kExitModel = 3 };

struct RunConfig {
  std::string subcommand;
  std::string graph;  // path; crossratio falls back to the unit 2-rose
  std::uint64_t seed = 0;
  std::string out;  // CSV path; empty writes the CSV to stdout
  int depth = 4;
  std::string radius;  // Patterson truncation radius, exact; empty picks 24 * max edge length
  double s_offset = 0.05;
  double t_max = 100.0;
  double t_step = 5.0;
  int samples = 10000;
  double c_min = 1e-4;
  std::vector<std::string> ends;
  bool suite = false;
  std::string selftest_suite;
  bool corrupt = false;
  int random_fixtures = 50;
};

// Knob caps; larger requests are input errors.
inline constexpr int kMaxDepth = 12;
inline constexpr int kMaxSamples = 1'000'000;
inline constexpr double kMaxTime = 10'000.0;
inline constexpr int kMaxRandomFixtures = 1000;

int cmd_analyze(const RunConfig& cfg, std::ostream& out);
int cmd_measure(const RunConfig& cfg, std::ostream& out);
int cmd_crossratio(const RunConfig& cfg, std::ostream& out);
int cmd_mix(const RunConfig& cfg, std::ostream& out);
int cmd_quotient_demo(const RunConfig& cfg, std::ostream& out);
int cmd_selftest(const RunConfig& cfg, std::ostream& out);

// Canonical "key=value;..." rendering of the knobs a subcommand reads.
std::string config_string(const RunConfig& cfg);
// FNV-1a 64 of config_string, 16 hex digits.
std::string config_hash(const RunConfig& cfg);

// Parses argv, dispatches, and maps errors to exit codes.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace treeflow
