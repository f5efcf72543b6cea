#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "kp5/duhamel.hpp"

namespace kp5::cli {

inline constexpr const char* kVersion = "0.1.0";

enum class Command { Generate, Linear, Solve, Norms, Verify };
enum class OutputFormat { Json, Csv };

struct RunConfig {
  Command command = Command::Norms;
  std::string target;  // verify target
  SolverParams params;
  int grid = 64;
  double length = 64.0;
  int nt = 288;
  double half_width = 2.25;
  double amplitude = 0.01;
  std::uint64_t seed = 1;
  int trials = 0;  // 0: the target's default
  std::string g_path;
  std::string h_path;
  std::string snapshot_path;
  std::string out_dir;
  std::string config_file;
  std::string norm = "sobolev";
  std::vector<double> times{0.25, 0.5};
  OutputFormat format = OutputFormat::Json;
};

const char* to_string(Command c);

/// Parses `command [target] --flag value ...` (program name excluded). A
/// `--config file` of flat `key = value` lines supplies defaults that flags
/// override; unknown keys and out-of-range parameters raise usage errors.
RunConfig parse_config(const std::vector<std::string>& args);

/// Fully resolved configuration as a JSON object string.
std::string describe(const RunConfig& cfg);

/// Executes the pipeline and writes the report to `out` (and to out_dir when
/// set). Returns 0 on success, 1 when an assertion fails.
int run(const RunConfig& cfg, std::ostream& out);

/// parse_config + run with error JSON and exit codes 0/1/2.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace kp5::cli
