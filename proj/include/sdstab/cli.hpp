#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sdstab/json_io.hpp"

namespace sdstab::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kSearchExhausted = 3,
  kNumericFailure = 4,
};

struct SweepRange {
  double lo = 0.0;
  double hi = 0.0;
  double step = 0.0;

  std::vector<double> values() const;
};

/// Parses "LO:HI:STEP".
SweepRange parse_sweep(const std::string& text);

struct RunConfig {
  std::string command;
  std::optional<std::string> system_file;
  std::optional<std::string> example;  // oscillator | frac-heat | schrodinger
  double T = 1.0;
  int N_max = 16;
  double delta = 0.9;
  std::optional<double> horizon;  // defaults to 40 T
  int steps_per_period = 16;
  std::optional<SweepRange> sweep;
  double epsilon = 0.01;
  int N = 2;  // witness horizon
  int grid_points = 512;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  std::string loop = "dc";      // dc | cc | dp | cp
  std::string feedback = "lq";  // lq | zero | damping
  double gamma = 1.0;
  int modes = 64;
  double s = 1.5;
  double c = 1.0;
  double xi_max = 8.0;
  bool timing = false;

  double effective_horizon() const { return horizon.value_or(40.0 * T); }
};

struct Report {
  Json json;
  int exit_code = kOk;
  std::vector<std::string> lines;              // human-readable summary
  std::map<std::string, std::string> files;    // extra outputs, name → text
};

/// Resolves --system / --example into a system. Throws Error on bad config.
AnySystem load_system(const RunConfig& cfg);

Report cmd_analyze(const RunConfig& cfg);
Report cmd_synthesize(const RunConfig& cfg);
Report cmd_simulate(const RunConfig& cfg);
Report cmd_sweep(const RunConfig& cfg);
Report cmd_witness(const RunConfig& cfg);
Report cmd_example(const RunConfig& cfg);

Report dispatch(const RunConfig& cfg);

/// Full front end: parse, dispatch, write report.json (+ CSVs) into --out.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sdstab::cli
