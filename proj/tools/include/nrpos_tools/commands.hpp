#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "nrpos/harness.hpp"

namespace nrpos::tools {

enum ExitCode : int { kExitOk = 0, kExitDomain = 1, kExitIo = 2 };

struct CommandOptions {
  std::string command;  // validate | calibrate | locate | sweep | simulate
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::string calibration_path;
  std::string sweep;  // PARAM=START:STOP:N
};

// PARAM=START:STOP:N; throws UnknownParameter or ParseError.
harness::SweepSpec parse_sweep_spec(const std::string& text);

int exit_code_for(ErrorCode code) noexcept;

// Runs one subcommand. Reports go to out, diagnostics to err.
int run_command(const CommandOptions& options, std::ostream& out, std::ostream& err);

}  // namespace nrpos::tools
