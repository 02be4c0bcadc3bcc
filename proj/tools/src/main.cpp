#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "nrpos_tools/commands.hpp"

int main(int argc, char** argv) {
  auto logger = spdlog::stderr_color_mt("nrpos");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* level = std::getenv("TDOA_LOG")) spdlog::set_level(spdlog::level::from_str(level));

  CLI::App app{"5G PRS TDOA positioning simulator"};
  app.require_subcommand(1);

  nrpos::tools::CommandOptions options;
  std::uint64_t seed = 0;

  const auto add = [&](const std::string& name, const std::string& help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", options.config_path, "scenario file (JSON)")->required();
    sub->add_option("--seed", seed, "override the scenario seed");
    return sub;
  };

  add("validate", "check every scenario invariant");
  add("calibrate", "estimate inter-gNB offsets at the calibration positions")
      ->add_option("--out", options.out_dir, "output directory");
  auto* locate = add("locate", "position the UE at the test positions");
  locate->add_option("--out", options.out_dir, "output directory");
  locate->add_option("--calibration", options.calibration_path, "calibration.csv")->required();
  auto* sweep = add("sweep", "TOA bias study");
  sweep->add_option("--out", options.out_dir, "output directory");
  sweep->add_option("--sweep", options.sweep, "PARAM=START:STOP:N")->required();
  add("simulate", "calibration and positioning in one session")
      ->add_option("--out", options.out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : nrpos::tools::kExitDomain;
  }

  for (auto* sub : app.get_subcommands()) {
    options.command = sub->get_name();
    if (sub->count("--seed") > 0) options.seed = seed;
  }
  spdlog::info("running {}", options.command);
  return nrpos::tools::run_command(options, std::cout, std::cerr);
}
