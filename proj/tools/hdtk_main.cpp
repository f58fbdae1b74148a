// hdtk <command> --config path [--out dir]

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hdtk/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Batch runner for multiplier, H-distribution and decomposition experiments"};
  app.require_subcommand(1, 1);

  std::string config;
  std::string out = ".";
  for (const auto& name : hdtk::experiment_commands()) {
    auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("--config", config, "experiment config (JSON)")->required();
    sub->add_option("--out", out, "output directory for report.json and table.csv");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  return hdtk::run_cli(command, config, out, std::cerr);
}
