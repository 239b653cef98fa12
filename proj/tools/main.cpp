#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  namespace cli = spaceform::cli;
  CLI::App app{"Kaehler space form engine: curvature checks, developing maps, extensions"};
  app.set_version_flag("--version", cli::tool_version());
  app.require_subcommand(1);

  const std::map<std::string, std::string> help = {
      {"verify-space-form", "check Rm = c R0 on random samples"},
      {"develop", "develop a sample shell into the model space"},
      {"monodromy", "monodromy isometries of loop words"},
      {"extend", "extend the metric across a hole via the developing map"},
      {"probe", "real counterexample and cone-singularity tables"},
  };
  std::string config_path;
  std::string out_dir = ".";
  std::int64_t seed = -1;
  for (const auto& name : cli::command_names()) {
    auto* sub = app.add_subcommand(name, help.at(name));
    sub->add_option("--config", config_path, "configuration file")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "random seed (overrides run.seed)")->check(CLI::NonNegativeNumber);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::exit_error;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  cli::RunOptions opts;
  opts.out_dir = out_dir;
  if (seed >= 0) opts.seed = static_cast<std::uint64_t>(seed);
  try {
    cli::Config cfg = cli::Config::load(config_path);
    return cli::run_guarded(command, cfg, opts);
  } catch (const std::exception& e) {
    std::cerr << command << ": " << e.what() << '\n';
    return cli::exit_error;
  }
}
