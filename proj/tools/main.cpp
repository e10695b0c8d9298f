#include <iostream>

#include <CLI11.hpp>

#include "run_config.hpp"

int main(int argc, char** argv) {
  using namespace cqsphere::cli;

  CLI::App app{"CQ and shrinking projection runs on the sphere"};
  app.require_subcommand(1);
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  app.add_option("--seed", seed, "override the config seed");
  app.add_option("--out", out, "override the output path prefix");

  std::string config_path;
  CLI::App* run = app.add_subcommand("run", "run the configured method(s)");
  run->add_option("config", config_path, "config file")->required();
  CLI::App* compare = app.add_subcommand("compare", "run both methods and compare");
  compare->add_option("config", config_path, "config file")->required();
  run->fallthrough();
  compare->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    RunConfig cfg = load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (out) cfg.output = *out;
    return run->parsed() ? cmd_run(cfg, std::cout) : cmd_compare(cfg, std::cout);
  } catch (const cqsphere::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
