#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gabden/errors.hpp"
#include "gabden/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"gabden: Gabor density toolkit"};
  app.require_subcommand(1, 1);

  std::string config;
  std::string out = "gabden-out";
  std::optional<std::uint64_t> seed;

  const char* commands[][2] = {{"stft", "sample signals and their Gaussian-window STFT fields"},
                               {"density", "extremal cube counts of point sets"},
                               {"bounds", "Gram bounds and minimality margins of finite sections"},
                               {"verify", "run lemma and theorem checks, one JSON report each"},
                               {"report", "summarize existing verification reports"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "JSON run config")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory");
    sub->add_option("--seed", seed, "override every seed in the config");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : gabden::kExitUsage;
  }

  gabden::RunConfig rc;
  rc.command = gabden::parse_command(app.get_subcommands().front()->get_name());
  rc.config_path = config;
  rc.out_dir = out;
  rc.seed = seed;
  return gabden::run(rc, std::cerr);
}
