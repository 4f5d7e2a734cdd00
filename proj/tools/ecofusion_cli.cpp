#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ecofusion/commands.hpp"

int main(int argc, char** argv) {
  using namespace ecofusion;

  CLI::App app{"EcoFusion energy-aware adaptive sensor fusion simulator"};
  app.require_subcommand(1);

  CommandOptions opts;
  std::string config;
  std::uint64_t seed = 0;
  std::string output_dir;
  std::string format = "csv";

  const char* descriptions[][2] = {
      {"sweep", "lambda sweep per gate policy (energy/loss trade-off)"},
      {"compare-fusion", "no-fusion, early, late and adaptive fusion side by side"},
      {"clockgate", "sensor clock-gating energy per context"},
      {"fit-gate", "fit the table-predictor gate on the training benchmark"},
      {"generate-scenes", "write the benchmark scene set"},
  };
  for (const auto& [name, desc] : descriptions) {
    auto* sub = app.add_subcommand(name, desc);
    sub->add_option("--config", config, "run configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "master seed (overrides the config)");
    sub->add_option("--workers", opts.workers, "worker threads (0 = all cores)");
    sub->add_option("--output-dir", output_dir, "output directory (overrides the config)");
    sub->add_option("--format", format, "report format")->check(CLI::IsMember({"csv", "json", "text"}));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  auto* sub = app.get_subcommands().front();
  opts.config_path = config;
  if (sub->count("--seed") > 0) opts.seed = seed;
  if (sub->count("--output-dir") > 0) opts.output_dir = output_dir;
  opts.format = *parse_output_format(format);
  return run_command(sub->get_name(), opts, std::cout, std::cerr);
}
