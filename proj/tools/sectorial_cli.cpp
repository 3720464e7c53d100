#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sectorial/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Sectorial form experiments driven by a JSON config"};
  std::string config;
  std::string output;
  unsigned threads = 0;
  std::uint64_t seed = 0;
  app.add_option("--config", config, "JSON config file")->required();
  auto* out_opt = app.add_option("--output", output, "output directory");
  auto* thr_opt = app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  auto* seed_opt = app.add_option("--seed", seed, "seed, overrides the config");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : sectorial::cli::kConfigError;
  }
  sectorial::cli::Overrides ov;
  if (*out_opt) ov.output_dir = output;
  if (*thr_opt) ov.threads = threads;
  if (*seed_opt) ov.seed = seed;
  return sectorial::cli::run(config, ov, std::cerr);
}
