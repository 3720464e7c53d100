#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

namespace sectorial::cli {

/// Command-line values that take precedence over the config file.
struct Overrides {
  std::optional<std::filesystem::path> output_dir;
  std::optional<unsigned> threads;
  std::optional<std::uint64_t> seed;
};

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kIoError = 1;
inline constexpr int kConfigError = 2;
inline constexpr int kNumericalError = 3;

/// Runs the subcommand described by the JSON file at `config_path`, writing
/// <subcommand>.csv (plus extra tables for some subcommands) and summary.json
/// into the output directory. Errors go to `err` as one JSON object.
int run(const std::filesystem::path& config_path, const Overrides& ov, std::ostream& err);

/// Same, for an already-parsed config.
int run_config(const nlohmann::json& config, const Overrides& ov, std::ostream& err);

}  // namespace sectorial::cli
