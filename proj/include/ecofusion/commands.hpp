#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ecofusion/report.hpp"
#include "ecofusion/runconfig.hpp"

namespace ecofusion {

struct CommandOptions {
  std::filesystem::path config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> output_dir;
  unsigned workers = 0;  // 0 = hardware concurrency
  OutputFormat format = OutputFormat::csv;
};

/// A finished command: report tables keyed by file stem, plus extra files to write verbatim.
struct CommandResult {
  std::vector<std::pair<std::string, Table>> tables;
  std::vector<std::pair<std::string, std::string>> files;  // file name -> contents
};

/// Loads the run config and applies flag overrides.
RunConfig resolve_config(const CommandOptions& opts);

CommandResult cmd_sweep(const Experiment& exp, unsigned workers);
CommandResult cmd_compare_fusion(const Experiment& exp, unsigned workers);
CommandResult cmd_clockgate(const Experiment& exp);
CommandResult cmd_fit_gate(const Experiment& exp, unsigned workers);
CommandResult cmd_generate_scenes(const Experiment& exp);

/// Training log: every configuration's realized loss on every training scene.
std::vector<GateLogEntry> oracle_training_log(const Experiment& exp, unsigned workers);

/// Gate table from the configured file, or fitted on the training benchmark when absent.
GateTable obtain_gate_table(const Experiment& exp, unsigned workers);

/// Writes every table (in opts.format) and file into the output directory atomically.
/// Returns the written paths in order.
std::vector<std::filesystem::path> write_result(const CommandResult& result,
                                                const std::filesystem::path& dir, OutputFormat format);

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

/// Runs a named command end to end, printing text tables to `out` and diagnostics to `err`.
int run_command(const std::string& name, const CommandOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace ecofusion
