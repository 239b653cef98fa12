#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "spaceform/developing.hpp"
#include "spaceform/metric_field.hpp"
#include "spaceform/models.hpp"

namespace spaceform::cli {

enum ExitCode : int { exit_pass = 0, exit_error = 1, exit_check_failure = 2 };

struct RunOptions {
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed;
};

const std::vector<std::string>& command_names();
std::string tool_version();

/// Runs one command; writes the report and data files into out_dir. Returns
/// exit_pass or exit_check_failure, and throws on operational errors.
int run_command(const std::string& command, Config& cfg, const RunOptions& opts);

/// Same as run_command but converts exceptions to exit_error with a
/// diagnostic on stderr.
int run_guarded(const std::string& command, Config& cfg, const RunOptions& opts);

/// Writes to a temporary sibling and renames it over the target.
void write_atomic(const std::filesystem::path& path, const std::string& content);

// Pieces shared by the commands, exposed for tests.
MetricField field_from_config(const Config& cfg, int n);
double model_c_from_config(const Config& cfg);
ContinuationOptions continuation_from_config(const Config& cfg);
Germ germ_from_config(const Config& cfg, const std::string& section, const MetricField& field,
                      const ModelSpace& m, const CVec& base);
/// Loop for a word over generators [loop.<letter>]; upper case runs the loop backwards.
std::vector<CVec> word_loop(const Config& cfg, const std::string& word, const CVec& base);

}  // namespace spaceform::cli
