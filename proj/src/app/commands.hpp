#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "app/config.hpp"

namespace bosegas::app {

enum ExitCode { kOk = 0, kInvariant = 1, kConfig = 2, kResource = 3 };

struct CommandResult {
  int exit_code = kOk;
  std::string content_hash;
};

CommandResult cmd_scatter(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log);
CommandResult cmd_twobody(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log);
CommandResult cmd_ed(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log);
CommandResult cmd_verify(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log);
CommandResult cmd_scan(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log);

/// Dispatches by name, creates `out`, and maps library exceptions to exit
/// codes: config/domain 2, resource 3, invariant/numeric/lookup 1.
CommandResult run_command(const std::string& name, const ExperimentConfig& cfg,
                          const std::filesystem::path& out, std::ostream& log);

}  // namespace bosegas::app
