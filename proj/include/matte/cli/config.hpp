#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "matte/solver.hpp"

namespace matte::cli {

struct SolveOptions {
  SolverConfig solver;
  LossPolicy policy = LossPolicy::KnownDDC;
  bool deep = false;
};

/// Keys accepted by set_option and in config files, in flag spelling
/// (`--step-size` ↔ `step-size`).
const std::vector<std::string>& solve_option_keys();

/// Applies one key=value setting. Throws ParameterError for unknown keys or
/// values that do not parse.
void set_option(SolveOptions& options, std::string_view key, std::string_view value);

using Settings = std::vector<std::pair<std::string, std::string>>;

/// One `key=value` per line; blank lines and `#` comments ignored,
/// whitespace around keys and values trimmed. Throws IoError if unreadable
/// and ParameterError on a malformed line.
Settings parse_config(std::string_view text);
Settings read_config_file(const std::filesystem::path& path);

LossPolicy parse_policy(std::string_view name);
std::string policy_name(LossPolicy policy);

}  // namespace matte::cli
