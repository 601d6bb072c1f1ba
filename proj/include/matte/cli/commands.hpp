#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "matte/cli/config.hpp"

namespace matte::cli {

/// Process exit codes.
enum ExitCode : int { kOk = 0, kUsageError = 1, kNumericalFailure = 2 };

/// Runs the command line `args` (program name excluded). Reports go to `out`,
/// diagnostics to `err`.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

/// JSON trace document for one solve.
std::string trace_json(const SolveResult& result, const SolveOptions& options);

/// Solves one image/trimap pair and writes the alpha PNG plus its trace.
void solve_file(const std::filesystem::path& image, const std::filesystem::path& trimap,
                const std::filesystem::path& output, const std::filesystem::path& trace, const SolveOptions& options,
                std::ostream& out);

/// Writes through a temporary sibling file, then renames.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace matte::cli
