#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mpiwrapgen/bindings.hpp"
#include "mpiwrapgen/codegen.hpp"
#include "mpiwrapgen/diagnostics.hpp"

namespace mpiwrapgen {

struct RunOptions {
  /// Oldest to newest.
  std::vector<std::filesystem::path> spec_paths;
  std::optional<std::filesystem::path> supplement_path;
  std::filesystem::path template_dir;
  std::filesystem::path task_config_path;
  std::filesystem::path out_dir;
  std::set<BindingFamily> families = {BindingFamily::kC, BindingFamily::kFortran,
                                      BindingFamily::kF08};
  std::vector<ManglingScheme> schemes = {kSchemeTable.begin(), kSchemeTable.end()};
  bool strict = false;
  bool report_json = false;
  unsigned jobs = 1;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

struct RunResult {
  int exit_code = kExitOk;
  Diagnostics diagnostics;
  /// One line, e.g. "c: 12, fortran_intercept: 10, f08: 11, checks: 25".
  std::string summary;
  std::size_t all_procedures = 0;
  std::size_t f08_procedures = 0;
  std::optional<GeneratedTree> tree;
};

/// Reads one spec document; upstream apis.json documents are adapted first.
/// The version label is the document's "version" field or the file stem.
ApiSpec load_spec_file(const std::filesystem::path& path, Diagnostics& diagnostics,
                       DocumentRole role = DocumentRole::kStandard);

/// Writes `files` to `out_dir` through a sibling temporary directory that
/// replaces `out_dir` only once everything is written.
void write_tree_atomically(const std::filesystem::path& out_dir,
                           const std::map<std::string, std::string>& files);

RunResult run(const RunOptions& options);

/// Machine-readable report of a run.
Json report_json(const RunResult& result);

}  // namespace mpiwrapgen
