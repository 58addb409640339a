#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mpiwrapgen/diagnostics.hpp"
#include "mpiwrapgen/spec_model.hpp"

namespace mpiwrapgen {

enum class HookPoint { kUseStatements, kLocalVars, kEnter, kPrePmpi, kPostPmpi, kExit };

/// Skeleton order.
inline constexpr std::array kHookPoints = {
    HookPoint::kUseStatements, HookPoint::kLocalVars, HookPoint::kEnter,
    HookPoint::kPrePmpi,       HookPoint::kPostPmpi,  HookPoint::kExit,
};

std::string_view to_string(HookPoint hook);
std::optional<HookPoint> hook_point_from_string(std::string_view text);

struct TaskParameter {
  std::string name;
  std::optional<std::string> default_value;
  /// The bound value must name a parameter of the target procedure.
  bool argument = false;

  friend bool operator==(const TaskParameter&, const TaskParameter&) = default;
};

/// Contribution text per hook, for one wrapper family.
using HookTemplates = std::map<HookPoint, std::string>;

struct TaskDefinition {
  std::string name;
  std::vector<TaskParameter> parameters;
  /// Local variables the task declares; used for collision detection.
  std::vector<std::string> locals;
  /// Keyed by family. Only kC and kF08 wrappers carry task code: the legacy
  /// intercept delegates to the C wrapper, which already runs the tasks.
  std::map<BindingFamily, HookTemplates> contributions;

  const TaskParameter* find_parameter(std::string_view param_name) const;

  friend bool operator==(const TaskDefinition&, const TaskDefinition&) = default;
};

/// Skeleton variables usable in every contribution.
inline constexpr std::array<std::string_view, 2> kSkeletonVariables = {"procedure", "family"};

using TaskLibrary = std::map<std::string, TaskDefinition, std::less<>>;

TaskLibrary load_task_library(const Json& document, std::string_view source = {});

/// Adds the definitions of `more`; a name defined twice is an error.
void merge_task_library(TaskLibrary& into, const TaskLibrary& more, std::string_view source);

using Bindings = std::map<std::string, std::string, std::less<>>;

struct TaskInstance {
  TaskDefinition definition;
  /// Complete: defaults already applied.
  Bindings bindings;
  std::string target;

  friend bool operator==(const TaskInstance&, const TaskInstance&) = default;
};

TaskInstance instantiate(const TaskDefinition& definition, const Bindings& bindings,
                         const ProcedureSpec& proc);

struct TaskConfig {
  std::map<std::string, std::vector<TaskInstance>, std::less<>> assignments;

  const std::vector<TaskInstance>& instances_for(std::string_view procedure) const;
};

/// `base_dir` resolves relative task_library paths. Library paths listed in
/// the document are loaded and merged with `extra_library`. Assignments to
/// procedures absent from `spec` are dropped with a warning.
TaskConfig load_task_config(const Json& document, const ApiSpec& spec,
                            Diagnostics& diagnostics,
                            const std::filesystem::path& base_dir = {},
                            const TaskLibrary& extra_library = {},
                            std::string_view source = {});

TaskConfig load_task_config_file(const std::filesystem::path& path, const ApiSpec& spec,
                                 Diagnostics& diagnostics);

using HookFragments = std::map<HookPoint, std::vector<std::string>>;

/// Fragments per hook in instance order; hooks without fragments are absent.
/// Only kC and kF08 have contributions.
HookFragments compose(const std::vector<TaskInstance>& instances, BindingFamily family);

/// Like compose, but argument-parameter values render as `${parameter}`, so
/// two procedures that bind the same task to differently named arguments
/// compare equal.
HookFragments compose_abstract(const std::vector<TaskInstance>& instances,
                               BindingFamily family);

/// The built-in task library (calc_bytes_sent, calc_bytes_recv,
/// track_request, track_comm).
const TaskLibrary& default_task_library();

}  // namespace mpiwrapgen
