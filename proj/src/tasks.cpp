#include "mpiwrapgen/tasks.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "mpiwrapgen/template_text.hpp"

namespace mpiwrapgen {

namespace {

constexpr std::string_view kDefaultTasksJson =
#include "default_tasks.inc"
    ;

constexpr auto kHookNames = std::to_array<std::pair<HookPoint, std::string_view>>({
    {HookPoint::kUseStatements, "use_statements"},
    {HookPoint::kLocalVars, "local_vars"},
    {HookPoint::kEnter, "enter"},
    {HookPoint::kPrePmpi, "pre_pmpi"},
    {HookPoint::kPostPmpi, "post_pmpi"},
    {HookPoint::kExit, "exit"},
});

std::string where(std::string_view source, std::string_view entry) {
  if (source.empty()) return std::string(entry);
  return std::string(source) + ": " + std::string(entry);
}

std::string contribution_text(const Json& value, const std::string& loc) {
  if (value.is_string()) return value.get<std::string>();
  if (!value.is_array()) throw ParseError(loc, "contribution must be a string or a list of lines");
  std::string text;
  for (const auto& line : value) {
    if (!line.is_string()) throw ParseError(loc, "contribution lines must be strings");
    if (!text.empty()) text += '\n';
    text += line.get<std::string>();
  }
  return text;
}

std::optional<BindingFamily> contribution_family(std::string_view key) {
  if (key == "c") return BindingFamily::kC;
  if (key == "f08") return BindingFamily::kF08;
  return std::nullopt;
}

TaskDefinition parse_task(const Json& entry, std::string_view source) {
  if (!entry.is_object() || !entry.contains("name") || !entry["name"].is_string()) {
    throw ParseError(std::string(source), "task entry without a name");
  }
  TaskDefinition def;
  def.name = entry["name"].get<std::string>();
  const std::string loc = where(source, "task '" + def.name + "'");

  if (entry.contains("parameters")) {
    for (const auto& p : entry["parameters"]) {
      if (!p.is_object() || !p.contains("name") || !p["name"].is_string()) {
        throw ParseError(loc, "parameter without a name");
      }
      TaskParameter param;
      param.name = p["name"].get<std::string>();
      if (def.find_parameter(param.name)) {
        throw ParseError(loc, "duplicate parameter '" + param.name + "'");
      }
      if (std::find(kSkeletonVariables.begin(), kSkeletonVariables.end(), param.name) !=
          kSkeletonVariables.end()) {
        throw ParseError(loc, "parameter '" + param.name + "' shadows a skeleton variable");
      }
      if (p.contains("default")) param.default_value = p["default"].get<std::string>();
      param.argument = p.value("argument", false);
      def.parameters.push_back(std::move(param));
    }
  }
  if (entry.contains("locals")) {
    for (const auto& l : entry["locals"]) def.locals.push_back(l.get<std::string>());
  }
  if (entry.contains("contributions")) {
    const auto& contributions = entry["contributions"];
    if (!contributions.is_object()) throw ParseError(loc, "contributions must be an object");
    for (const auto& [family_key, hooks] : contributions.items()) {
      auto family = contribution_family(family_key);
      if (!family) {
        throw ParseError(loc, "contributions for unknown family '" + family_key +
                                  "' (expected c or f08)");
      }
      HookTemplates templates;
      for (const auto& [hook_key, text] : hooks.items()) {
        auto hook = hook_point_from_string(hook_key);
        if (!hook) throw ParseError(loc, "unknown hook point '" + hook_key + "'");
        templates[*hook] = contribution_text(text, loc);
        for (const auto& name : placeholder_names(templates[*hook])) {
          const bool skeleton = std::find(kSkeletonVariables.begin(), kSkeletonVariables.end(),
                                          name) != kSkeletonVariables.end();
          if (!skeleton && !def.find_parameter(name)) {
            throw ParseError(loc, "placeholder '${" + name + "}' is not a declared parameter");
          }
        }
      }
      def.contributions[*family] = std::move(templates);
    }
  }
  return def;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return Json::parse(buffer.str());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string(), e.what());
  }
}

std::string family_key(BindingFamily family) {
  return family == BindingFamily::kF08 ? "f08" : std::string(to_string(family));
}

HookFragments compose_impl(const std::vector<TaskInstance>& instances, BindingFamily family,
                           bool abstract) {
  HookFragments out;
  if (instances.empty()) return out;

  std::map<std::string, std::string, std::less<>> owner;
  for (const auto& inst : instances) {
    if (inst.target != instances.front().target) {
      throw ContractError(inst.definition.name,
                          "composed instances target different procedures ('" + inst.target +
                              "' and '" + instances.front().target + "')");
    }
    for (const auto& local : inst.definition.locals) {
      auto [it, inserted] = owner.emplace(local, inst.definition.name);
      if (!inserted) {
        throw ValidationError(inst.target, "local variable '" + local + "' declared by both '" +
                                               it->second + "' and '" + inst.definition.name +
                                               "'");
      }
    }
  }

  for (const auto& inst : instances) {
    auto contributions = inst.definition.contributions.find(family);
    if (contributions == inst.definition.contributions.end()) continue;
    Bindings values = inst.bindings;
    if (abstract) {
      for (const auto& p : inst.definition.parameters) {
        if (p.argument) values[p.name] = "${" + p.name + "}";
      }
    }
    values["procedure"] = inst.target;
    values["family"] = family_key(family);
    for (auto hook : kHookPoints) {
      auto text = contributions->second.find(hook);
      if (text == contributions->second.end()) continue;
      out[hook].push_back(substitute(
          text->second, values,
          inst.target + " task '" + inst.definition.name + "' " + std::string(to_string(hook))));
    }
  }
  return out;
}

const std::vector<TaskInstance> kNoInstances;

}  // namespace

std::string_view to_string(HookPoint hook) {
  for (const auto& [h, name] : kHookNames) {
    if (h == hook) return name;
  }
  return "enter";
}

std::optional<HookPoint> hook_point_from_string(std::string_view text) {
  for (const auto& [h, name] : kHookNames) {
    if (name == text) return h;
  }
  return std::nullopt;
}

const TaskParameter* TaskDefinition::find_parameter(std::string_view param_name) const {
  auto it = std::find_if(parameters.begin(), parameters.end(),
                         [&](const TaskParameter& p) { return p.name == param_name; });
  return it == parameters.end() ? nullptr : &*it;
}

TaskLibrary load_task_library(const Json& document, std::string_view source) {
  if (!document.is_object()) throw ParseError(std::string(source), "task library must be an object");
  if (document.contains("format_version") && document["format_version"] != 1) {
    throw ParseError(std::string(source), "unsupported format_version");
  }
  TaskLibrary library;
  if (!document.contains("tasks")) return library;
  if (!document["tasks"].is_array()) throw ParseError(std::string(source), "'tasks' must be a list");
  for (const auto& entry : document["tasks"]) {
    auto def = parse_task(entry, source);
    const std::string name = def.name;
    if (!library.emplace(name, std::move(def)).second) {
      throw ValidationError(where(source, "task '" + name + "'"), "task defined twice");
    }
  }
  return library;
}

void merge_task_library(TaskLibrary& into, const TaskLibrary& more, std::string_view source) {
  for (const auto& [name, def] : more) {
    if (!into.emplace(name, def).second) {
      throw ValidationError(where(source, "task '" + name + "'"), "task defined twice");
    }
  }
}

TaskInstance instantiate(const TaskDefinition& definition, const Bindings& bindings,
                         const ProcedureSpec& proc) {
  const std::string loc = proc.name + " task '" + definition.name + "'";
  for (const auto& [key, value] : bindings) {
    if (!definition.find_parameter(key)) {
      throw ValidationError(loc, "binding for undeclared parameter '" + key + "'");
    }
  }
  TaskInstance inst;
  inst.definition = definition;
  inst.target = proc.name;
  for (const auto& p : definition.parameters) {
    auto it = bindings.find(p.name);
    std::string value;
    if (it != bindings.end()) {
      value = it->second;
    } else if (p.default_value) {
      value = *p.default_value;
    } else {
      throw ValidationError(loc, "parameter '" + p.name + "' is not bound");
    }
    if (p.argument && !proc.find_parameter(value)) {
      throw ValidationError(loc, "parameter '" + p.name + "' refers to '" + value +
                                     "', which is not an argument of " + proc.name);
    }
    inst.bindings[p.name] = std::move(value);
  }
  return inst;
}

const std::vector<TaskInstance>& TaskConfig::instances_for(std::string_view procedure) const {
  auto it = assignments.find(procedure);
  return it == assignments.end() ? kNoInstances : it->second;
}

TaskConfig load_task_config(const Json& document, const ApiSpec& spec,
                            Diagnostics& diagnostics,
                            const std::filesystem::path& base_dir,
                            const TaskLibrary& extra_library, std::string_view source) {
  const std::string src(source);
  if (!document.is_object()) throw ParseError(src, "task config must be an object");
  if (document.contains("format_version") && document["format_version"] != 1) {
    throw ParseError(src, "unsupported format_version");
  }

  TaskLibrary library = extra_library;
  if (document.contains("task_library")) {
    const auto& libs = document["task_library"];
    std::vector<std::string> paths;
    if (libs.is_string()) {
      paths.push_back(libs.get<std::string>());
    } else {
      for (const auto& p : libs) paths.push_back(p.get<std::string>());
    }
    for (const auto& p : paths) {
      const auto path = base_dir / p;
      merge_task_library(library, load_task_library(read_json_file(path), path.string()),
                         path.string());
    }
  }

  TaskConfig config;
  auto assign = [&](const std::string& procedure, const Json& entries, const std::string& loc) {
    auto proc = spec.procedures.find(procedure);
    if (proc == spec.procedures.end()) {
      diagnostics.warn(loc, "procedure '" + procedure + "' is not in the spec; assignment ignored");
      return;
    }
    if (!entries.is_array()) throw ParseError(loc, "task list must be a list");
    for (const auto& e : entries) {
      std::string task_name;
      Bindings bindings;
      if (e.is_string()) {
        task_name = e.get<std::string>();
      } else if (e.is_object() && e.contains("task")) {
        task_name = e["task"].get<std::string>();
        if (e.contains("with")) {
          for (const auto& [k, v] : e["with"].items()) bindings[k] = v.get<std::string>();
        }
      } else {
        throw ParseError(loc, "task entry must be a name or {task, with}");
      }
      auto def = library.find(task_name);
      if (def == library.end()) {
        throw ValidationError(loc, "unknown task '" + task_name + "'");
      }
      config.assignments[procedure].push_back(instantiate(def->second, bindings, proc->second));
    }
  };

  if (document.contains("groups")) {
    for (const auto& group : document["groups"]) {
      const std::string name = group.value("name", std::string("<unnamed>"));
      const std::string loc = where(source, "group '" + name + "'");
      if (!group.contains("procedures") || !group.contains("tasks")) {
        throw ParseError(loc, "group needs 'procedures' and 'tasks'");
      }
      for (const auto& p : group["procedures"]) assign(p.get<std::string>(), group["tasks"], loc);
    }
  }
  if (document.contains("procedures")) {
    const auto& procedures = document["procedures"];
    if (!procedures.is_object()) throw ParseError(src, "'procedures' must be an object");
    for (const auto& [name, entries] : procedures.items()) {
      assign(name, entries, where(source, name));
    }
  }

  // Surface collisions at load time rather than during generation.
  for (const auto& [name, instances] : config.assignments) {
    compose(instances, BindingFamily::kC);
  }
  return config;
}

TaskConfig load_task_config_file(const std::filesystem::path& path, const ApiSpec& spec,
                                 Diagnostics& diagnostics) {
  return load_task_config(read_json_file(path), spec, diagnostics, path.parent_path(), {},
                          path.string());
}

HookFragments compose(const std::vector<TaskInstance>& instances, BindingFamily family) {
  return compose_impl(instances, family, false);
}

HookFragments compose_abstract(const std::vector<TaskInstance>& instances,
                               BindingFamily family) {
  return compose_impl(instances, family, true);
}

const TaskLibrary& default_task_library() {
  static const TaskLibrary library =
      load_task_library(Json::parse(kDefaultTasksJson), "<built-in tasks>");
  return library;
}

}  // namespace mpiwrapgen
