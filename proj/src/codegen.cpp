#include "mpiwrapgen/codegen.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <fstream>
#include <future>
#include <regex>
#include <sstream>
#include <tuple>

#include "codegen_internal.hpp"
#include "mpiwrapgen/template_text.hpp"

namespace mpiwrapgen {

namespace detail {

std::string upper(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

void append_lines(std::string& out, std::string_view text, std::string_view indent) {
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    if (!line.empty()) {
      out += indent;
      out += line;
    }
    out += '\n';
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
}

void append_hook(std::string& out, const HookFragments& fragments, HookPoint hook,
                 std::string_view indent) {
  auto it = fragments.find(hook);
  if (it == fragments.end()) return;
  for (const auto& fragment : it->second) append_lines(out, fragment, indent);
}

std::string join(const std::vector<std::string>& parts, std::string_view separator) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += separator;
    out += parts[i];
  }
  return out;
}

std::string generated_banner(std::string_view comment_prefix) {
  const std::string text = "Generated by mpiwrapgen " MPIWRAPGEN_VERSION ". Do not edit.";
  if (comment_prefix == "/*") return "/* " + text + " */\n";
  return std::string(comment_prefix) + " " + text + "\n";
}

constexpr std::size_t kFortranLineLimit = 100;

std::string fortran_line(const std::string& statement, const std::string& indent) {
  if (indent.size() + statement.size() <= kFortranLineLimit) return indent + statement + "\n";
  const std::string continuation = indent + std::string(2 * kIndent.size(), ' ');
  std::string out = indent;
  std::size_t column = indent.size();
  std::size_t pos = 0;
  while (pos < statement.size()) {
    auto comma = statement.find(", ", pos);
    std::string piece = comma == std::string::npos ? statement.substr(pos)
                                                   : statement.substr(pos, comma + 1 - pos);
    if (column + piece.size() + 2 > kFortranLineLimit && column > continuation.size()) {
      out += " &\n" + continuation;
      column = continuation.size();
    } else if (pos != 0) {
      out += ' ';
      ++column;
    }
    out += piece;
    column += piece.size();
    pos = comma == std::string::npos ? statement.size() : comma + 2;
  }
  return out + "\n";
}

void collect_mpi_names(const std::string& declaration, std::vector<std::string>& names) {
  static const std::regex kName(R"(\bMPI_[A-Za-z0-9_]+)");
  const auto type_part = declaration.substr(0, declaration.find("::"));
  for (auto it = std::sregex_iterator(type_part.begin(), type_part.end(), kName);
       it != std::sregex_iterator(); ++it) {
    std::string name = it->str();
    if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(name);
  }
}

}  // namespace detail

namespace {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string file_extension(BindingFamily family) {
  return family == BindingFamily::kF08 ? ".F90" : ".c";
}

std::string prelude_for(BindingFamily family, const GeneratorOptions& options) {
  switch (family) {
    case BindingFamily::kC: return c_file_prelude(options);
    case BindingFamily::kFortran: return intercept_file_prelude(options);
    case BindingFamily::kF08: return f08_file_prelude();
  }
  return {};
}

constexpr std::string_view kFortranConstants = R"(
/* Addresses of the Fortran special constants (MPI_BOTTOM, MPI_IN_PLACE,
   MPI_STATUS_IGNORE, MPI_STATUSES_IGNORE). Fortran and C represent them
   differently, so the intercept layer compares incoming addresses against
   these before crossing into C. The tool records them when its Fortran side
   initializes, for example by passing the constants from a Fortran routine
   to mpiwrapgen_set_fortran_constants. */
#include <stddef.h>

void* mpiwrapgen_fortran_bottom = NULL;
void* mpiwrapgen_fortran_in_place = NULL;
void* mpiwrapgen_fortran_status_ignore = NULL;
void* mpiwrapgen_fortran_statuses_ignore = NULL;

void mpiwrapgen_set_fortran_constants(void* bottom, void* in_place, void* status_ignore,
                                      void* statuses_ignore)
{
    mpiwrapgen_fortran_bottom = bottom;
    mpiwrapgen_fortran_in_place = in_place;
    mpiwrapgen_fortran_status_ignore = status_ignore;
    mpiwrapgen_fortran_statuses_ignore = statuses_ignore;
}
)";

struct FileJob {
  std::string path;
  const ResolvedTemplate* resolved = nullptr;
  BindingFamily family = BindingFamily::kC;
};

}  // namespace

std::string_view family_label(BindingFamily family) {
  switch (family) {
    case BindingFamily::kC: return "c";
    case BindingFamily::kFortran: return "fortran_intercept";
    case BindingFamily::kF08: return "f08";
  }
  return "c";
}

std::optional<BindingFamily> family_from_label(std::string_view text) {
  if (text == "c") return BindingFamily::kC;
  if (text == "fortran_intercept" || text == "fortran" || text == "f") {
    return BindingFamily::kFortran;
  }
  if (text == "f08") return BindingFamily::kF08;
  return std::nullopt;
}

std::string_view family_directory(BindingFamily family) {
  switch (family) {
    case BindingFamily::kC: return "c";
    case BindingFamily::kFortran: return "f";
    case BindingFamily::kF08: return "f08";
  }
  return "c";
}

std::string guard_name(const ProcedureSpec& proc, BindingFamily family,
                       const SymbolVariant& variant) {
  std::string tag;
  switch (family) {
    case BindingFamily::kC: tag = "C"; break;
    case BindingFamily::kFortran:
      tag = variant.descriptor_suffix == DescriptorSuffix::kFts ? "F_TS_BUFFERS" : "F";
      break;
    case BindingFamily::kF08:
      tag = variant.descriptor_suffix == DescriptorSuffix::kF08ts ? "F08_TS_BUFFERS" : "F08";
      break;
  }
  std::string guard = "HAVE_" + tag + "_" + detail::upper(proc.name);
  if (variant.large_count) guard += "_C";
  return guard;
}

std::vector<SymbolVariant> wrapper_variants(const ProcedureSpec& proc, BindingFamily family,
                                            const GeneratorOptions& options) {
  std::vector<SymbolVariant> out;
  if (skip_reason(proc, family)) return out;
  const ManglingScheme scheme =
      options.schemes.empty() ? kSchemeTable[1] : options.schemes.front();
  switch (family) {
    case BindingFamily::kC:
      out.push_back(c_symbol_variant(proc, false));
      if (options.large_count && proc.has_large_count_variant) {
        out.push_back(c_symbol_variant(proc, false, true));
      }
      break;
    case BindingFamily::kFortran: {
      // Only the by-address symbol: descriptor-based (_fts) calls cannot be
      // converted in C.
      const std::array schemes = {scheme};
      out.push_back(fortran_symbol_variants(proc, schemes, false).front());
      break;
    }
    case BindingFamily::kF08: {
      const std::array schemes = {scheme};
      out = f08_symbol_variants(proc, schemes, false, options.large_count);
      break;
    }
  }
  return out;
}

WrapperUnit render_wrapper(const ProcedureSpec& proc, BindingFamily family,
                           const HookFragments& fragments, const SymbolVariant& variant,
                           const GeneratorOptions& options) {
  if (variant.family != family || variant.procedure != proc.name) {
    throw ContractError(proc.name, "variant does not belong to this procedure and family");
  }
  if (auto reason = skip_reason(proc, family)) {
    throw ContractError(proc.name, std::string(family_label(family)) + ": " + *reason);
  }
  WrapperUnit unit;
  unit.procedure = proc.name;
  unit.family = family;
  unit.variant = variant;
  unit.guard = guard_name(proc, family, variant);
  switch (family) {
    case BindingFamily::kC:
      unit.text = render_c_wrapper(proc, fragments, variant, unit.guard, options);
      break;
    case BindingFamily::kFortran:
      unit.text = render_fortran_intercept(proc, variant, unit.guard);
      break;
    case BindingFamily::kF08:
      unit.text = render_f08_wrapper(proc, fragments, variant, unit.guard, options);
      unit.required_checks = {"f08_module_" + proc.name,
                              "f08_symbol_" + proc.name + (variant.large_count ? "_c" : "")};
      break;
  }
  if (has_placeholder(unit.text)) {
    throw ValidationError(proc.name, "unresolved placeholder in " +
                                         std::string(family_label(family)) + " wrapper");
  }
  return unit;
}

SourceFileTemplate parse_source_template(const Json& document, std::string_view source) {
  const std::string src(source);
  if (!document.is_object()) throw ParseError(src, "template must be an object");
  if (document.contains("format_version") && document["format_version"] != 1) {
    throw ParseError(src, "unsupported format_version");
  }
  if (!document.contains("name") || !document["name"].is_string()) {
    throw ParseError(src, "template without a name");
  }
  SourceFileTemplate t;
  t.name = document["name"].get<std::string>();
  static const std::regex kFileName(R"([A-Za-z0-9_][A-Za-z0-9_.-]*)");
  if (!std::regex_match(t.name, kFileName) || t.name == "tool_interface") {
    throw ParseError(src, "invalid template name '" + t.name + "'");
  }
  if (document.contains("wrappers")) {
    for (const auto& w : document["wrappers"]) t.wrappers.push_back(w.get<std::string>());
  }
  if (document.contains("select")) {
    const auto& select = document["select"];
    if (select.is_string() && select == "remaining") {
      t.select_remaining = true;
    } else if (select.is_object() && select.contains("chapters")) {
      for (const auto& c : select["chapters"]) t.chapters.push_back(c.get<std::string>());
    } else {
      throw ParseError(src, "select must be \"remaining\" or {\"chapters\": [...]}");
    }
  }
  if (document.contains("prelude")) {
    const auto& prelude = document["prelude"];
    if (prelude.is_string()) {
      t.prelude = prelude.get<std::string>();
    } else {
      for (const auto& line : prelude) t.prelude += line.get<std::string>() + "\n";
    }
    if (!t.prelude.empty() && t.prelude.back() != '\n') t.prelude += '\n';
  }
  if (document.contains("families")) {
    for (const auto& f : document["families"]) {
      auto family = family_from_label(f.get<std::string>());
      if (!family) throw ParseError(src, "unknown family '" + f.get<std::string>() + "'");
      t.families.insert(*family);
    }
  }
  return t;
}

std::vector<SourceFileTemplate> load_templates(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw IoError(dir.string(), "template directory not found");
  }
  std::vector<std::filesystem::path> paths;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      paths.push_back(entry.path());
    }
  }
  if (ec) throw IoError(dir.string(), ec.message());
  std::sort(paths.begin(), paths.end());
  std::vector<SourceFileTemplate> out;
  for (const auto& p : paths) {
    Json doc;
    try {
      doc = Json::parse(read_text(p));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(p.string(), e.what());
    }
    out.push_back(parse_source_template(doc, p.string()));
  }
  return out;
}

std::vector<ResolvedTemplate> resolve_templates(const std::vector<SourceFileTemplate>& templates,
                                                const ApiSpec& spec) {
  std::vector<ResolvedTemplate> out;
  std::map<std::string, std::string, std::less<>> claimed;
  std::set<std::string, std::less<>> names;
  for (const auto& t : templates) {
    if (!names.insert(t.name).second) {
      throw ValidationError(t.name, "two templates share the name '" + t.name + "'");
    }
    ResolvedTemplate r;
    r.tmpl = t;
    for (const auto& w : t.wrappers) {
      if (!spec.procedures.contains(w)) {
        r.absent.push_back(w);
        continue;
      }
      auto [it, inserted] = claimed.emplace(w, t.name);
      if (!inserted) {
        throw ValidationError(t.name, "procedure '" + w + "' is already listed by template '" +
                                          it->second + "'");
      }
      r.listed.push_back(w);
    }
    out.push_back(std::move(r));
  }
  for (auto& r : out) {
    if (r.tmpl.chapters.empty()) continue;
    for (const auto& [name, proc] : spec.procedures) {
      if (claimed.contains(name)) continue;
      if (std::find(r.tmpl.chapters.begin(), r.tmpl.chapters.end(), proc.chapter_group) ==
          r.tmpl.chapters.end()) {
        continue;
      }
      claimed.emplace(name, r.tmpl.name);
      r.selected.push_back(name);
    }
  }
  for (auto& r : out) {
    if (!r.tmpl.select_remaining) continue;
    for (const auto& [name, proc] : spec.procedures) {
      if (claimed.emplace(name, r.tmpl.name).second) r.selected.push_back(name);
    }
  }
  return out;
}

RenderedFile render_source_file(const SourceFileTemplate& tmpl, BindingFamily family,
                                const ApiSpec& spec, const TaskConfig& config,
                                const GeneratorOptions& options) {
  RenderedFile file;
  file.content = prelude_for(family, options);
  if (!tmpl.prelude.empty()) file.content += "\n" + tmpl.prelude;
  for (const auto& name : tmpl.wrappers) {
    auto it = spec.procedures.find(name);
    if (it == spec.procedures.end()) {
      throw NotFoundError(tmpl.name, "listed procedure '" + name + "' is not in the spec");
    }
    const auto& proc = it->second;
    const bool bound = family == BindingFamily::kC ? proc.has_c_binding && !proc.fortran_only
                                                   : proc.has_binding(family);
    if (!bound) {
      throw ValidationError(tmpl.name, name + " has no " + std::string(to_string(family)) +
                                           " binding but is listed in a " +
                                           std::string(family_label(family)) + " file");
    }
    if (auto reason = skip_reason(proc, family)) {
      file.skipped.push_back({name, std::string(family_label(family)), *reason});
      continue;
    }
    const HookFragments fragments = family == BindingFamily::kFortran
                                        ? HookFragments{}
                                        : compose(config.instances_for(name), family);
    for (const auto& variant : wrapper_variants(proc, family, options)) {
      file.content += "\n" + render_wrapper(proc, family, fragments, variant, options).text;
      ++file.units;
    }
    ++file.procedures;
  }
  return file;
}

GeneratedTree generate_tree(const ApiSpec& spec, const std::vector<SourceFileTemplate>& templates,
                            const TaskConfig& config, const GeneratorOptions& options) {
  if (options.families.empty()) throw ContractError("generate_tree", "no families selected");
  if (options.schemes.empty()) throw ContractError("generate_tree", "no mangling schemes selected");

  const auto resolved = resolve_templates(templates, spec);
  GeneratedTree tree;

  std::set<std::string> in_templates;
  for (const auto& r : resolved) {
    for (const auto& name : r.absent) {
      tree.diagnostics.warn(r.tmpl.name,
                            "listed procedure '" + name + "' is not in the spec; skipped");
    }
    in_templates.insert(r.listed.begin(), r.listed.end());
    in_templates.insert(r.selected.begin(), r.selected.end());
  }

  std::vector<FileJob> jobs;
  for (auto family : options.families) {
    for (const auto& r : resolved) {
      if (!r.tmpl.renders(family)) continue;
      jobs.push_back({std::string(family_directory(family)) + "/" + r.tmpl.name +
                          file_extension(family),
                      &r, family});
    }
  }

  // Each job renders into its own slot; results are merged in job order, so
  // the tree does not depend on the thread count.
  struct JobResult {
    RenderedFile file;
    std::vector<SkippedProcedure> unbound;
    std::string error;
  };
  auto run = [&](const FileJob& job) {
    JobResult result;
    try {
      SourceFileTemplate tmpl = job.resolved->tmpl;
      tmpl.wrappers = job.resolved->listed;
      for (const auto& name : job.resolved->selected) {
        const auto& proc = spec.procedures.at(name);
        if (auto reason = skip_reason(proc, job.family);
            reason && (job.family != BindingFamily::kFortran || !proc.has_fortran_binding)) {
          result.unbound.push_back({name, std::string(family_label(job.family)), *reason});
          continue;
        }
        tmpl.wrappers.push_back(name);
      }
      result.file = render_source_file(tmpl, job.family, spec, config, options);
    } catch (const Error& e) {
      result.error = job.path + ": " + e.what();
    }
    return result;
  };

  std::vector<JobResult> results(jobs.size());
  const std::size_t workers = std::max<std::size_t>(1, options.jobs);
  if (workers == 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) results[i] = run(jobs[i]);
  } else {
    std::vector<std::future<void>> pending;
    std::atomic<std::size_t> next{0};
    for (std::size_t w = 0; w < std::min(workers, jobs.size()); ++w) {
      pending.push_back(std::async(std::launch::async, [&]() {
        for (std::size_t i = next++; i < jobs.size(); i = next++) results[i] = run(jobs[i]);
      }));
    }
    for (auto& f : pending) f.get();
  }

  std::vector<std::string> errors;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    auto& r = results[i];
    if (!r.error.empty()) {
      errors.push_back(r.error);
      continue;
    }
    auto& summary = tree.families[jobs[i].family];
    summary.procedures += r.file.procedures;
    summary.units += r.file.units;
    summary.files.push_back(jobs[i].path);
    tree.files[jobs[i].path] = std::move(r.file.content);
    tree.skipped.insert(tree.skipped.end(), r.unbound.begin(), r.unbound.end());
    tree.skipped.insert(tree.skipped.end(), r.file.skipped.begin(), r.file.skipped.end());
  }
  if (!errors.empty()) {
    std::string message = std::to_string(errors.size()) + " file(s) failed:";
    for (const auto& e : errors) message += "\n  " + e;
    throw ValidationError("generate_tree", message);
  }

  for (const auto& [name, proc] : spec.procedures) {
    if (!in_templates.contains(name)) {
      tree.skipped.push_back({name, "all", "not selected by any template"});
    }
  }
  std::sort(tree.skipped.begin(), tree.skipped.end(), [](const auto& a, const auto& b) {
    return std::tie(a.procedure, a.family) < std::tie(b.procedure, b.family);
  });

  if (options.families.contains(BindingFamily::kFortran)) {
    tree.files["f/fortran_constants.c"] = detail::generated_banner("/*") + std::string(kFortranConstants);
    tree.families[BindingFamily::kFortran].files.push_back("f/fortran_constants.c");
  }
  if (options.families.contains(BindingFamily::kF08)) {
    const auto shims = render_tool_interface(default_event_signatures(options),
                                             status_strategy(false, LanguageTag::kF08));
    tree.files["f08/tool_interface.F90"] = shims.fortran;
    tree.files["f08/tool_interface.c"] = shims.c;
    tree.families[BindingFamily::kF08].files.push_back("f08/tool_interface.F90");
    tree.families[BindingFamily::kF08].files.push_back("f08/tool_interface.c");
  }

  tree.checks = generate_check_manifest(spec, options.schemes, options.large_count);
  tree.files["checks/manifest.json"] =
      render_check_snippets(tree.checks, SnippetStyle::kMachineManifest);
  tree.files["checks/probe.sh"] = render_check_snippets(tree.checks, SnippetStyle::kShellProbe);

  Json manifest = Json::object();
  manifest["generator_version"] = MPIWRAPGEN_VERSION;
  manifest["format_version"] = 1;
  manifest["source_versions"] = spec.source_versions;
  manifest["supplement_applied"] = spec.supplement_applied;
  Json families = Json::object();
  for (const auto& [family, summary] : tree.families) {
    Json entry = Json::object();
    entry["procedures"] = summary.procedures;
    entry["wrappers"] = summary.units;
    entry["files"] = summary.files;
    families[std::string(family_label(family))] = std::move(entry);
  }
  manifest["families"] = std::move(families);
  manifest["checks"] = tree.checks.size();
  Json skipped = Json::array();
  for (const auto& s : tree.skipped) {
    skipped.push_back({{"procedure", s.procedure}, {"family", s.family}, {"reason", s.reason}});
  }
  manifest["skipped"] = std::move(skipped);
  tree.files["manifest.json"] = manifest.dump(2) + "\n";
  tree.manifest = std::move(manifest);
  return tree;
}

}  // namespace mpiwrapgen
