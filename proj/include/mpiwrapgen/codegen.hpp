#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mpiwrapgen/bindings.hpp"
#include "mpiwrapgen/checks.hpp"
#include "mpiwrapgen/diagnostics.hpp"
#include "mpiwrapgen/interop.hpp"
#include "mpiwrapgen/spec_model.hpp"
#include "mpiwrapgen/tasks.hpp"

namespace mpiwrapgen {

// In codegen, BindingFamily::kFortran denotes the legacy intercept layer: C
// functions that catch the Fortran symbol and forward to the C wrapper.

/// "c", "fortran_intercept", "f08".
std::string_view family_label(BindingFamily family);
std::optional<BindingFamily> family_from_label(std::string_view text);

/// Output subdirectory: "c", "f", "f08".
std::string_view family_directory(BindingFamily family);

struct GeneratorOptions {
  std::set<BindingFamily> families = {BindingFamily::kC, BindingFamily::kFortran,
                                      BindingFamily::kF08};
  std::vector<ManglingScheme> schemes = {kSchemeTable.begin(), kSchemeTable.end()};
  /// Emit large-count (_c) wrappers and checks where the spec has them.
  bool large_count = true;
  // Event API of the measurement tool.
  std::string event_gen_active = "event_gen_active";
  std::string write_event = "write_event";
  /// Worker threads for file rendering; output does not depend on it.
  unsigned jobs = 1;
};

/// HAVE_<C|F|F08|F08_TS_BUFFERS|F_TS_BUFFERS>_<NAME>[_C].
std::string guard_name(const ProcedureSpec& proc, BindingFamily family,
                       const SymbolVariant& variant);

struct WrapperUnit {
  std::string procedure;
  BindingFamily family = BindingFamily::kC;
  SymbolVariant variant;
  std::string guard;
  std::string text;
  std::vector<std::string> required_checks;
};

/// Why `family` cannot wrap `proc`, or nullopt when it can.
std::optional<std::string> skip_reason(const ProcedureSpec& proc, BindingFamily family);

/// Variants that get a wrapper: C base (+ _c); the by-address legacy symbol;
/// f08 _f08 and _f08ts (+ their _c forms).
std::vector<SymbolVariant> wrapper_variants(const ProcedureSpec& proc, BindingFamily family,
                                            const GeneratorOptions& options = {});

/// Renders one wrapper. `fragments` come from compose() for the same family;
/// the legacy intercept takes none because it forwards to the C wrapper.
WrapperUnit render_wrapper(const ProcedureSpec& proc, BindingFamily family,
                           const HookFragments& fragments, const SymbolVariant& variant,
                           const GeneratorOptions& options = {});

// Per-family renderers behind render_wrapper.
std::string render_c_wrapper(const ProcedureSpec& proc, const HookFragments& fragments,
                             const SymbolVariant& variant, const std::string& guard,
                             const GeneratorOptions& options);
std::string render_f08_wrapper(const ProcedureSpec& proc, const HookFragments& fragments,
                               const SymbolVariant& variant, const std::string& guard,
                               const GeneratorOptions& options);
std::string render_fortran_intercept(const ProcedureSpec& proc, const SymbolVariant& variant,
                                     const std::string& guard);

/// File preludes per family; `schemes` selects the FSUB mangling branches of
/// the intercept prelude.
std::string c_file_prelude(const GeneratorOptions& options);
std::string intercept_file_prelude(const GeneratorOptions& options);
std::string f08_file_prelude();

struct SourceFileTemplate {
  std::string name;
  /// Explicitly listed wrappers, in order.
  std::vector<std::string> wrappers;
  /// Procedures of these chapter groups not claimed elsewhere.
  std::vector<std::string> chapters;
  /// All procedures not claimed by another template.
  bool select_remaining = false;
  std::string prelude;
  /// Empty means every family.
  std::set<BindingFamily> families;

  bool renders(BindingFamily family) const {
    return families.empty() || families.contains(family);
  }
};

SourceFileTemplate parse_source_template(const Json& document, std::string_view source = {});

/// Every *.json file of `dir`, in file-name order.
std::vector<SourceFileTemplate> load_templates(const std::filesystem::path& dir);

struct ResolvedTemplate {
  SourceFileTemplate tmpl;
  std::vector<std::string> listed;
  /// Chapter- or remaining-selected, sorted by name.
  std::vector<std::string> selected;
  /// Listed names the spec does not define (older or newer standard).
  std::vector<std::string> absent;
};

/// Assigns each procedure to at most one file: explicit listings first, then
/// chapter selectors in template order, then "remaining". A procedure listed
/// explicitly by two templates is an error; a listed name absent from the
/// spec is recorded in `absent`.
std::vector<ResolvedTemplate> resolve_templates(const std::vector<SourceFileTemplate>& templates,
                                                const ApiSpec& spec);

struct SkippedProcedure {
  std::string procedure;
  std::string family;
  std::string reason;

  friend bool operator==(const SkippedProcedure&, const SkippedProcedure&) = default;
};

struct RenderedFile {
  std::string content;
  std::size_t procedures = 0;
  std::size_t units = 0;
  std::vector<SkippedProcedure> skipped;
};

/// Prelude followed by the wrappers of `tmpl.wrappers` in order. A listed
/// procedure without a binding for `family` is an error; one the family
/// cannot wrap for other reasons is skipped and reported.
RenderedFile render_source_file(const SourceFileTemplate& tmpl, BindingFamily family,
                                const ApiSpec& spec, const TaskConfig& config,
                                const GeneratorOptions& options = {});

// Tool-interface shims for calling tool functions from f08 wrappers.

struct ShimArgument {
  std::string name;
  ParamKind kind = ParamKind::kOtherInt;
  Direction direction = Direction::kIn;
};

struct EventSignature {
  std::string name;
  std::vector<ShimArgument> arguments;
  bool returns_logical = false;
};

struct ToolShim {
  std::string name;
  bool fortran_layer = false;
  bool c_layer = false;
  /// Interface block text for the f08 module's specification part.
  std::string fortran_interface;
  /// Module procedure (Fortran layer); empty without one.
  std::string fortran_procedure;
  /// C-layer function; empty without one.
  std::string c_entry;
  /// Tool function prototype the C side calls.
  std::string c_tool_prototype;
  /// Status carrier and query helper (C) plus the f08 field accessor, when a
  /// status argument is passed with a language tag.
  std::string c_status_support;
  std::string fortran_status_support;

  int conversion_layers() const { return int(fortran_layer) + int(c_layer); }
  bool direct() const { return conversion_layers() == 0; }
};

ToolShim render_tool_shim(const EventSignature& signature, const StatusStrategy& strategy);

/// Event signatures of the shipped tool interface.
std::vector<EventSignature> default_event_signatures(const GeneratorOptions& options);

struct ToolInterfaceFiles {
  std::string fortran;
  std::string c;
};

ToolInterfaceFiles render_tool_interface(const std::vector<EventSignature>& signatures,
                                         const StatusStrategy& strategy);

struct FamilySummary {
  std::size_t procedures = 0;
  std::size_t units = 0;
  std::vector<std::string> files;
};

struct GeneratedTree {
  /// Output-relative path to content.
  std::map<std::string, std::string> files;
  std::map<BindingFamily, FamilySummary> families;
  std::vector<SkippedProcedure> skipped;
  std::vector<CheckDescriptor> checks;
  Json manifest;
  Diagnostics diagnostics;
};

/// All per-family files, tool interface, checks and the tree manifest.
/// Errors of individual files are collected and raised together as one
/// ValidationError.
GeneratedTree generate_tree(const ApiSpec& spec, const std::vector<SourceFileTemplate>& templates,
                            const TaskConfig& config, const GeneratorOptions& options = {});

}  // namespace mpiwrapgen
