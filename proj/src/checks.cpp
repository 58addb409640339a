#include "mpiwrapgen/checks.hpp"

#include <algorithm>
#include <cctype>

#include "mpiwrapgen/codegen.hpp"

namespace mpiwrapgen {

namespace {

std::string upper(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

CheckDescriptor symbol_check(const ProcedureSpec& proc, std::span<const ManglingScheme> schemes,
                             bool large_count) {
  CheckDescriptor check;
  check.id = "f08_symbol_" + proc.name + (large_count ? "_c" : "");
  check.procedure = proc.name;
  check.kind = CheckKind::kSymbolPresence;
  for (const auto& v : f08_symbol_variants(proc, schemes, false, large_count)) {
    if (v.large_count != large_count) continue;
    if (std::find(check.candidates.begin(), check.candidates.end(), v.symbol) !=
        check.candidates.end()) {
      continue;
    }
    check.candidates.push_back(v.symbol);
    check.guards.push_back(guard_name(proc, BindingFamily::kF08, v));
  }
  return check;
}

Json manifest_document(std::span<const CheckDescriptor> manifest) {
  Json doc = Json::object();
  doc["generator_version"] = MPIWRAPGEN_VERSION;
  doc["format_version"] = 1;
  Json capabilities = Json::array();
  Json checks = Json::array();
  for (const auto& c : manifest) {
    if (c.kind == CheckKind::kCapability && c.capability_name) {
      capabilities.push_back(*c.capability_name);
    }
    Json entry = Json::object();
    entry["id"] = c.id;
    entry["procedure"] = c.procedure;
    entry["kind"] = to_string(c.kind);
    entry["candidates"] = c.candidates;
    if (c.capability_name) entry["capability"] = *c.capability_name;
    checks.push_back(std::move(entry));
  }
  doc["capabilities"] = std::move(capabilities);
  doc["checks"] = std::move(checks);
  return doc;
}

constexpr std::string_view kProbeHeader = R"(#!/bin/sh
# Configure checks for the generated wrappers. Writes a header defining the
# guard macros of the wrappers the installed MPI library supports.
#
#   MPICC=mpicc MPIFC=mpifort sh probe.sh [output-header]
set -u
: "${MPICC:=mpicc}"
: "${MPIFC:=mpifort}"
out=${1:-mpiwrapgen_config.h}
work=$(mktemp -d) || exit 2
trap 'rm -rf "$work"' EXIT INT TERM

probe_symbol() {
    printf 'extern void %s(void);\nint main(void)\n{\n    %s();\n    return 0;\n}\n' "$1" "$1" > "$work/symbol.c"
    $MPICC -o "$work/symbol" "$work/symbol.c" > /dev/null 2>&1
}

probe_module() {
    printf 'program probe\n    use mpi_f08, only: %s\nend program probe\n' "$1" > "$work/module.F90"
    (cd "$work" && $MPIFC -c module.F90 > /dev/null 2>&1)
}

probe_f08_true() {
    printf 'program probe\n    use mpi_f08\n    integer :: a(merge(1, -1, %s))\nend program probe\n' "$1" > "$work/flag.F90"
    (cd "$work" && $MPIFC -c flag.F90 > /dev/null 2>&1)
}

probe_c() {
    printf '#include <mpi.h>\nint main(void)\n{\n    %s\n    return 0;\n}\n' "$1" > "$work/c.c"
    $MPICC -o "$work/c" "$work/c.c" > /dev/null 2>&1
}

define() {
    echo "#define $1 1" >> "$out.tmp"
}

: > "$out.tmp"
)";

std::string capability_probe(std::string_view capability) {
  if (capability == "subarrays_supported") return "probe_f08_true MPI_SUBARRAYS_SUPPORTED";
  if (capability == "async_protects_nonblocking") {
    return "probe_f08_true MPI_ASYNC_PROTECTS_NONBLOCKING";
  }
  return "probe_c 'MPI_Status s; MPI_F08_status f; PMPI_Status_f082c(&f, &s);'";
}

std::string shell_probe(std::span<const CheckDescriptor> manifest) {
  std::string out(kProbeHeader);
  std::string open_module;
  auto close_module = [&]() {
    if (!open_module.empty()) out += "fi\n";
    open_module.clear();
  };
  for (const auto& c : manifest) {
    switch (c.kind) {
      case CheckKind::kModuleAccessibility:
        close_module();
        out += "\n# " + c.id + "\n";
        out += "if probe_module \"" + c.procedure + ", P" + c.procedure + "\"; then\n";
        out += "    define " + c.guards.front() + "\n";
        open_module = c.procedure;
        break;
      case CheckKind::kSymbolPresence: {
        const bool nested = open_module == c.procedure;
        if (!nested) close_module();
        const std::string indent = nested ? "    " : "";
        out += indent + "# " + c.id + "\n";
        for (std::size_t i = 0; i < c.candidates.size(); ++i) {
          out += indent + (i == 0 ? "if" : "elif") + " probe_symbol " + c.candidates[i] +
                 "; then\n";
          out += indent + "    define " + c.guards[i] + "\n";
        }
        if (!c.candidates.empty()) out += indent + "fi\n";
        break;
      }
      case CheckKind::kCapability:
        close_module();
        out += "\n# " + c.id + "\n";
        out += "if " + capability_probe(c.capability_name.value_or("")) + "; then\n";
        out += "    define " + c.guards.front() + "\n";
        out += "fi\n";
        break;
    }
  }
  close_module();
  out += "\nmv \"$out.tmp\" \"$out\"\n";
  return out;
}

}  // namespace

std::string_view to_string(CheckKind kind) {
  switch (kind) {
    case CheckKind::kModuleAccessibility: return "module_accessibility";
    case CheckKind::kSymbolPresence: return "symbol_presence";
    case CheckKind::kCapability: return "capability";
  }
  return "capability";
}

std::string capability_guard(std::string_view capability) {
  return "HAVE_" + upper(capability);
}

std::vector<CheckDescriptor> generate_check_manifest(const ApiSpec& spec,
                                                     std::span<const ManglingScheme> schemes,
                                                     bool include_large_count) {
  if (schemes.empty()) throw ContractError("generate_check_manifest", "no mangling schemes");
  std::vector<CheckDescriptor> out;
  for (const auto& proc : enumerate_procedures(spec, FamilyFilter::kF08)) {
    CheckDescriptor module;
    module.id = "f08_module_" + proc.name;
    module.procedure = proc.name;
    module.kind = CheckKind::kModuleAccessibility;
    module.guards.push_back("HAVE_F08_MODULE_" + upper(proc.name));
    out.push_back(std::move(module));
    out.push_back(symbol_check(proc, schemes, false));
    if (include_large_count && proc.has_large_count_variant) {
      out.push_back(symbol_check(proc, schemes, true));
    }
  }
  for (auto capability : kCapabilities) {
    CheckDescriptor check;
    check.id = "capability_" + std::string(capability);
    check.kind = CheckKind::kCapability;
    check.capability_name = std::string(capability);
    check.guards.push_back(capability_guard(capability));
    out.push_back(std::move(check));
  }
  return out;
}

SnippetStyle snippet_style_from_string(std::string_view text) {
  if (text == "machine_manifest") return SnippetStyle::kMachineManifest;
  if (text == "shell_probe") return SnippetStyle::kShellProbe;
  throw ValidationError("render_check_snippets", "unsupported style '" + std::string(text) + "'");
}

std::string render_check_snippets(std::span<const CheckDescriptor> manifest, SnippetStyle style) {
  switch (style) {
    case SnippetStyle::kMachineManifest: return manifest_document(manifest).dump(2) + "\n";
    case SnippetStyle::kShellProbe: return shell_probe(manifest);
  }
  throw ValidationError("render_check_snippets", "unsupported style");
}

}  // namespace mpiwrapgen
