#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mpiwrapgen/bindings.hpp"
#include "mpiwrapgen/spec_model.hpp"

namespace mpiwrapgen {

enum class CheckKind { kModuleAccessibility, kSymbolPresence, kCapability };

std::string_view to_string(CheckKind kind);

struct CheckDescriptor {
  std::string id;
  std::string procedure;
  CheckKind kind = CheckKind::kSymbolPresence;
  /// Symbol-presence only, in probe order.
  std::vector<std::string> candidates;
  /// Parallel to `candidates`: the guard defined when that candidate is the
  /// first one found. For the other kinds, the single guard of the check.
  std::vector<std::string> guards;
  std::optional<std::string> capability_name;

  friend bool operator==(const CheckDescriptor&, const CheckDescriptor&) = default;
};

/// Names of the global capability probes, in manifest order.
inline constexpr std::array<std::string_view, 3> kCapabilities = {
    "subarrays_supported", "async_protects_nonblocking", "native_status_conversion"};

/// Guard macro a capability probe defines, e.g. HAVE_NATIVE_STATUS_CONVERSION.
std::string capability_guard(std::string_view capability);

/// Per f08 procedure: f08_module_<name>, then f08_symbol_<name>. With
/// `include_large_count`, procedures with a large-count overload get an extra
/// f08_symbol_<name>_c check. Capability probes come last.
std::vector<CheckDescriptor> generate_check_manifest(const ApiSpec& spec,
                                                     std::span<const ManglingScheme> schemes,
                                                     bool include_large_count = true);

enum class SnippetStyle { kMachineManifest, kShellProbe };

/// "machine_manifest" / "shell_probe"; anything else raises ValidationError.
SnippetStyle snippet_style_from_string(std::string_view text);

std::string render_check_snippets(std::span<const CheckDescriptor> manifest, SnippetStyle style);

}  // namespace mpiwrapgen
