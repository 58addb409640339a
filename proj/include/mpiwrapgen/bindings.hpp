#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mpiwrapgen/diagnostics.hpp"
#include "mpiwrapgen/spec_model.hpp"

namespace mpiwrapgen {

enum class CaseRule { kLower, kUpper, kPreserve };

/// Compiler name mangling: a case change plus 0-2 appended underscores.
struct ManglingScheme {
  CaseRule case_rule = CaseRule::kLower;
  int underscore_suffix_count = 1;

  friend bool operator==(const ManglingScheme&, const ManglingScheme&) = default;
};

/// The six generated schemes, in probe order. preserve/0 is deliberately not
/// part of the table.
inline constexpr std::array<ManglingScheme, 6> kSchemeTable = {{
    {CaseRule::kLower, 0},
    {CaseRule::kLower, 1},
    {CaseRule::kLower, 2},
    {CaseRule::kUpper, 0},
    {CaseRule::kUpper, 1},
    {CaseRule::kUpper, 2},
}};

inline constexpr ManglingScheme kPreserveScheme{CaseRule::kPreserve, 0};

/// "lower/1", "upper/2", "preserve/0".
std::string to_string(const ManglingScheme& scheme);
std::optional<ManglingScheme> parse_scheme(std::string_view text);

std::string mangle(std::string_view name, const ManglingScheme& scheme);

enum class DescriptorSuffix { kNone, kFts, kF08, kF08ts };

std::string_view suffix_text(DescriptorSuffix suffix);

/// Unmangled specific name: [P]MPI_Xxx[_c][descriptor suffix].
std::string specific_name(std::string_view procedure, DescriptorSuffix suffix,
                          bool large_count, bool pmpi);

struct SymbolVariant {
  std::string procedure;
  BindingFamily family = BindingFamily::kC;
  DescriptorSuffix descriptor_suffix = DescriptorSuffix::kNone;
  bool large_count = false;
  ManglingScheme scheme = kPreserveScheme;
  std::string symbol;
  bool pmpi = false;

  std::string specific() const {
    return specific_name(procedure, descriptor_suffix, large_count, pmpi);
  }

  friend bool operator==(const SymbolVariant&, const SymbolVariant&) = default;
};

SymbolVariant c_symbol_variant(const ProcedureSpec& proc, bool pmpi,
                               bool large_count = false);

/// Per scheme: the by-address variant, then "_fts" when the procedure has a
/// choice buffer. Legacy Fortran bindings have no large-count overloads.
std::vector<SymbolVariant> fortran_symbol_variants(
    const ProcedureSpec& proc, std::span<const ManglingScheme> schemes, bool pmpi);

/// Per scheme: "_f08", then "_f08ts" when the procedure has a choice buffer.
/// With `include_large_count` and an available overload, the "_c" variants
/// follow after all schemes.
std::vector<SymbolVariant> f08_symbol_variants(
    const ProcedureSpec& proc, std::span<const ManglingScheme> schemes, bool pmpi,
    bool include_large_count = false);

/// "const void* buf", "MPI_Comm* newcomm", ...
std::string c_parameter_declaration(const ParameterSpec& param, bool large_count,
                                    Diagnostics* diagnostics = nullptr);

std::string render_c_prototype(const ProcedureSpec& proc, bool large_count = false,
                               Diagnostics* diagnostics = nullptr);

/// Fortran 2008 dummy-argument declaration. `by_descriptor` selects
/// `dimension(..)` over `dimension(*)` for choice buffers.
std::string f08_parameter_declaration(const ParameterSpec& param, bool large_count,
                                      bool by_descriptor = true,
                                      Diagnostics* diagnostics = nullptr);

/// Parameters as they appear in Fortran bindings: C-only parameters dropped,
/// the error code moved last.
std::vector<ParameterSpec> fortran_parameter_order(const ProcedureSpec& proc);

std::string render_f08_interface(const ProcedureSpec& proc, bool large_count = false,
                                 Diagnostics* diagnostics = nullptr);

}  // namespace mpiwrapgen
