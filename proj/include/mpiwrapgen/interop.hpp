#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mpiwrapgen/spec_model.hpp"

namespace mpiwrapgen {

// Mixed-language interoperability rules. Issues are numbered:
//   1 logical, 2 error return, 3 Fortran-only routines, 4 callbacks /
//   attributes / choice buffers, 5 array descriptors, 6 handles, 7 constants,
//   8 strings, 9 status objects, 10 array indices, 11 info strings.

enum class ConversionRule {
  kLogicalConvert,
  kOptionalIerrorPresentCheck,
  kHandleF2C,
  kHandleC2F,
  kSpecialConstantMap,
  kStringConvert,
  kStatusWrapWithLang,
  kIndexOffset,
  kInfoTrim,
  kPassThrough,
};

std::string_view to_string(ConversionRule rule);

enum class BoundaryDirection { kToC, kToFortran };

struct ConversionStep {
  ConversionRule rule = ConversionRule::kPassThrough;
  std::string parameter;
  BoundaryDirection boundary_direction = BoundaryDirection::kToC;

  friend bool operator==(const ConversionStep&, const ConversionStep&) = default;
};

struct SpecialConstant {
  std::string_view name;
  std::string_view fortran_representation;
  std::string_view c_representation;
  ParamKind applies_to;
};

/// Constants that must be compared on the Fortran side before a value crosses
/// into C, because the two bindings represent them differently.
std::span<const SpecialConstant> special_constant_map();
std::vector<SpecialConstant> special_constants_for(ParamKind kind);

enum class LanguageTag { kC, kF08, kFortran };

std::string_view to_string(LanguageTag tag);

enum class StatusMode { kNativeConversion, kWrappedWithLanguageTag };

struct StatusStrategy {
  StatusMode mode = StatusMode::kWrappedWithLanguageTag;
  LanguageTag language_tag = LanguageTag::kC;

  friend bool operator==(const StatusStrategy&, const StatusStrategy&) = default;
};

bool needs_same_language_pmpi(const ProcedureSpec& proc);

/// False for routines that exist only in the Fortran bindings; their wrappers
/// cannot delegate to a C PMPI function.
bool is_interceptable_in_c(const ProcedureSpec& proc);

std::vector<ConversionStep> marshal_plan(const ParameterSpec& param,
                                         BoundaryDirection boundary_direction);

StatusStrategy status_strategy(bool available_native_conversions,
                               LanguageTag origin_family);

inline constexpr int kIssueCount = 11;

struct IssueSupport {
  int issue = 0;
  std::string_view title;
  bool handled = false;

  friend bool operator==(const IssueSupport&, const IssueSupport&) = default;
};

/// Which of the eleven issues the wrapper layer of `family` handles. Only
/// kFortran (the legacy intercept layer) and kF08 are meaningful.
std::array<IssueSupport, kIssueCount> issue_support_matrix(BindingFamily family);

/// Issue a conversion rule addresses; nullopt for PASS_THROUGH.
std::optional<int> issue_for_rule(ConversionRule rule);

/// True when the wrapper layer of `family` emits steps of this rule.
bool family_handles_rule(BindingFamily family, ConversionRule rule);

// Reference semantics of the conversions the emitted code performs.

/// C indices start at 0, Fortran indices at 1.
long long apply_index_offset(long long index, BoundaryDirection boundary_direction);

/// Strips leading and trailing blanks, as the Fortran bindings do for info
/// keys and values.
std::string apply_info_trim(std::string_view text);

}  // namespace mpiwrapgen
