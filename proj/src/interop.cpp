#include "mpiwrapgen/interop.hpp"

#include <algorithm>

namespace mpiwrapgen {

namespace {

constexpr auto kSpecialConstants = std::to_array<SpecialConstant>({
    {"MPI_BOTTOM", "address of the Fortran MPI_BOTTOM common block",
     "MPI_BOTTOM", ParamKind::kBuffer},
    {"MPI_IN_PLACE", "address of the Fortran MPI_IN_PLACE common block",
     "MPI_IN_PLACE", ParamKind::kBuffer},
    {"MPI_STATUS_IGNORE", "address of the Fortran MPI_STATUS_IGNORE array",
     "MPI_STATUS_IGNORE", ParamKind::kStatus},
    {"MPI_STATUSES_IGNORE", "address of the Fortran MPI_STATUSES_IGNORE array",
     "MPI_STATUSES_IGNORE", ParamKind::kStatus},
    {"MPI_ERRCODES_IGNORE", "address of the Fortran MPI_ERRCODES_IGNORE array",
     "MPI_ERRCODES_IGNORE", ParamKind::kOtherInt},
    {"MPI_UNWEIGHTED", "address of the Fortran MPI_UNWEIGHTED array",
     "MPI_UNWEIGHTED", ParamKind::kOtherInt},
});

struct IssueRow {
  int issue;
  std::string_view title;
  bool legacy_handled;
};

constexpr auto kIssueRows = std::to_array<IssueRow>({
    {1, "Logical", false},
    {2, "Error return", true},
    {3, "Fortran only routines", false},
    {4, "Callbacks, Attributes, Choice buffers", false},
    {5, "Array descriptors", false},
    {6, "MPI handles", true},
    {7, "MPI constants", true},
    {8, "Character strings", true},
    {9, "Status object", true},
    {10, "Array indices", true},
    {11, "Info strings", false},
});

ConversionStep step(ConversionRule rule, const ParameterSpec& param,
                    BoundaryDirection dir) {
  return ConversionStep{rule, param.name, dir};
}

}  // namespace

std::string_view to_string(ConversionRule rule) {
  switch (rule) {
    case ConversionRule::kLogicalConvert: return "LOGICAL_CONVERT";
    case ConversionRule::kOptionalIerrorPresentCheck: return "OPTIONAL_IERROR_PRESENT_CHECK";
    case ConversionRule::kHandleF2C: return "HANDLE_F2C";
    case ConversionRule::kHandleC2F: return "HANDLE_C2F";
    case ConversionRule::kSpecialConstantMap: return "SPECIAL_CONSTANT_MAP";
    case ConversionRule::kStringConvert: return "STRING_CONVERT";
    case ConversionRule::kStatusWrapWithLang: return "STATUS_WRAP_WITH_LANG";
    case ConversionRule::kIndexOffset: return "INDEX_OFFSET";
    case ConversionRule::kInfoTrim: return "INFO_TRIM";
    case ConversionRule::kPassThrough: return "PASS_THROUGH";
  }
  return "PASS_THROUGH";
}

std::span<const SpecialConstant> special_constant_map() { return kSpecialConstants; }

std::vector<SpecialConstant> special_constants_for(ParamKind kind) {
  std::vector<SpecialConstant> out;
  std::copy_if(kSpecialConstants.begin(), kSpecialConstants.end(), std::back_inserter(out),
               [kind](const SpecialConstant& c) { return c.applies_to == kind; });
  return out;
}

std::string_view to_string(LanguageTag tag) {
  switch (tag) {
    case LanguageTag::kC: return "c";
    case LanguageTag::kF08: return "f08";
    case LanguageTag::kFortran: return "fortran";
  }
  return "c";
}

bool needs_same_language_pmpi(const ProcedureSpec& proc) {
  return !proc.needs_same_language_pmpi_reasons.empty();
}

bool is_interceptable_in_c(const ProcedureSpec& proc) { return !proc.fortran_only; }

std::vector<ConversionStep> marshal_plan(const ParameterSpec& param,
                                         BoundaryDirection dir) {
  const bool to_c = dir == BoundaryDirection::kToC;
  switch (param.kind) {
    case ParamKind::kLogicalFlag:
      return {step(ConversionRule::kLogicalConvert, param, dir)};
    case ParamKind::kString:
      return {step(ConversionRule::kStringConvert, param, dir)};
    case ParamKind::kStatus:
      return {step(ConversionRule::kStatusWrapWithLang, param, dir)};
    case ParamKind::kIndex:
      return {step(ConversionRule::kIndexOffset, param, dir)};
    case ParamKind::kInfo:
      if (to_c) {
        return {step(ConversionRule::kInfoTrim, param, dir),
                step(ConversionRule::kHandleF2C, param, dir)};
      }
      return {step(ConversionRule::kHandleC2F, param, dir)};
    case ParamKind::kBuffer:
      return {step(ConversionRule::kSpecialConstantMap, param, dir),
              step(ConversionRule::kPassThrough, param, dir)};
    case ParamKind::kErrorCode:
      return {step(ConversionRule::kOptionalIerrorPresentCheck, param, dir)};
    default: break;
  }
  if (is_handle(param.kind)) {
    return {step(to_c ? ConversionRule::kHandleF2C : ConversionRule::kHandleC2F, param,
                 dir)};
  }
  return {step(ConversionRule::kPassThrough, param, dir)};
}

StatusStrategy status_strategy(bool available_native_conversions,
                               LanguageTag origin_family) {
  // Every binding family has standard-defined status conversions; whether the
  // installed library provides them is the caller's input.
  if (available_native_conversions) {
    return {StatusMode::kNativeConversion, origin_family};
  }
  return {StatusMode::kWrappedWithLanguageTag, origin_family};
}

std::array<IssueSupport, kIssueCount> issue_support_matrix(BindingFamily family) {
  if (family == BindingFamily::kC) {
    throw ContractError("issue_support_matrix",
                        "the C family does not cross a language boundary");
  }
  std::array<IssueSupport, kIssueCount> out{};
  for (std::size_t i = 0; i < kIssueRows.size(); ++i) {
    const auto& row = kIssueRows[i];
    out[i] = {row.issue, row.title,
              family == BindingFamily::kF08 ? true : row.legacy_handled};
  }
  return out;
}

std::optional<int> issue_for_rule(ConversionRule rule) {
  switch (rule) {
    case ConversionRule::kLogicalConvert: return 1;
    case ConversionRule::kOptionalIerrorPresentCheck: return 2;
    case ConversionRule::kHandleF2C:
    case ConversionRule::kHandleC2F: return 6;
    case ConversionRule::kSpecialConstantMap: return 7;
    case ConversionRule::kStringConvert: return 8;
    case ConversionRule::kStatusWrapWithLang: return 9;
    case ConversionRule::kIndexOffset: return 10;
    case ConversionRule::kInfoTrim: return 11;
    case ConversionRule::kPassThrough: return std::nullopt;
  }
  return std::nullopt;
}

bool family_handles_rule(BindingFamily family, ConversionRule rule) {
  const auto issue = issue_for_rule(rule);
  if (!issue) return true;
  const auto matrix = issue_support_matrix(family);
  return matrix[static_cast<std::size_t>(*issue - 1)].handled;
}

long long apply_index_offset(long long index, BoundaryDirection dir) {
  return dir == BoundaryDirection::kToFortran ? index + 1 : index - 1;
}

std::string apply_info_trim(std::string_view text) {
  const auto first = text.find_first_not_of(' ');
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(' ');
  return std::string(text.substr(first, last - first + 1));
}

}  // namespace mpiwrapgen
