#pragma once

#include <array>
#include <compare>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mpiwrapgen/diagnostics.hpp"

namespace mpiwrapgen {

using Json = nlohmann::ordered_json;

// Closed parameter-kind taxonomy. Upstream kinds outside it degrade to
// kOtherInt / kOtherOpaque with a warning.
enum class ParamKind {
  kBuffer,
  kCount,
  kDatatype,
  kComm,
  kGroup,
  kWin,
  kFile,
  kRequest,
  kOp,
  kInfo,
  kStatus,
  kRank,
  kTag,
  kIndex,
  kLogicalFlag,
  kString,
  kErrorCode,
  kCallback,
  kOtherInt,
  kOtherOpaque,
};

inline constexpr std::array kAllParamKinds = {
    ParamKind::kBuffer,    ParamKind::kCount,       ParamKind::kDatatype,
    ParamKind::kComm,      ParamKind::kGroup,       ParamKind::kWin,
    ParamKind::kFile,      ParamKind::kRequest,     ParamKind::kOp,
    ParamKind::kInfo,      ParamKind::kStatus,      ParamKind::kRank,
    ParamKind::kTag,       ParamKind::kIndex,       ParamKind::kLogicalFlag,
    ParamKind::kString,    ParamKind::kErrorCode,   ParamKind::kCallback,
    ParamKind::kOtherInt,  ParamKind::kOtherOpaque,
};

std::string_view to_string(ParamKind kind);
std::optional<ParamKind> param_kind_from_string(std::string_view text);

/// True for the opaque MPI object kinds (communicator, datatype, ...).
bool is_handle(ParamKind kind);

/// Handle type stem shared by all bindings, e.g. "Comm" for kComm. Empty for
/// non-handle kinds.
std::string_view handle_stem(ParamKind kind);

enum class Direction { kIn, kOut, kInOut };

std::string_view to_string(Direction d);
std::optional<Direction> direction_from_string(std::string_view text);

enum class SameLanguageReason { kCallback, kAttributeCaching, kChoiceBuffer };

std::string_view to_string(SameLanguageReason r);

enum class BindingFamily { kC, kFortran, kF08 };

std::string_view to_string(BindingFamily f);

struct ParameterSpec {
  std::string name;
  ParamKind kind = ParamKind::kOtherInt;
  Direction direction = Direction::kIn;
  bool is_array = false;
  /// Present only in the C binding (argc/argv of MPI_Init).
  bool c_only = false;
  std::optional<std::string> count_dependency;
  // Optional binding-specific type overrides, used where the kind alone does
  // not determine the declaration (callback prototypes, upstream OTHER_*).
  std::optional<std::string> c_type;
  std::optional<std::string> f08_type;
  // Types in the large-count variant, when they differ.
  std::optional<std::string> c_type_large;
  std::optional<std::string> f08_type_large;
  // Exact C declarator shape. When c_pointers is set the C declaration is
  // [const] c_type + c_pointers * '*' + name + c_array, with no kind-based
  // adjustment.
  std::optional<int> c_pointers;
  bool c_const = false;
  std::string c_array;

  friend bool operator==(const ParameterSpec&, const ParameterSpec&) = default;
};

struct ProcedureSpec {
  std::string name;
  std::vector<ParameterSpec> parameters;
  bool has_c_binding = true;
  bool has_fortran_binding = true;
  bool has_f08_binding = true;
  bool fortran_only = false;
  bool removed = false;
  std::optional<std::string> removal_version;
  bool has_large_count_variant = false;
  std::set<SameLanguageReason> needs_same_language_pmpi_reasons;
  std::string chapter_group = "misc";
  /// Standard version the definition was last taken from.
  std::string version;
  /// C return type; "int" means the MPI error code.
  std::string c_return_type = "int";
  /// Set for procedures that are Fortran functions (MPI_Wtime, MPI_Aint_add).
  std::optional<std::string> fortran_result_type;

  bool has_buffer() const;
  bool returns_error_code() const { return !fortran_result_type.has_value(); }
  const ParameterSpec* find_parameter(std::string_view param_name) const;
  const ParameterSpec* error_parameter() const;
  bool has_binding(BindingFamily family) const;

  friend bool operator==(const ProcedureSpec&, const ProcedureSpec&) = default;
};

struct ApiSpec {
  std::map<std::string, ProcedureSpec, std::less<>> procedures;
  std::vector<std::string> source_versions;
  bool supplement_applied = false;

  friend bool operator==(const ApiSpec&, const ApiSpec&) = default;
};

enum class DocumentRole { kStandard, kSupplement };

/// Parses one spec document in the generator's input schema (see README).
/// `source` is only used to label diagnostics.
ApiSpec parse_api_spec(const Json& document, std::string_view version_label,
                       Diagnostics& diagnostics,
                       DocumentRole role = DocumentRole::kStandard,
                       std::string_view source = {});

ApiSpec parse_api_spec_text(std::string_view text,
                            std::string_view version_label,
                            Diagnostics& diagnostics,
                            DocumentRole role = DocumentRole::kStandard,
                            std::string_view source = {});

/// Newest definition wins; `specs` are ordered oldest to newest.
ApiSpec merge_api_specs(std::span<const ApiSpec> specs);
ApiSpec merge_api_specs(std::span<const ApiSpec> specs,
                        const ApiSpec& removed_supplement);

enum class FamilyFilter { kAll, kC, kFortran, kF08 };

std::vector<ProcedureSpec> enumerate_procedures(const ApiSpec& spec,
                                                FamilyFilter filter);

const ProcedureSpec& query_procedure(const ApiSpec& spec,
                                     std::string_view name);

/// Dotted numeric comparison of standard-version labels ("2.2" < "4.0" <
/// "4.1" < "10.0"); non-numeric components compare lexicographically.
std::strong_ordering compare_versions(std::string_view a, std::string_view b);

}  // namespace mpiwrapgen
