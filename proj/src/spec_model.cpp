#include "mpiwrapgen/spec_model.hpp"

#include <algorithm>
#include <charconv>
#include <unordered_set>

namespace mpiwrapgen {

namespace {

struct KindName {
  ParamKind kind;
  std::string_view name;
  std::string_view handle;
};

constexpr std::array<KindName, 20> kKindNames = {{
    {ParamKind::kBuffer, "BUFFER", ""},
    {ParamKind::kCount, "COUNT", ""},
    {ParamKind::kDatatype, "DATATYPE", "Datatype"},
    {ParamKind::kComm, "COMM", "Comm"},
    {ParamKind::kGroup, "GROUP", "Group"},
    {ParamKind::kWin, "WIN", "Win"},
    {ParamKind::kFile, "FILE", "File"},
    {ParamKind::kRequest, "REQUEST", "Request"},
    {ParamKind::kOp, "OP", "Op"},
    {ParamKind::kInfo, "INFO", "Info"},
    {ParamKind::kStatus, "STATUS", ""},
    {ParamKind::kRank, "RANK", ""},
    {ParamKind::kTag, "TAG", ""},
    {ParamKind::kIndex, "INDEX", ""},
    {ParamKind::kLogicalFlag, "LOGICAL_FLAG", ""},
    {ParamKind::kString, "STRING", ""},
    {ParamKind::kErrorCode, "ERROR_CODE", ""},
    {ParamKind::kCallback, "CALLBACK", ""},
    {ParamKind::kOtherInt, "OTHER_INT", ""},
    {ParamKind::kOtherOpaque, "OTHER_OPAQUE", ""},
}};

const KindName& kind_entry(ParamKind kind) {
  return kKindNames[static_cast<std::size_t>(kind)];
}

// Unknown upstream kinds whose name mentions one of these are numeric.
constexpr auto kIntegerishTokens = std::to_array<std::string_view>({
    "COUNT", "SIZE", "LENGTH", "NUM", "NNI", "INT", "LEVEL", "DEGREE",
    "WEIGHT"});

ParamKind degrade_unknown_kind(std::string_view text) {
  for (auto token : kIntegerishTokens) {
    if (text.find(token) != std::string_view::npos) return ParamKind::kOtherInt;
  }
  return ParamKind::kOtherOpaque;
}

std::vector<std::string_view> split_version(std::string_view v) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    auto dot = v.find('.', start);
    parts.push_back(v.substr(start, dot - start));
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return parts;
}

std::optional<long> as_number(std::string_view s) {
  long value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    return std::nullopt;
  }
  return value;
}

// Small helpers for schema access; every failure names the entry.
const Json& require(const Json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ParseError(where, std::string("missing required field '") + key + "'");
  }
  return *it;
}

std::string require_string(const Json& obj, const char* key,
                           const std::string& where) {
  const Json& v = require(obj, key, where);
  if (!v.is_string()) {
    throw ParseError(where, std::string("field '") + key + "' must be a string");
  }
  return v.get<std::string>();
}

std::optional<std::string> optional_string(const Json& obj, const char* key,
                                           const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    throw ParseError(where, std::string("field '") + key + "' must be a string");
  }
  return it->get<std::string>();
}

bool optional_bool(const Json& obj, const char* key, bool fallback,
                   const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  if (!it->is_boolean()) {
    throw ParseError(where, std::string("field '") + key + "' must be a boolean");
  }
  return it->get<bool>();
}

ParameterSpec parse_parameter(const Json& entry, const std::string& where,
                              Diagnostics& diagnostics) {
  if (!entry.is_object()) throw ParseError(where, "parameter must be an object");
  ParameterSpec p;
  p.name = require_string(entry, "name", where);
  if (p.name.empty()) throw ParseError(where, "parameter name is empty");
  const std::string here = where + " parameter '" + p.name + "'";

  const std::string kind_text = require_string(entry, "kind", here);
  if (auto kind = param_kind_from_string(kind_text)) {
    p.kind = *kind;
  } else {
    p.kind = degrade_unknown_kind(kind_text);
    diagnostics.warn(here, "unknown parameter kind '" + kind_text +
                               "' mapped to " + std::string(to_string(p.kind)));
  }

  if (auto dir = optional_string(entry, "direction", here)) {
    auto parsed = direction_from_string(*dir);
    if (!parsed) throw ParseError(here, "invalid direction '" + *dir + "'");
    p.direction = *parsed;
  }
  p.is_array = optional_bool(entry, "array", false, here);
  p.c_only = optional_bool(entry, "c_only", false, here);
  p.count_dependency = optional_string(entry, "count", here);
  p.c_type = optional_string(entry, "c_type", here);
  p.f08_type = optional_string(entry, "f08_type", here);
  p.c_type_large = optional_string(entry, "c_type_large", here);
  p.f08_type_large = optional_string(entry, "f08_type_large", here);
  if (auto it = entry.find("c_pointers"); it != entry.end()) {
    if (!it->is_number_integer() || it->get<int>() < 0 || it->get<int>() > 3) {
      throw ParseError(here, "c_pointers must be an integer in [0, 3]");
    }
    p.c_pointers = it->get<int>();
  }
  p.c_const = optional_bool(entry, "c_const", false, here);
  p.c_array = optional_string(entry, "c_array", here).value_or("");
  return p;
}

ProcedureSpec parse_procedure(const Json& entry, const std::string& where,
                              std::string_view version_label, DocumentRole role,
                              Diagnostics& diagnostics) {
  if (!entry.is_object()) throw ParseError(where, "procedure must be an object");
  ProcedureSpec proc;
  proc.name = require_string(entry, "name", where);
  const std::string here = where + " (" + proc.name + ")";
  if (proc.name.rfind("MPI_", 0) != 0 || proc.name.size() <= 4) {
    throw ParseError(here, "procedure name must have the canonical MPI_Xxx form");
  }
  proc.version = std::string(version_label);

  if (auto it = entry.find("parameters"); it != entry.end()) {
    if (!it->is_array()) throw ParseError(here, "'parameters' must be an array");
    std::unordered_set<std::string> seen;
    for (const auto& p : *it) {
      auto param = parse_parameter(p, here, diagnostics);
      if (!seen.insert(param.name).second) {
        throw ParseError(here, "duplicate parameter '" + param.name + "'");
      }
      proc.parameters.push_back(std::move(param));
    }
  }

  const auto error_codes = std::count_if(
      proc.parameters.begin(), proc.parameters.end(),
      [](const ParameterSpec& p) { return p.kind == ParamKind::kErrorCode; });
  if (error_codes > 1) {
    throw ParseError(here, "more than one ERROR_CODE parameter");
  }
  for (const auto& p : proc.parameters) {
    if (p.count_dependency && !proc.find_parameter(*p.count_dependency)) {
      throw ParseError(here, "parameter '" + p.name + "' depends on unknown count '" +
                                 *p.count_dependency + "'");
    }
  }

  if (auto it = entry.find("bindings"); it != entry.end()) {
    if (!it->is_object()) throw ParseError(here, "'bindings' must be an object");
    proc.has_c_binding = optional_bool(*it, "c", true, here);
    proc.has_fortran_binding = optional_bool(*it, "fortran", true, here);
    proc.has_f08_binding = optional_bool(*it, "f08", true, here);
  }

  bool callback = false;
  bool attribute_caching = false;
  if (auto it = entry.find("attributes"); it != entry.end()) {
    if (!it->is_object()) throw ParseError(here, "'attributes' must be an object");
    callback = optional_bool(*it, "callback", false, here);
    attribute_caching = optional_bool(*it, "attribute_caching", false, here);
    proc.fortran_only = optional_bool(*it, "fortran_only", false, here);
    proc.has_large_count_variant = optional_bool(*it, "large_count", false, here);
  }
  if (proc.fortran_only) {
    if (auto b = entry.find("bindings"); b != entry.end() && b->contains("c") &&
                                         optional_bool(*b, "c", false, here)) {
      throw ParseError(here, "fortran_only procedure cannot declare a C binding");
    }
    proc.has_c_binding = false;
  }

  if (callback || std::any_of(proc.parameters.begin(), proc.parameters.end(),
                              [](const ParameterSpec& p) {
                                return p.kind == ParamKind::kCallback;
                              })) {
    proc.needs_same_language_pmpi_reasons.insert(SameLanguageReason::kCallback);
  }
  if (attribute_caching) {
    proc.needs_same_language_pmpi_reasons.insert(
        SameLanguageReason::kAttributeCaching);
  }
  if (proc.has_buffer()) {
    proc.needs_same_language_pmpi_reasons.insert(
        SameLanguageReason::kChoiceBuffer);
  }

  if (auto chapter = optional_string(entry, "chapter", here)) {
    proc.chapter_group = *chapter;
  }
  if (auto ret = optional_string(entry, "c_return", here)) proc.c_return_type = *ret;
  proc.fortran_result_type = optional_string(entry, "fortran_result", here);

  proc.removal_version = optional_string(entry, "removed_in", here);
  if (role == DocumentRole::kSupplement) {
    if (!proc.removal_version) {
      throw ParseError(here, "supplement entry lacks 'removed_in'");
    }
    proc.removed = true;
  } else if (proc.removal_version) {
    proc.removed = true;
  }
  return proc;
}

}  // namespace

std::string_view to_string(ParamKind kind) { return kind_entry(kind).name; }

std::optional<ParamKind> param_kind_from_string(std::string_view text) {
  for (const auto& entry : kKindNames) {
    if (entry.name == text) return entry.kind;
  }
  return std::nullopt;
}

bool is_handle(ParamKind kind) { return !kind_entry(kind).handle.empty(); }

std::string_view handle_stem(ParamKind kind) { return kind_entry(kind).handle; }

std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::kIn: return "in";
    case Direction::kOut: return "out";
    case Direction::kInOut: return "inout";
  }
  return "in";
}

std::optional<Direction> direction_from_string(std::string_view text) {
  if (text == "in") return Direction::kIn;
  if (text == "out") return Direction::kOut;
  if (text == "inout") return Direction::kInOut;
  return std::nullopt;
}

std::string_view to_string(SameLanguageReason r) {
  switch (r) {
    case SameLanguageReason::kCallback: return "callback";
    case SameLanguageReason::kAttributeCaching: return "attribute_caching";
    case SameLanguageReason::kChoiceBuffer: return "choice_buffer";
  }
  return "callback";
}

std::string_view to_string(BindingFamily f) {
  switch (f) {
    case BindingFamily::kC: return "c";
    case BindingFamily::kFortran: return "fortran";
    case BindingFamily::kF08: return "f08";
  }
  return "c";
}

bool ProcedureSpec::has_buffer() const {
  return std::any_of(parameters.begin(), parameters.end(), [](const auto& p) {
    return p.kind == ParamKind::kBuffer;
  });
}

const ParameterSpec* ProcedureSpec::find_parameter(std::string_view param_name) const {
  for (const auto& p : parameters) {
    if (p.name == param_name) return &p;
  }
  return nullptr;
}

const ParameterSpec* ProcedureSpec::error_parameter() const {
  for (const auto& p : parameters) {
    if (p.kind == ParamKind::kErrorCode) return &p;
  }
  return nullptr;
}

bool ProcedureSpec::has_binding(BindingFamily family) const {
  switch (family) {
    case BindingFamily::kC: return has_c_binding;
    case BindingFamily::kFortran: return has_fortran_binding;
    case BindingFamily::kF08: return has_f08_binding;
  }
  return false;
}

ApiSpec parse_api_spec(const Json& document, std::string_view version_label,
                       Diagnostics& diagnostics, DocumentRole role,
                       std::string_view source) {
  const std::string where = source.empty() ? std::string("<document>")
                                           : std::string(source);
  if (!document.is_object()) throw ParseError(where, "document must be an object");
  if (auto it = document.find("format_version"); it != document.end()) {
    if (!it->is_number_integer() || it->get<int>() != 1) {
      throw ParseError(where, "unsupported format_version");
    }
  }
  ApiSpec spec;
  spec.source_versions.emplace_back(version_label);
  spec.supplement_applied = role == DocumentRole::kSupplement;

  auto it = document.find("procedures");
  if (it == document.end()) throw ParseError(where, "missing 'procedures' array");
  if (!it->is_array()) throw ParseError(where, "'procedures' must be an array");

  std::size_t index = 0;
  for (const auto& entry : *it) {
    const std::string entry_where =
        where + " procedures[" + std::to_string(index++) + "]";
    auto proc = parse_procedure(entry, entry_where, version_label, role, diagnostics);
    if (spec.procedures.contains(proc.name)) {
      throw ParseError(entry_where, "duplicate procedure '" + proc.name + "'");
    }
    std::string name = proc.name;
    spec.procedures.emplace(std::move(name), std::move(proc));
  }
  return spec;
}

ApiSpec parse_api_spec_text(std::string_view text, std::string_view version_label,
                            Diagnostics& diagnostics, DocumentRole role,
                            std::string_view source) {
  Json document;
  try {
    document = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(source.empty() ? "<document>" : std::string(source),
                     std::string("invalid JSON: ") + e.what());
  }
  return parse_api_spec(document, version_label, diagnostics, role, source);
}

ApiSpec merge_api_specs(std::span<const ApiSpec> specs) {
  ApiSpec merged;
  for (const auto& spec : specs) {
    for (const auto& label : spec.source_versions) {
      if (std::find(merged.source_versions.begin(), merged.source_versions.end(),
                    label) == merged.source_versions.end()) {
        merged.source_versions.push_back(label);
      }
    }
    for (const auto& [name, proc] : spec.procedures) {
      merged.procedures.insert_or_assign(name, proc);
    }
    merged.supplement_applied = merged.supplement_applied || spec.supplement_applied;
  }
  return merged;
}

ApiSpec merge_api_specs(std::span<const ApiSpec> specs,
                        const ApiSpec& removed_supplement) {
  ApiSpec merged = merge_api_specs(specs);
  const ApiSpec* newest = specs.empty() ? nullptr : &specs.back();
  for (const auto& [name, proc] : removed_supplement.procedures) {
    if (newest && newest->procedures.contains(name)) {
      throw ValidationError(name,
                            "supplement redefines a procedure still present in "
                            "the newest spec (" + newest->source_versions.back() + ")");
    }
    ProcedureSpec removed = proc;
    removed.removed = true;
    merged.procedures.insert_or_assign(name, std::move(removed));
  }
  merged.supplement_applied = true;
  return merged;
}

std::vector<ProcedureSpec> enumerate_procedures(const ApiSpec& spec,
                                                FamilyFilter filter) {
  std::vector<ProcedureSpec> out;
  out.reserve(spec.procedures.size());
  // std::map iteration is already lexicographic by name.
  for (const auto& [name, proc] : spec.procedures) {
    bool keep = true;
    switch (filter) {
      case FamilyFilter::kAll: break;
      case FamilyFilter::kC: keep = proc.has_c_binding; break;
      case FamilyFilter::kFortran: keep = proc.has_fortran_binding; break;
      case FamilyFilter::kF08: keep = proc.has_f08_binding; break;
    }
    if (keep) out.push_back(proc);
  }
  return out;
}

const ProcedureSpec& query_procedure(const ApiSpec& spec, std::string_view name) {
  auto it = spec.procedures.find(name);
  if (it == spec.procedures.end()) {
    throw NotFoundError(std::string(name), "no such procedure in the spec");
  }
  return it->second;
}

std::strong_ordering compare_versions(std::string_view a, std::string_view b) {
  const auto pa = split_version(a);
  const auto pb = split_version(b);
  const std::size_t n = std::max(pa.size(), pb.size());
  for (std::size_t i = 0; i < n; ++i) {
    std::string_view x = i < pa.size() ? pa[i] : "0";
    std::string_view y = i < pb.size() ? pb[i] : "0";
    auto nx = as_number(x);
    auto ny = as_number(y);
    std::strong_ordering c = (nx && ny) ? (*nx <=> *ny) : (x <=> y);
    if (c != std::strong_ordering::equal) return c;
  }
  return std::strong_ordering::equal;
}

}  // namespace mpiwrapgen
