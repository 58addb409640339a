#include "mpiwrapgen/bindings.hpp"

#include <algorithm>
#include <cctype>

namespace mpiwrapgen {

namespace {

std::string case_rule_name(CaseRule rule) {
  switch (rule) {
    case CaseRule::kLower: return "lower";
    case CaseRule::kUpper: return "upper";
    case CaseRule::kPreserve: return "preserve";
  }
  return "lower";
}

void warn(Diagnostics* diagnostics, const ParameterSpec& param, std::string message) {
  if (diagnostics) diagnostics->warn("parameter '" + param.name + "'", std::move(message));
}

bool is_pointer_direction(Direction d) { return d != Direction::kIn; }

// Base C type of a parameter, before pointer/array decoration.
std::string c_base_type(const ParameterSpec& param, bool large_count,
                        Diagnostics* diagnostics) {
  if (large_count && param.c_type_large) return *param.c_type_large;
  if (param.c_type) return *param.c_type;
  if (is_handle(param.kind)) return "MPI_" + std::string(handle_stem(param.kind));
  switch (param.kind) {
    case ParamKind::kBuffer: return "void";
    case ParamKind::kCount: return large_count ? "MPI_Count" : "int";
    case ParamKind::kStatus: return "MPI_Status";
    case ParamKind::kString: return "char";
    case ParamKind::kCallback:
      warn(diagnostics, param, "callback without c_type rendered as void*");
      return "void*";
    case ParamKind::kOtherOpaque:
      warn(diagnostics, param, "OTHER_OPAQUE without c_type rendered as int");
      return "int";
    default: return "int";
  }
}

std::string f08_base_type(const ParameterSpec& param, bool large_count,
                          Diagnostics* diagnostics) {
  if (large_count && param.f08_type_large) return *param.f08_type_large;
  if (param.f08_type) return *param.f08_type;
  if (is_handle(param.kind)) return "type(MPI_" + std::string(handle_stem(param.kind)) + ")";
  switch (param.kind) {
    case ParamKind::kCount:
      return large_count ? "integer(kind=MPI_COUNT_KIND)" : "integer";
    case ParamKind::kStatus: return "type(MPI_Status)";
    case ParamKind::kLogicalFlag: return "logical";
    case ParamKind::kString: return "character(len=*)";
    case ParamKind::kCallback: return "external";
    case ParamKind::kOtherOpaque:
      warn(diagnostics, param, "OTHER_OPAQUE without f08_type rendered as integer");
      return "integer";
    default: return "integer";
  }
}

std::string_view intent(Direction d) {
  switch (d) {
    case Direction::kIn: return "intent(in)";
    case Direction::kOut: return "intent(out)";
    case Direction::kInOut: return "intent(inout)";
  }
  return "intent(in)";
}

}  // namespace

std::string to_string(const ManglingScheme& scheme) {
  return case_rule_name(scheme.case_rule) + "/" +
         std::to_string(scheme.underscore_suffix_count);
}

std::optional<ManglingScheme> parse_scheme(std::string_view text) {
  auto slash = text.find('/');
  if (slash == std::string_view::npos || slash + 2 != text.size()) return std::nullopt;
  std::string_view rule = text.substr(0, slash);
  char digit = text.back();
  if (digit < '0' || digit > '2') return std::nullopt;
  ManglingScheme scheme;
  scheme.underscore_suffix_count = digit - '0';
  if (rule == "lower") {
    scheme.case_rule = CaseRule::kLower;
  } else if (rule == "upper") {
    scheme.case_rule = CaseRule::kUpper;
  } else if (rule == "preserve") {
    scheme.case_rule = CaseRule::kPreserve;
  } else {
    return std::nullopt;
  }
  return scheme;
}

std::string mangle(std::string_view name, const ManglingScheme& scheme) {
  if (name.empty()) throw ContractError("mangle", "empty procedure name");
  std::string out(name);
  switch (scheme.case_rule) {
    case CaseRule::kLower:
      std::transform(out.begin(), out.end(), out.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
      break;
    case CaseRule::kUpper:
      std::transform(out.begin(), out.end(), out.begin(),
                     [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
      break;
    case CaseRule::kPreserve: break;
  }
  out.append(static_cast<std::size_t>(scheme.underscore_suffix_count), '_');
  return out;
}

std::string_view suffix_text(DescriptorSuffix suffix) {
  switch (suffix) {
    case DescriptorSuffix::kNone: return "";
    case DescriptorSuffix::kFts: return "_fts";
    case DescriptorSuffix::kF08: return "_f08";
    case DescriptorSuffix::kF08ts: return "_f08ts";
  }
  return "";
}

std::string specific_name(std::string_view procedure, DescriptorSuffix suffix,
                          bool large_count, bool pmpi) {
  std::string name;
  if (pmpi) name += 'P';
  name += procedure;
  if (large_count) name += "_c";
  name += suffix_text(suffix);
  return name;
}

SymbolVariant c_symbol_variant(const ProcedureSpec& proc, bool pmpi, bool large_count) {
  if (!proc.has_c_binding) {
    throw ContractError(proc.name, "procedure has no C binding");
  }
  if (large_count && !proc.has_large_count_variant) {
    throw ContractError(proc.name, "procedure has no large-count overload");
  }
  SymbolVariant v;
  v.procedure = proc.name;
  v.family = BindingFamily::kC;
  v.large_count = large_count;
  v.pmpi = pmpi;
  v.scheme = kPreserveScheme;
  v.symbol = mangle(v.specific(), v.scheme);
  return v;
}

std::vector<SymbolVariant> fortran_symbol_variants(
    const ProcedureSpec& proc, std::span<const ManglingScheme> schemes, bool pmpi) {
  if (!proc.has_fortran_binding) {
    throw ContractError(proc.name, "procedure has no Fortran binding");
  }
  std::vector<DescriptorSuffix> suffixes = {DescriptorSuffix::kNone};
  if (proc.has_buffer()) suffixes.push_back(DescriptorSuffix::kFts);

  std::vector<SymbolVariant> out;
  for (const auto& scheme : schemes) {
    for (auto suffix : suffixes) {
      SymbolVariant v;
      v.procedure = proc.name;
      v.family = BindingFamily::kFortran;
      v.descriptor_suffix = suffix;
      v.scheme = scheme;
      v.pmpi = pmpi;
      v.symbol = mangle(v.specific(), scheme);
      out.push_back(std::move(v));
    }
  }
  return out;
}

std::vector<SymbolVariant> f08_symbol_variants(const ProcedureSpec& proc,
                                               std::span<const ManglingScheme> schemes,
                                               bool pmpi, bool include_large_count) {
  if (!proc.has_f08_binding) {
    throw ContractError(proc.name, "procedure has no Fortran 2008 binding");
  }
  std::vector<DescriptorSuffix> suffixes = {DescriptorSuffix::kF08};
  if (proc.has_buffer()) suffixes.push_back(DescriptorSuffix::kF08ts);

  std::vector<bool> counts = {false};
  if (include_large_count && proc.has_large_count_variant) counts.push_back(true);

  std::vector<SymbolVariant> out;
  for (bool large : counts) {
    for (const auto& scheme : schemes) {
      for (auto suffix : suffixes) {
        SymbolVariant v;
        v.procedure = proc.name;
        v.family = BindingFamily::kF08;
        v.descriptor_suffix = suffix;
        v.large_count = large;
        v.scheme = scheme;
        v.pmpi = pmpi;
        v.symbol = mangle(v.specific(), scheme);
        out.push_back(std::move(v));
      }
    }
  }
  return out;
}

std::string c_parameter_declaration(const ParameterSpec& param, bool large_count,
                                    Diagnostics* diagnostics) {
  std::string base = c_base_type(param, large_count, diagnostics);
  if (base == "...") return "...";
  if (param.c_pointers) {
    return std::string(param.c_const ? "const " : "") + base + std::string(*param.c_pointers, '*') +
           " " + param.name + param.c_array;
  }
  const bool in = param.direction == Direction::kIn;

  if (param.kind == ParamKind::kBuffer) {
    return std::string(in ? "const void* " : "void* ") + param.name;
  }
  if (param.kind == ParamKind::kString) {
    if (param.is_array) return "char* " + param.name + "[]";
    return std::string(in ? "const char* " : "char* ") + param.name;
  }
  if (param.is_array) {
    return std::string(in ? "const " : "") + base + " " + param.name + "[]";
  }
  if (is_pointer_direction(param.direction) || param.kind == ParamKind::kStatus) {
    const bool const_status = param.kind == ParamKind::kStatus && in;
    return std::string(const_status ? "const " : "") + base + "* " + param.name;
  }
  return base + " " + param.name;
}

std::string render_c_prototype(const ProcedureSpec& proc, bool large_count,
                               Diagnostics* diagnostics) {
  if (proc.fortran_only || !proc.has_c_binding) {
    throw ContractError(proc.name, "procedure has no C binding");
  }
  std::string out = proc.c_return_type + " " +
                    specific_name(proc.name, DescriptorSuffix::kNone, large_count, false) +
                    "(";
  bool first = true;
  for (const auto& p : proc.parameters) {
    if (p.kind == ParamKind::kErrorCode) continue;
    if (!first) out += ", ";
    out += c_parameter_declaration(p, large_count, diagnostics);
    first = false;
  }
  if (first) out += "void";
  out += ")";
  return out;
}

std::string f08_parameter_declaration(const ParameterSpec& param, bool large_count,
                                      bool by_descriptor, Diagnostics* diagnostics) {
  if (param.kind == ParamKind::kBuffer) {
    return std::string("type(*), dimension(") + (by_descriptor ? ".." : "*") +
           ") :: " + param.name;
  }
  if (param.kind == ParamKind::kErrorCode) {
    return "integer, optional, intent(out) :: " + param.name;
  }
  std::string base = f08_base_type(param, large_count, diagnostics);
  if (param.kind == ParamKind::kCallback || base.starts_with("procedure(")) {
    return base + " :: " + param.name;
  }
  std::string decl = base + ", " + std::string(intent(param.direction)) + " :: " + param.name;
  if (param.is_array) decl += "(*)";
  return decl;
}

std::vector<ParameterSpec> fortran_parameter_order(const ProcedureSpec& proc) {
  std::vector<ParameterSpec> out;
  const ParameterSpec* error = nullptr;
  for (const auto& p : proc.parameters) {
    if (p.c_only) continue;
    if (p.kind == ParamKind::kErrorCode) {
      error = &p;
      continue;
    }
    out.push_back(p);
  }
  if (error) out.push_back(*error);
  return out;
}

std::string render_f08_interface(const ProcedureSpec& proc, bool large_count,
                                 Diagnostics* diagnostics) {
  if (!proc.has_f08_binding) {
    throw ContractError(proc.name, "procedure has no Fortran 2008 binding");
  }
  const auto params = fortran_parameter_order(proc);
  const std::string name =
      specific_name(proc.name, DescriptorSuffix::kNone, large_count, false);
  std::string args;
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i) args += ", ";
    args += params[i].name;
  }

  std::string out;
  const bool function = proc.fortran_result_type.has_value();
  if (function) {
    out += "function " + name + "(" + args + ") result(result_value)\n";
  } else {
    out += "subroutine " + name + "(" + args + ")\n";
  }
  for (const auto& p : params) {
    out += "    " + f08_parameter_declaration(p, large_count, true, diagnostics) + "\n";
  }
  if (function) out += "    " + *proc.fortran_result_type + " :: result_value\n";
  out += std::string(function ? "end function " : "end subroutine ") + name + "\n";
  return out;
}

}  // namespace mpiwrapgen
