#include <algorithm>
#include <regex>

#include "codegen_internal.hpp"
#include "mpiwrapgen/codegen.hpp"

namespace mpiwrapgen {

using detail::append_hook;
using detail::collect_mpi_names;
using detail::fortran_line;
using detail::kIndent;

namespace {

bool pointer_valued(const ParameterSpec& p) {
  if (!p.c_type) return false;
  if (p.c_type->find('*') != std::string::npos || p.c_type->starts_with("void")) return true;
  // An extra indirection beyond the one of an output argument.
  const bool other = p.kind == ParamKind::kOtherInt || p.kind == ParamKind::kOtherOpaque;
  const int out_level = p.direction == Direction::kIn || p.is_array ? 0 : 1;
  return other && p.c_pointers && *p.c_pointers > out_level;
}

// Handle stem of a parameter, including opaque objects outside the closed
// kind set (MPI_Errhandler, MPI_Message, MPI_Session). Empty for non-handles.
std::string handle_name(const ParameterSpec& p) {
  if (is_handle(p.kind)) return std::string(handle_stem(p.kind));
  if (p.kind == ParamKind::kOtherOpaque && p.c_type && !pointer_valued(p) &&
      (*p.c_type == "MPI_Errhandler" || *p.c_type == "MPI_Message" || *p.c_type == "MPI_Session")) {
    return p.c_type->substr(4);
  }
  return {};
}

std::string handle_conversion(const ParameterSpec& p, bool to_c) {
  std::string stem = handle_name(p);
  if (stem == "Datatype") stem = "Type";
  return "PMPI_" + stem + (to_c ? "_f2c" : "_c2f");
}

bool is_int_like(ParamKind kind) {
  switch (kind) {
    case ParamKind::kCount:
    case ParamKind::kRank:
    case ParamKind::kTag:
    case ParamKind::kIndex:
    case ParamKind::kLogicalFlag:
    case ParamKind::kOtherInt:
      return true;
    default:
      return false;
  }
}

// Scalars the Fortran binding passes with their C type (MPI_Aint,
// MPI_Offset, MPI_Count).
bool has_typed_c_value(const ParameterSpec& p) {
  if (!p.c_type || pointer_valued(p)) return false;
  if (p.kind == ParamKind::kOtherInt) return true;
  // Integers such as MPI_Count extents that the kind alone would make int.
  const bool integer = p.kind == ParamKind::kCount || p.kind == ParamKind::kRank ||
                       p.kind == ParamKind::kTag;
  return integer && *p.c_type != "int";
}

const ParameterSpec* scalar_dependency(const ProcedureSpec& proc, const ParameterSpec& p) {
  if (!p.count_dependency) return nullptr;
  const auto* dep = proc.find_parameter(*p.count_dependency);
  if (!dep || dep->is_array || dep->c_only) return nullptr;
  return dep;
}

// Cast of a Fortran integer array to the C array type; "[][3]" declarators
// take a pointer to rows.
std::string int_array_cast(const ParameterSpec& p) {
  if (p.c_array.starts_with("[][")) return "(int (*)" + p.c_array.substr(2) + ")";
  return "(int*)";
}

// Conversion code of the legacy intercept for one argument.
struct InterceptArgument {
  std::vector<std::string> pre;
  std::string call_expression;
  std::vector<std::string> post;
};

std::string length_before(const ParameterSpec& dep) { return "(int)*" + dep.name; }

std::string length_after(const ParameterSpec& dep) {
  return dep.direction == Direction::kIn ? "(int)*" + dep.name : "c_" + dep.name;
}

void convert_handle_array(const ParameterSpec& p, const ParameterSpec& dep,
                          InterceptArgument& arg) {
  const std::string type = "MPI_" + handle_name(p);
  const std::string c = "c_" + p.name;
  const std::string n = length_before(dep);
  arg.pre.push_back(type + "* " + c + " = (" + type + "*)malloc(sizeof(" + type + ") * (size_t)(" +
                    n + " > 0 ? " + n + " : 1));");
  if (p.direction != Direction::kOut) {
    arg.pre.push_back("for (int i = 0; i < " + n + "; ++i) {");
    arg.pre.push_back(std::string(kIndent) + c + "[i] = " + handle_conversion(p, true) +
                      "(" + p.name + "[i]);");
    arg.pre.push_back("}");
  }
  arg.call_expression = c;
  if (p.direction != Direction::kIn) {
    arg.post.push_back("for (int i = 0; i < " + n + "; ++i) {");
    arg.post.push_back(std::string(kIndent) + p.name + "[i] = " +
                       handle_conversion(p, false) + "(" + c + "[i]);");
    arg.post.push_back("}");
  }
  arg.post.push_back("free(" + c + ");");
}

InterceptArgument intercept_argument(const ProcedureSpec& proc, const ParameterSpec& p) {
  InterceptArgument arg;
  const std::string c = "c_" + p.name;
  const bool reads = p.direction != Direction::kOut;
  const bool writes = p.direction != Direction::kIn;

  if (p.kind == ParamKind::kBuffer) {
    // SPECIAL_CONSTANT_MAP, then pass the address through.
    arg.pre.push_back("void* " + c + " = mpiwrapgen_f2c_buffer(" + p.name + ");");
    arg.call_expression = c;
    return arg;
  }
  if (p.kind == ParamKind::kString) {
    const std::string len = p.name + "_len";
    arg.pre.push_back("char* " + c + " = " +
                      (reads ? "mpiwrapgen_f2c_string(" + p.name + ", " + len + ");"
                             : "mpiwrapgen_string_buffer(" + len + ");"));
    arg.call_expression = c;
    if (writes) arg.post.push_back("mpiwrapgen_c2f_string(" + c + ", " + p.name + ", " + len + ");");
    arg.post.push_back("free(" + c + ");");
    return arg;
  }
  if (!handle_name(p).empty()) {
    // INFO_TRIM is not applied here: the legacy layer leaves info strings
    // untouched.
    if (p.is_array) {
      convert_handle_array(p, *scalar_dependency(proc, p), arg);
      return arg;
    }
    const std::string type = "MPI_" + handle_name(p);
    if (reads) {
      arg.pre.push_back(type + " " + c + " = " + handle_conversion(p, true) + "(*" + p.name +
                        ");");
    } else {
      arg.pre.push_back(type + " " + c + ";");
    }
    // MPI_Cancel takes its input request by address.
    const bool by_address = writes || (p.c_pointers && *p.c_pointers > 0);
    arg.call_expression = by_address ? "&" + c : c;
    if (writes) {
      arg.post.push_back("*" + p.name + " = " + handle_conversion(p, false) + "(" + c + ");");
    }
    return arg;
  }
  if (p.kind == ParamKind::kStatus) {
    if (p.is_array) {
      const std::string n = length_before(*scalar_dependency(proc, p));
      arg.pre.push_back("MPI_Status* " + c + " = mpiwrapgen_is_statuses_ignore(" + p.name +
                        ") ? MPI_STATUSES_IGNORE : (MPI_Status*)malloc(sizeof(MPI_Status) * (size_t)(" +
                        n + " > 0 ? " + n + " : 1));");
      if (reads) {
        arg.pre.push_back("if (" + c + " != MPI_STATUSES_IGNORE) {");
        arg.pre.push_back(std::string(kIndent) + "for (int i = 0; i < " + n + "; ++i) {");
        arg.pre.push_back(std::string(kIndent) + std::string(kIndent) + "PMPI_Status_f2c(" +
                          p.name + " + i * MPI_F_STATUS_SIZE, &" + c + "[i]);");
        arg.pre.push_back(std::string(kIndent) + "}");
        arg.pre.push_back("}");
      }
      arg.call_expression = c;
      arg.post.push_back("if (" + c + " != MPI_STATUSES_IGNORE) {");
      if (writes) {
        arg.post.push_back(std::string(kIndent) + "for (int i = 0; i < " + n + "; ++i) {");
        arg.post.push_back(std::string(kIndent) + std::string(kIndent) + "PMPI_Status_c2f(&" + c +
                           "[i], " + p.name + " + i * MPI_F_STATUS_SIZE);");
        arg.post.push_back(std::string(kIndent) + "}");
      }
      arg.post.push_back(std::string(kIndent) + "free(" + c + ");");
      arg.post.push_back("}");
      return arg;
    }
    arg.pre.push_back("MPI_Status " + c + "_storage;");
    arg.pre.push_back("MPI_Status* " + c + " = mpiwrapgen_is_status_ignore(" + p.name +
                      ") ? MPI_STATUS_IGNORE : &" + c + "_storage;");
    if (reads) {
      arg.pre.push_back("if (" + c + " != MPI_STATUS_IGNORE) PMPI_Status_f2c(" + p.name + ", " + c +
                        ");");
    }
    arg.call_expression = c;
    if (writes) {
      arg.post.push_back("if (" + c + " != MPI_STATUS_IGNORE) PMPI_Status_c2f(" + c + ", " +
                         p.name + ");");
    }
    return arg;
  }
  if (p.kind == ParamKind::kIndex) {
    if (p.is_array) {
      arg.call_expression = int_array_cast(p) + p.name;
      if (writes) {
        const auto* dep = scalar_dependency(proc, p);
        const std::string n = length_after(*dep);
        arg.post.push_back("if (" + n + " != MPI_UNDEFINED) {");
        arg.post.push_back(std::string(kIndent) + "for (int i = 0; i < " + n + "; ++i) " + p.name +
                           "[i] += 1;");
        arg.post.push_back("}");
      }
      return arg;
    }
    // INDEX_OFFSET: C counts from 0, Fortran from 1.
    arg.pre.push_back("int " + c + " = " + (reads ? "(int)*" + p.name + " - 1" : "0") + ";");
    arg.call_expression = writes ? "&" + c : c;
    if (writes) {
      arg.post.push_back("*" + p.name + " = (" + c + " == MPI_UNDEFINED) ? (MPI_Fint)" + c +
                         " : (MPI_Fint)(" + c + " + 1);");
    }
    return arg;
  }
  if (has_typed_c_value(p)) {
    arg.call_expression = (p.is_array || writes) ? p.name : "*" + p.name;
    return arg;
  }
  // LOGICAL_FLAG lands here too: the legacy layer assumes .true. maps to a
  // nonzero C int.
  if (p.is_array) {
    arg.call_expression = int_array_cast(p) + p.name;
    return arg;
  }
  if (!writes) {
    arg.call_expression = "(int)*" + p.name;
    return arg;
  }
  arg.pre.push_back("int " + c + " = " + (reads ? "(int)*" + p.name : "0") + ";");
  arg.call_expression = "&" + c;
  arg.post.push_back("*" + p.name + " = (MPI_Fint)" + c + ";");
  return arg;
}

std::string intercept_parameter(const ParameterSpec& p) {
  if (p.kind == ParamKind::kBuffer) return "void* " + p.name;
  if (p.kind == ParamKind::kString) return "char* " + p.name;
  if (has_typed_c_value(p)) return *p.c_type + "* " + p.name;
  return "MPI_Fint* " + p.name;
}

std::string c_only_argument(const ParameterSpec& p) {
  const bool pointer = p.is_array || p.direction != Direction::kIn ||
                       (p.c_type && p.c_type->find('*') != std::string::npos) ||
                       (p.c_pointers && *p.c_pointers > 0);
  return pointer ? "NULL" : "0";
}

}  // namespace

std::string f08_file_prelude() {
  return detail::generated_banner("!") +
         "\n#if defined(__has_include)\n"
         "#if __has_include(\"mpiwrapgen_config.h\")\n"
         "#include \"mpiwrapgen_config.h\"\n"
         "#endif\n"
         "#endif\n";
}

std::string render_f08_wrapper(const ProcedureSpec& proc, const HookFragments& fragments,
                               const SymbolVariant& variant, const std::string& guard,
                               const GeneratorOptions& options) {
  if (!proc.has_f08_binding) throw ContractError(proc.name, "procedure has no Fortran 2008 binding");
  if (variant.family != BindingFamily::kF08 || variant.pmpi) {
    throw ContractError(proc.name, "f08 wrapper needs a non-PMPI f08 variant");
  }
  const bool by_descriptor = variant.descriptor_suffix == DescriptorSuffix::kF08ts;
  const bool large = variant.large_count;
  const std::string name = variant.specific();
  const std::string pmpi = specific_name(proc.name, variant.descriptor_suffix, large, true);
  const std::string event_name = specific_name(proc.name, DescriptorSuffix::kNone, large, false);
  const auto params = fortran_parameter_order(proc);
  const ParameterSpec* error = nullptr;
  for (const auto& p : params) {
    if (p.kind == ParamKind::kErrorCode) error = &p;
  }
  const bool function = proc.fortran_result_type.has_value();

  std::vector<std::string> dummies;
  std::vector<std::string> declarations;
  std::vector<std::string> actuals;
  std::vector<std::string> use_names;
  for (const auto& p : params) {
    dummies.push_back(p.name);
    declarations.push_back(f08_parameter_declaration(p, large, by_descriptor));
    collect_mpi_names(declarations.back(), use_names);
    actuals.push_back(&p == error ? "ierror_local" : p.name);
  }
  if (function) collect_mpi_names(*proc.fortran_result_type, use_names);
  use_names.push_back(pmpi);

  const std::string body(kIndent);
  const std::string inner = body + std::string(kIndent);
  const std::string args = detail::join(dummies, ", ");
  std::string out = "#if defined(" + guard + ")\n";
  out += fortran_line(function ? "function " + name + "(" + args + ") result(result_value)"
                               : "subroutine " + name + "(" + args + ")",
                      "");
  out += fortran_line("use mpi_f08, only: " + detail::join(use_names, ", "), body);
  out += body + "use mpiwrapgen_tool, only: " + options.event_gen_active + ", " +
         options.write_event + "\n";
  append_hook(out, fragments, HookPoint::kUseStatements, body);
  out += body + "implicit none\n";
  for (const auto& d : declarations) out += fortran_line(d, body);
  if (function) out += body + *proc.fortran_result_type + " :: result_value\n";
  if (error) out += body + "integer :: ierror_local\n";
  out += body + "logical :: generate_events\n";
  append_hook(out, fragments, HookPoint::kLocalVars, body);
  out += "\n";
  out += body + "generate_events = " + options.event_gen_active + "(\"" + event_name + "\")\n";
  out += body + "if (generate_events) then\n";
  out += inner + "call " + options.write_event + "(\"ENTER " + event_name + "\")\n";
  append_hook(out, fragments, HookPoint::kEnter, inner);
  out += body + "end if\n";
  append_hook(out, fragments, HookPoint::kPrePmpi, body);
  const std::string call = pmpi + "(" + detail::join(actuals, ", ") + ")";
  out += fortran_line(function ? "result_value = " + call : "call " + call, body);
  append_hook(out, fragments, HookPoint::kPostPmpi, body);
  out += body + "if (generate_events) then\n";
  append_hook(out, fragments, HookPoint::kExit, inner);
  out += inner + "call " + options.write_event + "(\"EXIT " + event_name + "\")\n";
  out += body + "end if\n";
  if (error) out += body + "if (present(" + error->name + ")) " + error->name + " = ierror_local\n";
  out += std::string(function ? "end function " : "end subroutine ") + name + "\n";
  out += "#endif /* " + guard + " */\n";
  return out;
}

std::string intercept_file_prelude(const GeneratorOptions& options) {
  std::string out = detail::generated_banner("/*") + "\n";
  out += "#include <stdlib.h>\n#include <string.h>\n#include <mpi.h>\n";
  out += "#if defined(__has_include)\n";
  out += "#if __has_include(\"mpiwrapgen_config.h\")\n";
  out += "#include \"mpiwrapgen_config.h\"\n";
  out += "#endif\n";
  out += "#endif\n\n";
  out += "#ifndef MPIWRAPGEN_FORTRAN_STRLEN\n#define MPIWRAPGEN_FORTRAN_STRLEN size_t\n#endif\n\n";
  // MPI_F_STATUS_SIZE appeared with MPI-4.0 headers.
  out += "#ifndef MPI_F_STATUS_SIZE\n#define MPI_F_STATUS_SIZE ((int)(sizeof(MPI_Status) / sizeof(MPI_Fint)))\n"
         "#endif\n\n";

  // One FSUB branch per selected scheme; the first one is the default.
  out += "/* Fortran name mangling, selected with -DMPIWRAPGEN_FORTRAN_<CASE>_<N>. */\n";
  auto definition = [](const ManglingScheme& s) {
    std::string name = s.case_rule == CaseRule::kUpper ? "upper" : "lower";
    if (s.underscore_suffix_count > 0) {
      name += "##" + std::string(static_cast<std::size_t>(s.underscore_suffix_count), '_');
    }
    return "#define FSUB(lower, upper) " + name + "\n";
  };
  bool first = true;
  for (const auto& s : options.schemes) {
    if (s.case_rule == CaseRule::kPreserve) continue;
    out += std::string(first ? "#if" : "#elif") + " defined(MPIWRAPGEN_FORTRAN_" +
           detail::upper(to_string(s).substr(0, 5)) + "_" +
           std::to_string(s.underscore_suffix_count) + ")\n";
    out += definition(s);
    first = false;
  }
  const ManglingScheme fallback = options.schemes.empty() ? kSchemeTable[1] : options.schemes.front();
  out += first ? "" : "#else\n";
  out += definition(fallback);
  if (!first) out += "#endif\n";

  out += R"(
/* Addresses of the Fortran special constants, recorded by the tool when the
   Fortran side initializes (see fortran_constants.c). */
extern void* mpiwrapgen_fortran_bottom;
extern void* mpiwrapgen_fortran_in_place;
extern void* mpiwrapgen_fortran_status_ignore;
extern void* mpiwrapgen_fortran_statuses_ignore;

static inline void* mpiwrapgen_f2c_buffer(void* buf)
{
    if (buf != NULL && buf == mpiwrapgen_fortran_bottom) return MPI_BOTTOM;
    if (buf != NULL && buf == mpiwrapgen_fortran_in_place) return MPI_IN_PLACE;
    return buf;
}

static inline int mpiwrapgen_is_status_ignore(const MPI_Fint* status)
{
    return (const void*)status == mpiwrapgen_fortran_status_ignore;
}

static inline int mpiwrapgen_is_statuses_ignore(const MPI_Fint* statuses)
{
    return (const void*)statuses == mpiwrapgen_fortran_statuses_ignore;
}

/* Fixed-length, blank-padded Fortran string to a terminated C string. */
static inline char* mpiwrapgen_f2c_string(const char* text, MPIWRAPGEN_FORTRAN_STRLEN len)
{
    char* out;
    while (len > 0 && text[len - 1] == ' ') --len;
    out = (char*)malloc((size_t)len + 1);
    if (out != NULL) {
        memcpy(out, text, (size_t)len);
        out[len] = '\0';
    }
    return out;
}

static inline char* mpiwrapgen_string_buffer(MPIWRAPGEN_FORTRAN_STRLEN len)
{
    size_t size = (size_t)len < 8192 ? 8192 : (size_t)len;
    char* out = (char*)malloc(size + 1);
    if (out != NULL) out[0] = '\0';
    return out;
}

static inline void mpiwrapgen_c2f_string(const char* text, char* out, MPIWRAPGEN_FORTRAN_STRLEN len)
{
    size_t n = text != NULL ? strlen(text) : 0;
    if (n > (size_t)len) n = (size_t)len;
    if (n > 0) memcpy(out, text, n);
    memset(out + n, ' ', (size_t)len - n);
}
)";
  return out;
}

std::string render_fortran_intercept(const ProcedureSpec& proc, const SymbolVariant& variant,
                                     const std::string& guard) {
  if (auto reason = skip_reason(proc, BindingFamily::kFortran)) {
    throw ContractError(proc.name, *reason);
  }
  if (variant.family != BindingFamily::kFortran ||
      variant.descriptor_suffix != DescriptorSuffix::kNone || variant.pmpi) {
    throw ContractError(proc.name, "the intercept layer only covers the by-address symbol");
  }
  const auto params = fortran_parameter_order(proc);
  const bool function = proc.fortran_result_type.has_value();
  const std::string c_name = specific_name(proc.name, DescriptorSuffix::kNone, false, false);

  std::vector<std::string> signature;
  std::vector<std::string> hidden_lengths;
  std::map<std::string, InterceptArgument> converted;
  const ParameterSpec* error = nullptr;
  for (const auto& p : params) {
    if (p.kind == ParamKind::kErrorCode) {
      error = &p;
      signature.push_back("MPI_Fint* " + p.name);
      continue;
    }
    signature.push_back(intercept_parameter(p));
    if (p.kind == ParamKind::kString) {
      hidden_lengths.push_back("MPIWRAPGEN_FORTRAN_STRLEN " + p.name + "_len");
    }
    converted.emplace(p.name, intercept_argument(proc, p));
  }
  signature.insert(signature.end(), hidden_lengths.begin(), hidden_lengths.end());
  if (signature.empty()) signature.push_back("void");

  std::vector<std::string> call_args;
  std::vector<std::string> pre;
  std::vector<std::string> post;
  for (const auto& p : proc.parameters) {
    if (p.kind == ParamKind::kErrorCode) continue;
    if (p.c_type == "...") continue;
    if (p.c_only) {
      call_args.push_back(c_only_argument(p));
      continue;
    }
    const auto& arg = converted.at(p.name);
    pre.insert(pre.end(), arg.pre.begin(), arg.pre.end());
    post.insert(post.end(), arg.post.begin(), arg.post.end());
    call_args.push_back(arg.call_expression);
  }

  const std::string body(kIndent);
  const std::string return_type = function ? proc.c_return_type : "void";
  std::string out = "#if defined(" + guard + ")\n";
  out += return_type + " FSUB(" + detail::lower(proc.name) + ", " + detail::upper(proc.name) + ")(" +
         detail::join(signature, ", ") + ")\n{\n";
  const bool returns = proc.c_return_type != "void";
  if (returns) out += body + proc.c_return_type + " return_value;\n";
  for (const auto& line : pre) out += body + line + "\n";
  out += body + (returns ? "return_value = " : "") + c_name + "(" + detail::join(call_args, ", ") +
         ");\n";
  for (const auto& line : post) out += body + line + "\n";
  if (error && returns) out += body + "*" + error->name + " = (MPI_Fint)return_value;\n";
  if (function && returns) out += body + "return return_value;\n";
  out += "}\n";
  out += "#endif /* " + guard + " */\n";
  return out;
}

std::optional<std::string> skip_reason(const ProcedureSpec& proc, BindingFamily family) {
  switch (family) {
    case BindingFamily::kC:
      if (!proc.has_c_binding || proc.fortran_only) return "no C binding";
      return std::nullopt;
    case BindingFamily::kF08:
      if (!proc.has_f08_binding) return "no Fortran 2008 binding";
      return std::nullopt;
    case BindingFamily::kFortran:
      break;
  }
  if (!proc.has_fortran_binding) return "no Fortran binding";
  if (!is_interceptable_in_c(proc)) {
    return "Fortran-only routine; the intercept layer cannot delegate to a C PMPI function";
  }
  if (!proc.has_c_binding) return "no C binding to forward to";
  const auto& reasons = proc.needs_same_language_pmpi_reasons;
  if (reasons.contains(SameLanguageReason::kCallback)) {
    return "callback arguments are not handled by the intercept layer";
  }
  if (reasons.contains(SameLanguageReason::kAttributeCaching)) {
    return "attribute caching is not handled by the intercept layer";
  }
  for (const auto& p : proc.parameters) {
    if (p.c_only || p.kind == ParamKind::kErrorCode) continue;
    const std::string arg = "argument '" + p.name + "'";
    if (p.kind == ParamKind::kCallback) return arg + " is a callback";
    if (p.kind == ParamKind::kString && p.is_array) return arg + " is a string array";
    if (p.kind != ParamKind::kBuffer && p.kind != ParamKind::kString && pointer_valued(p)) {
      return arg + " is pointer-valued";
    }
    const bool handle = !handle_name(p).empty();
    const bool needs_length = p.is_array && (handle || p.kind == ParamKind::kStatus ||
                                             (p.kind == ParamKind::kIndex && p.direction != Direction::kIn));
    if (!needs_length) continue;
    const auto* dep = scalar_dependency(proc, p);
    if (!dep) return arg + " has no usable length argument";
    const bool before = handle || p.kind == ParamKind::kStatus;
    if (before && dep->direction == Direction::kOut) {
      return arg + " has a length known only after the call";
    }
    if (!is_int_like(dep->kind)) return arg + " has a non-integer length argument";
  }
  return std::nullopt;
}

}  // namespace mpiwrapgen
