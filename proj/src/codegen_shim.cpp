#include <algorithm>
#include <set>

#include "codegen_internal.hpp"
#include "mpiwrapgen/codegen.hpp"

namespace mpiwrapgen {

using detail::fortran_line;
using detail::kIndent;

namespace {

bool reads(const ShimArgument& a) { return a.direction != Direction::kOut; }
bool writes(const ShimArgument& a) { return a.direction != Direction::kIn; }

std::string intent(const ShimArgument& a) {
  switch (a.direction) {
    case Direction::kIn: return "intent(in)";
    case Direction::kOut: return "intent(out)";
    case Direction::kInOut: return "intent(inout)";
  }
  return "intent(in)";
}

std::set<ConversionRule> rules_of(const ShimArgument& a) {
  ParameterSpec p;
  p.name = a.name;
  p.kind = a.kind;
  p.direction = a.direction;
  std::set<ConversionRule> rules;
  for (const auto& step : marshal_plan(p, BoundaryDirection::kToC)) rules.insert(step.rule);
  return rules;
}

bool fortran_side_rule(ConversionRule r, bool wrapped_status) {
  return r == ConversionRule::kLogicalConvert || r == ConversionRule::kOptionalIerrorPresentCheck ||
         r == ConversionRule::kStringConvert ||
         (r == ConversionRule::kStatusWrapWithLang && wrapped_status);
}

bool c_side_rule(ConversionRule r) {
  return r == ConversionRule::kHandleF2C || r == ConversionRule::kHandleC2F ||
         r == ConversionRule::kSpecialConstantMap || r == ConversionRule::kStringConvert ||
         r == ConversionRule::kIndexOffset || r == ConversionRule::kInfoTrim ||
         r == ConversionRule::kStatusWrapWithLang;
}

std::string handle_type(ParamKind kind) { return "MPI_" + std::string(handle_stem(kind)); }

std::string handle_conversion(ParamKind kind, bool to_c) {
  std::string stem(handle_stem(kind));
  if (kind == ParamKind::kDatatype) stem = "Type";
  return "PMPI_" + stem + (to_c ? "_f2c" : "_c2f");
}

// Dummy declaration inside the bind(C) interface.
std::vector<std::string> interface_declarations(const ShimArgument& a, bool wrapped_status) {
  const std::string n = a.name;
  if (a.kind == ParamKind::kString) {
    return {std::string("character(kind=c_char), dimension(*), ") +
                (writes(a) ? "intent(inout)" : "intent(in)") + " :: " + n,
            "integer(c_size_t), value :: " + n + "_len"};
  }
  if (a.kind == ParamKind::kStatus) {
    if (wrapped_status) {
      return {"type(c_ptr), value :: " + n, "integer(c_int), value :: " + n + "_lang"};
    }
    return {"type(MPI_Status), " + intent(a) + " :: " + n};
  }
  if (is_handle(a.kind)) return {"type(" + handle_type(a.kind) + "), " + intent(a) + " :: " + n};
  if (a.kind == ParamKind::kBuffer) return {"type(*), dimension(*) :: " + n};
  if (a.kind == ParamKind::kCallback) return {"type(c_funptr), value :: " + n};
  if (a.kind == ParamKind::kErrorCode) return {"integer(c_int), intent(out) :: " + n};
  if (!writes(a)) return {"integer(c_int), value :: " + n};
  return {"integer(c_int), " + intent(a) + " :: " + n};
}

// Dummy declaration of the Fortran-layer module procedure.
std::string fortran_declaration(const ShimArgument& a) {
  const std::string n = a.name;
  switch (a.kind) {
    case ParamKind::kString: return "character(len=*), " + intent(a) + " :: " + n;
    case ParamKind::kLogicalFlag: return "logical, " + intent(a) + " :: " + n;
    case ParamKind::kErrorCode: return "integer, optional, intent(out) :: " + n;
    case ParamKind::kStatus: return "type(MPI_Status), " + intent(a) + ", target :: " + n;
    case ParamKind::kBuffer: return "type(*), dimension(*) :: " + n;
    case ParamKind::kCallback: return "type(c_funptr), value :: " + n;
    default: break;
  }
  if (is_handle(a.kind)) return "type(" + handle_type(a.kind) + "), " + intent(a) + " :: " + n;
  return "integer(c_int), " + intent(a) + " :: " + n;
}

// C-side parameter of the C layer (or of the tool function for direct calls).
std::vector<std::string> c_layer_parameters(const ShimArgument& a, bool wrapped_status) {
  const std::string n = a.name;
  switch (a.kind) {
    case ParamKind::kString:
      return {std::string(writes(a) ? "char* " : "const char* ") + n, "size_t " + n + "_len"};
    case ParamKind::kStatus:
      if (wrapped_status) return {"void* " + n, "int " + n + "_lang"};
      return {"MPI_F08_status* " + n};
    case ParamKind::kBuffer: return {"void* " + n};
    case ParamKind::kCallback: return {"void (*" + n + ")(void)"};
    case ParamKind::kErrorCode: return {"int* " + n};
    default: break;
  }
  if (is_handle(a.kind)) return {"MPI_Fint* " + n};
  return {std::string(writes(a) ? "int* " : "int ") + n};
}

// Parameter of the tool function the C side finally calls.
std::string tool_parameter(const ShimArgument& a, bool wrapped_status) {
  const std::string n = a.name;
  switch (a.kind) {
    case ParamKind::kString: return std::string(writes(a) ? "char* " : "const char* ") + n;
    case ParamKind::kStatus:
      return wrapped_status ? "const mpiwrapgen_status_carrier* " + n : "const MPI_Status* " + n;
    case ParamKind::kBuffer: return "void* " + n;
    case ParamKind::kCallback: return "void (*" + n + ")(void)";
    default: break;
  }
  if (is_handle(a.kind)) {
    return handle_type(a.kind) + (writes(a) ? "* " : " ") + n;
  }
  return std::string(writes(a) ? "int* " : "int ") + n;
}

constexpr std::string_view kCStatusSupport = R"(typedef enum {
    MPIWRAPGEN_LANG_C = 0,
    MPIWRAPGEN_LANG_F08 = 1,
    MPIWRAPGEN_LANG_FORTRAN = 2
} mpiwrapgen_lang;

/* A status object in the representation of the language it came from. */
typedef struct {
    void* status;
    mpiwrapgen_lang lang;
} mpiwrapgen_status_carrier;

typedef enum {
    MPIWRAPGEN_STATUS_SOURCE = 0,
    MPIWRAPGEN_STATUS_TAG = 1,
    MPIWRAPGEN_STATUS_ERROR = 2
} mpiwrapgen_status_field;

/* Defined in tool_interface.F90. */
extern int mpiwrapgen_f08_status_field(void* status, int field);

static int mpiwrapgen_c_status_field(const MPI_Status* status, mpiwrapgen_status_field field)
{
    switch (field) {
    case MPIWRAPGEN_STATUS_SOURCE: return status->MPI_SOURCE;
    case MPIWRAPGEN_STATUS_TAG: return status->MPI_TAG;
    default: return status->MPI_ERROR;
    }
}

/* Reads a status field in the language that owns the object. */
int mpiwrapgen_status_query(const mpiwrapgen_status_carrier* carrier, mpiwrapgen_status_field field)
{
    if (carrier->lang == MPIWRAPGEN_LANG_C) {
        return mpiwrapgen_c_status_field((const MPI_Status*)carrier->status, field);
    } else if (carrier->lang == MPIWRAPGEN_LANG_F08) {
#if defined(HAVE_NATIVE_STATUS_CONVERSION)
        MPI_Status converted;
        PMPI_Status_f082c((const MPI_F08_status*)carrier->status, &converted);
        return mpiwrapgen_c_status_field(&converted, field);
#else
        return mpiwrapgen_f08_status_field(carrier->status, (int)field);
#endif
    } else {
        MPI_Status converted;
        PMPI_Status_f2c((const MPI_Fint*)carrier->status, &converted);
        return mpiwrapgen_c_status_field(&converted, field);
    }
}
)";

constexpr std::string_view kFortranStatusSupport = R"(    function mpiwrapgen_f08_status_field(status, field) result(value) &
            bind(C, name="mpiwrapgen_f08_status_field")
        type(MPI_Status), intent(in) :: status
        integer(c_int), value :: field
        integer(c_int) :: value
        select case (field)
        case (0)
            value = status%MPI_SOURCE
        case (1)
            value = status%MPI_TAG
        case default
            value = status%MPI_ERROR
        end select
    end function mpiwrapgen_f08_status_field
)";

constexpr std::string_view kCHelpers = R"(/* Blank-padded Fortran string to a terminated C string; `trim_leading` also
   strips leading blanks, as the Fortran bindings do for info keys and values. */
static inline char* mpiwrapgen_f2c_string(const char* text, size_t len, int trim_leading)
{
    char* out;
    while (len > 0 && text[len - 1] == ' ') --len;
    while (trim_leading && len > 0 && text[0] == ' ') {
        ++text;
        --len;
    }
    out = (char*)malloc(len + 1);
    if (out != NULL) {
        memcpy(out, text, len);
        out[len] = '\0';
    }
    return out;
}

static inline void mpiwrapgen_c2f_string(const char* text, char* out, size_t len)
{
    size_t n = text != NULL ? strlen(text) : 0;
    if (n > len) n = len;
    if (n > 0) memcpy(out, text, n);
    memset(out + n, ' ', len - n);
}

/* Address of the f08 MPI_BOTTOM, recorded by the tool's Fortran side. */
void* mpiwrapgen_f08_bottom = NULL;
void* mpiwrapgen_f08_in_place = NULL;
)";

}  // namespace

ToolShim render_tool_shim(const EventSignature& signature, const StatusStrategy& strategy) {
  const bool wrapped = strategy.mode == StatusMode::kWrappedWithLanguageTag;
  ToolShim shim;
  shim.name = signature.name;

  bool has_status = false;
  bool has_info = false;
  const ShimArgument* error = nullptr;
  for (const auto& a : signature.arguments) {
    for (auto r : rules_of(a)) {
      shim.fortran_layer = shim.fortran_layer || fortran_side_rule(r, wrapped);
      shim.c_layer = shim.c_layer || c_side_rule(r);
    }
    has_status = has_status || a.kind == ParamKind::kStatus;
    has_info = has_info || a.kind == ParamKind::kInfo;
    if (a.kind == ParamKind::kErrorCode) error = &a;
  }
  if (signature.returns_logical) shim.fortran_layer = true;
  if (error && signature.returns_logical) {
    throw ContractError(signature.name, "a shim cannot return both a flag and an error code");
  }

  const std::string c_entry = "mpiwrapgen_" + signature.name + "_c";
  const std::string bound_name = shim.c_layer ? c_entry : signature.name;
  const std::string interface_name = shim.fortran_layer ? signature.name + "_c" : signature.name;
  const bool function = signature.returns_logical;
  const std::string body(kIndent);
  const std::string inner = body + std::string(kIndent);
  const std::string deep = inner + std::string(kIndent);

  // bind(C) interface.
  std::vector<std::string> dummies;
  std::vector<std::string> hidden;
  std::vector<std::string> decls;
  std::vector<std::string> hidden_decls;
  for (const auto& a : signature.arguments) {
    auto d = interface_declarations(a, wrapped);
    dummies.push_back(a.name);
    decls.push_back(d[0]);
    if (d.size() > 1) {
      hidden.push_back(a.kind == ParamKind::kString ? a.name + "_len" : a.name + "_lang");
      hidden_decls.push_back(d[1]);
    }
  }
  dummies.insert(dummies.end(), hidden.begin(), hidden.end());
  decls.insert(decls.end(), hidden_decls.begin(), hidden_decls.end());
  const std::string binding = "bind(C, name=\"" + bound_name + "\")";
  std::string iface = body + "interface\n";
  iface += fortran_line(std::string(function ? "function " : "subroutine ") + interface_name + "(" +
                            detail::join(dummies, ", ") + ")" +
                            (function ? " result(active)" : "") + " " + binding,
                        inner);
  iface += inner + std::string(kIndent) + "import\n";
  for (const auto& d : decls) iface += deep + d + "\n";
  if (function) iface += deep + "integer(c_int) :: active\n";
  iface += inner + (function ? "end function " : "end subroutine ") + interface_name + "\n";
  iface += body + "end interface\n";
  shim.fortran_interface = iface;

  // Fortran layer.
  if (shim.fortran_layer) {
    std::vector<std::string> names;
    std::vector<std::string> actuals;
    std::vector<std::string> lengths;
    std::vector<std::string> locals;
    std::vector<std::string> after;
    for (const auto& a : signature.arguments) {
      names.push_back(a.name);
      switch (a.kind) {
        case ParamKind::kString:
          actuals.push_back(a.name);
          lengths.push_back("len(" + a.name + ", kind=c_size_t)");
          break;
        case ParamKind::kLogicalFlag:
          if (writes(a)) {
            locals.push_back("integer(c_int) :: " + a.name + "_c");
            actuals.push_back(a.name + "_c");
            after.push_back(a.name + " = (" + a.name + "_c /= 0_c_int)");
          } else {
            actuals.push_back("merge(1_c_int, 0_c_int, " + a.name + ")");
          }
          break;
        case ParamKind::kErrorCode:
          locals.push_back("integer(c_int) :: " + a.name + "_c");
          actuals.push_back(a.name + "_c");
          after.push_back("if (present(" + a.name + ")) " + a.name + " = int(" + a.name + "_c)");
          break;
        case ParamKind::kStatus:
          if (wrapped) {
            actuals.push_back("c_loc(" + a.name + ")");
            lengths.push_back("mpiwrapgen_lang_f08");
          } else {
            actuals.push_back(a.name);
          }
          break;
        default:
          actuals.push_back(a.name);
      }
    }
    actuals.insert(actuals.end(), lengths.begin(), lengths.end());
    std::string proc = fortran_line(std::string(function ? "function " : "subroutine ") +
                                        signature.name + "(" + detail::join(names, ", ") + ")" +
                                        (function ? " result(active)" : ""),
                                    body);
    for (const auto& a : signature.arguments) proc += inner + fortran_declaration(a) + "\n";
    if (function) proc += inner + "logical :: active\n";
    for (const auto& l : locals) proc += inner + l + "\n";
    const std::string call = interface_name + "(" + detail::join(actuals, ", ") + ")";
    proc += fortran_line(function ? "active = (" + call + " /= 0_c_int)" : "call " + call, inner);
    for (const auto& a : after) proc += inner + a + "\n";
    proc += body + (function ? "end function " : "end subroutine ") + signature.name + "\n";
    shim.fortran_procedure = proc;
  }

  // Tool prototype.
  std::vector<std::string> tool_params;
  for (const auto& a : signature.arguments) {
    if (a.kind == ParamKind::kErrorCode) continue;
    tool_params.push_back(tool_parameter(a, wrapped));
  }
  if (tool_params.empty()) tool_params.push_back("void");
  const bool tool_returns = function || error;
  shim.c_tool_prototype = std::string(tool_returns ? "int " : "void ") + signature.name + "(" +
                          detail::join(tool_params, ", ") + ");\n";

  // C layer.
  if (shim.c_layer) {
    std::vector<std::string> params;
    std::vector<std::string> hidden_params;
    std::vector<std::string> pre;
    std::vector<std::string> post;
    std::vector<std::string> args;
    for (const auto& a : signature.arguments) {
      auto p = c_layer_parameters(a, wrapped);
      params.push_back(p[0]);
      if (p.size() > 1) hidden_params.push_back(p[1]);
      const std::string c = "c_" + a.name;
      if (a.kind == ParamKind::kErrorCode) continue;
      if (a.kind == ParamKind::kString) {
        // INFO_TRIM applies to strings that travel with an info object.
        if (reads(a)) {
          pre.push_back("char* " + c + " = mpiwrapgen_f2c_string(" + a.name + ", " + a.name +
                        "_len, " + (has_info ? "1" : "0") + ");");
        } else {
          pre.push_back("char* " + c + " = (char*)calloc(" + a.name + "_len + 1, 1);");
        }
        args.push_back(c);
        if (writes(a)) post.push_back("mpiwrapgen_c2f_string(" + c + ", " + a.name + ", " + a.name + "_len);");
        post.push_back("free(" + c + ");");
      } else if (a.kind == ParamKind::kStatus) {
        if (wrapped) {
          pre.push_back("mpiwrapgen_status_carrier " + c + ";");
          pre.push_back(c + ".status = " + a.name + ";");
          pre.push_back(c + ".lang = (mpiwrapgen_lang)" + a.name + "_lang;");
          args.push_back("&" + c);
        } else {
          pre.push_back("MPI_Status " + c + ";");
          pre.push_back("PMPI_Status_f082c(" + a.name + ", &" + c + ");");
          args.push_back("&" + c);
        }
      } else if (is_handle(a.kind)) {
        if (reads(a)) {
          pre.push_back(handle_type(a.kind) + " " + c + " = " + handle_conversion(a.kind, true) +
                        "(*" + a.name + ");");
        } else {
          pre.push_back(handle_type(a.kind) + " " + c + ";");
        }
        args.push_back(writes(a) ? "&" + c : c);
        if (writes(a)) {
          post.push_back("*" + a.name + " = " + handle_conversion(a.kind, false) + "(" + c + ");");
        }
      } else if (a.kind == ParamKind::kBuffer) {
        pre.push_back("void* " + c + " = " + a.name + ";");
        pre.push_back("if (" + c + " != NULL && " + c + " == mpiwrapgen_f08_bottom) " + c +
                      " = MPI_BOTTOM;");
        pre.push_back("if (" + c + " != NULL && " + c + " == mpiwrapgen_f08_in_place) " + c +
                      " = MPI_IN_PLACE;");
        args.push_back(c);
      } else if (a.kind == ParamKind::kIndex) {
        if (writes(a)) {
          pre.push_back("int " + c + " = " + (reads(a) ? "*" + a.name + " - 1" : "0") + ";");
          args.push_back("&" + c);
          post.push_back("*" + a.name + " = " + c + " + 1;");
        } else {
          args.push_back(a.name + " - 1");
        }
      } else {
        args.push_back(a.name);
      }
    }
    params.insert(params.end(), hidden_params.begin(), hidden_params.end());
    if (params.empty()) params.push_back("void");
    // An error code goes back through its argument, not the return value.
    const bool entry_returns = tool_returns && !error;
    std::string fn = std::string(entry_returns ? "int " : "void ") + c_entry + "(" +
                     detail::join(params, ", ") + ")\n{\n";
    if (tool_returns) fn += body + "int result;\n";
    for (const auto& l : pre) fn += body + l + "\n";
    fn += body + (tool_returns ? "result = " : "") + signature.name + "(" + detail::join(args, ", ") +
          ");\n";
    for (const auto& l : post) fn += body + l + "\n";
    if (error) {
      fn += body + "*" + error->name + " = result;\n";
    } else if (tool_returns) {
      fn += body + "return result;\n";
    }
    fn += "}\n";
    shim.c_entry = fn;
  }

  if (has_status && wrapped) {
    shim.c_status_support = std::string(kCStatusSupport);
    shim.fortran_status_support = std::string(kFortranStatusSupport);
  }
  return shim;
}

std::vector<EventSignature> default_event_signatures(const GeneratorOptions& options) {
  return {
      {options.event_gen_active, {{"name", ParamKind::kString, Direction::kIn}}, true},
      {options.write_event, {{"text", ParamKind::kString, Direction::kIn}}, false},
      {"record_status", {{"status", ParamKind::kStatus, Direction::kIn}}, false},
      {"record_comm", {{"comm", ParamKind::kComm, Direction::kIn}}, false},
      {"record_value", {{"value", ParamKind::kOtherInt, Direction::kIn}}, false},
  };
}

ToolInterfaceFiles render_tool_interface(const std::vector<EventSignature>& signatures,
                                         const StatusStrategy& strategy) {
  std::vector<ToolShim> shims;
  for (const auto& s : signatures) shims.push_back(render_tool_shim(s, strategy));

  std::vector<std::string> mpi_names;
  std::vector<std::string> publics;
  for (const auto& s : signatures) {
    publics.push_back(s.name);
    for (const auto& a : s.arguments) {
      if (a.kind == ParamKind::kStatus) detail::collect_mpi_names("type(MPI_Status)", mpi_names);
      if (is_handle(a.kind)) detail::collect_mpi_names("type(" + handle_type(a.kind) + ")", mpi_names);
    }
  }
  const bool status_support =
      std::any_of(shims.begin(), shims.end(), [](const ToolShim& s) { return !s.c_status_support.empty(); });
  if (status_support) detail::collect_mpi_names("type(MPI_Status)", mpi_names);

  const std::string body(kIndent);
  ToolInterfaceFiles files;
  std::string& f = files.fortran;
  f = detail::generated_banner("!");
  f += "module mpiwrapgen_tool\n";
  f += body + "use, intrinsic :: iso_c_binding\n";
  if (!mpi_names.empty()) f += fortran_line("use mpi_f08, only: " + detail::join(mpi_names, ", "), body);
  f += body + "implicit none\n";
  f += body + "private\n";
  f += fortran_line("public :: " + detail::join(publics, ", "), body);
  f += body + "integer(c_int), parameter, public :: mpiwrapgen_lang_c = 0\n";
  f += body + "integer(c_int), parameter, public :: mpiwrapgen_lang_f08 = 1\n";
  f += body + "integer(c_int), parameter, public :: mpiwrapgen_lang_fortran = 2\n";
  for (const auto& s : shims) f += "\n" + s.fortran_interface;
  f += "\ncontains\n";
  bool status_written = false;
  for (const auto& s : shims) {
    if (!s.fortran_procedure.empty()) f += "\n" + s.fortran_procedure;
    if (!s.fortran_status_support.empty() && !status_written) {
      f += "\n" + s.fortran_status_support;
      status_written = true;
    }
  }
  f += "end module mpiwrapgen_tool\n";

  std::string& c = files.c;
  c = detail::generated_banner("/*") + "\n";
  c += "#include <stdlib.h>\n#include <string.h>\n#include <mpi.h>\n";
  c += "#if defined(__has_include)\n#if __has_include(\"mpiwrapgen_config.h\")\n";
  c += "#include \"mpiwrapgen_config.h\"\n#endif\n#endif\n\n";
  c += kCHelpers;
  status_written = false;
  for (const auto& s : shims) {
    if (!s.c_status_support.empty() && !status_written) {
      c += "\n" + s.c_status_support;
      status_written = true;
    }
  }
  c += "\n/* Implemented by the tool. */\n";
  for (const auto& s : shims) c += s.c_tool_prototype;
  for (const auto& s : shims) {
    if (!s.c_entry.empty()) c += "\n" + s.c_entry;
  }
  return files;
}

}  // namespace mpiwrapgen
