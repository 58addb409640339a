#include "codegen_internal.hpp"
#include "mpiwrapgen/codegen.hpp"

namespace mpiwrapgen {

using detail::append_hook;
using detail::kIndent;

std::string c_file_prelude(const GeneratorOptions& options) {
  std::string out = detail::generated_banner("/*") + "\n";
  out += "#include <mpi.h>\n";
  out += "#if defined(__has_include)\n";
  out += "#if __has_include(\"mpiwrapgen_config.h\")\n";
  out += "#include \"mpiwrapgen_config.h\"\n";
  out += "#endif\n";
  out += "#endif\n\n";
  out += "extern int " + options.event_gen_active + "(const char* name);\n";
  out += "extern void " + options.write_event + "(const char* text);\n";
  return out;
}

std::string render_c_wrapper(const ProcedureSpec& proc, const HookFragments& fragments,
                             const SymbolVariant& variant, const std::string& guard,
                             const GeneratorOptions& options) {
  const std::string prototype = render_c_prototype(proc, variant.large_count);
  const std::string event_name =
      specific_name(proc.name, DescriptorSuffix::kNone, variant.large_count, false);
  const std::string pmpi =
      specific_name(proc.name, DescriptorSuffix::kNone, variant.large_count, true);
  const bool returns = proc.c_return_type != "void";

  std::vector<std::string> args;
  for (const auto& p : proc.parameters) {
    // Variadic arguments cannot be forwarded.
    if (p.kind != ParamKind::kErrorCode && p.c_type != "...") args.push_back(p.name);
  }

  const std::string body(kIndent);
  const std::string inner = body + std::string(kIndent);
  std::string out = "#if defined(" + guard + ")\n";
  out += prototype + "\n{\n";
  if (returns) out += body + proc.c_return_type + " return_value;\n";
  append_hook(out, fragments, HookPoint::kLocalVars, body);
  out += body + "const int generate_events = " + options.event_gen_active + "(\"" + event_name +
         "\");\n\n";
  out += body + "if (generate_events) {\n";
  out += inner + options.write_event + "(\"ENTER " + event_name + "\");\n";
  append_hook(out, fragments, HookPoint::kEnter, inner);
  out += body + "}\n";
  append_hook(out, fragments, HookPoint::kPrePmpi, body);
  out += body + (returns ? "return_value = " : "") + pmpi + "(" + detail::join(args, ", ") +
         ");\n";
  append_hook(out, fragments, HookPoint::kPostPmpi, body);
  out += body + "if (generate_events) {\n";
  append_hook(out, fragments, HookPoint::kExit, inner);
  out += inner + options.write_event + "(\"EXIT " + event_name + "\");\n";
  out += body + "}\n";
  if (returns) out += body + "return return_value;\n";
  out += "}\n";
  out += "#endif /* " + guard + " */\n";
  return out;
}

}  // namespace mpiwrapgen
