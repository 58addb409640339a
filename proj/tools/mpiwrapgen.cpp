// Command-line driver of the wrapper generator.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mpiwrapgen/driver.hpp"

int main(int argc, char** argv) {
  using namespace mpiwrapgen;
  CLI::App app{"Generates PMPI wrapper sources from MPI API specification documents."};

  std::vector<std::string> specs;
  std::string supplement;
  std::string templates = std::string(MPIWRAPGEN_DATA_DIR) + "/templates";
  std::string tasks = std::string(MPIWRAPGEN_DATA_DIR) + "/config.json";
  std::string out;
  std::vector<std::string> families;
  std::vector<std::string> schemes;
  std::string report;
  RunOptions options;

  app.add_option("--spec", specs, "Spec document, oldest to newest (repeatable)")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--supplement", supplement, "Removed-interface supplement document")
      ->check(CLI::ExistingFile);
  app.add_option("--templates", templates, "Source-file template directory")->capture_default_str();
  app.add_option("--tasks", tasks, "Task config document")->capture_default_str();
  app.add_option("--out", out, "Output directory")->required();
  app.add_option("--family", families, "c, fortran_intercept or f08 (repeatable)");
  app.add_option("--scheme", schemes, "Mangling scheme such as lower/1 (repeatable)");
  app.add_flag("--strict", options.strict, "Treat warnings as errors");
  app.add_option("--report", report, "Machine-readable report on stdout")
      ->check(CLI::IsMember({"json"}));
  app.add_option("--jobs", options.jobs, "Rendering threads")->check(CLI::Range(1u, 256u));
  app.add_flag_callback("--version", [] {
    std::cout << "mpiwrapgen " << MPIWRAPGEN_VERSION << "\n";
    throw CLI::Success();
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  for (const auto& s : specs) options.spec_paths.emplace_back(s);
  if (!supplement.empty()) options.supplement_path = supplement;
  options.template_dir = templates;
  options.task_config_path = tasks;
  options.out_dir = out;
  options.report_json = report == "json";
  if (!families.empty()) {
    options.families.clear();
    for (const auto& f : families) {
      const auto family = family_from_label(f);
      if (!family) {
        std::cerr << "error: --family: unknown binding family '" << f << "'\n";
        return kExitValidation;
      }
      options.families.insert(*family);
    }
  }
  if (!schemes.empty()) {
    options.schemes.clear();
    for (const auto& s : schemes) {
      const auto scheme = parse_scheme(s);
      if (!scheme) {
        std::cerr << "error: --scheme: unknown mangling scheme '" << s << "'\n";
        return kExitValidation;
      }
      options.schemes.push_back(*scheme);
    }
  }

  const RunResult result = run(options);
  for (const auto& d : result.diagnostics.entries()) std::cerr << format(d) << "\n";
  if (options.report_json) {
    std::cout << report_json(result).dump(2) << "\n";
  } else if (result.exit_code == kExitOk) {
    std::cout << "procedures: " << result.all_procedures << " (f08: " << result.f08_procedures
              << ")\n";
    std::cout << result.summary << "\n";
  }
  return result.exit_code;
}
