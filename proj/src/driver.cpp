#include "mpiwrapgen/driver.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include "mpiwrapgen/upstream.hpp"

namespace mpiwrapgen {

namespace fs = std::filesystem;

namespace {

Json read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open file");
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return Json::parse(text.str());
  } catch (const Json::parse_error& e) {
    throw ParseError(path.string(), e.what());
  }
}

std::string temp_suffix() {
  std::random_device device;
  std::ostringstream out;
  out << std::hex << device() << device();
  return out.str();
}

}  // namespace

ApiSpec load_spec_file(const fs::path& path, Diagnostics& diagnostics, DocumentRole role) {
  Json document = read_json(path);
  if (is_upstream_document(document)) document = adapt_upstream_document(document, diagnostics);
  std::string label = path.stem().string();
  if (document.is_object() && document.contains("version") && document["version"].is_string()) {
    label = document["version"].get<std::string>();
  }
  return parse_api_spec(document, label, diagnostics, role, path.string());
}

void write_tree_atomically(const fs::path& out_dir, const std::map<std::string, std::string>& files) {
  const fs::path target = fs::absolute(out_dir).lexically_normal();
  const fs::path parent = target.parent_path();
  const std::string stem = target.filename().string();
  std::error_code ec;
  fs::create_directories(parent, ec);
  if (ec) throw IoError(parent.string(), ec.message());

  const std::string suffix = temp_suffix();
  const fs::path staging = parent / ("." + stem + ".tmp-" + suffix);
  try {
    for (const auto& [relative, content] : files) {
      const fs::path path = staging / relative;
      fs::create_directories(path.parent_path(), ec);
      if (ec) throw IoError(path.parent_path().string(), ec.message());
      std::ofstream out(path, std::ios::binary);
      if (!out) throw IoError(path.string(), "cannot create file");
      out << content;
      out.close();
      if (!out) throw IoError(path.string(), "write failed");
    }
    if (fs::exists(target)) {
      if (!fs::is_directory(target)) throw IoError(target.string(), "exists and is not a directory");
      const fs::path old = parent / ("." + stem + ".old-" + suffix);
      fs::rename(target, old, ec);
      if (ec) throw IoError(target.string(), ec.message());
      fs::rename(staging, target, ec);
      if (ec) {
        fs::rename(old, target);
        throw IoError(target.string(), ec.message());
      }
      fs::remove_all(old, ec);
    } else {
      fs::rename(staging, target, ec);
      if (ec) throw IoError(target.string(), ec.message());
    }
  } catch (...) {
    fs::remove_all(staging, ec);
    throw;
  }
}

RunResult run(const RunOptions& options) {
  RunResult result;
  Diagnostics& diags = result.diagnostics;
  try {
    if (options.spec_paths.empty()) throw ValidationError("options", "no spec document given");
    if (options.families.empty()) throw ValidationError("options", "no binding family selected");
    if (options.schemes.empty()) throw ValidationError("options", "no mangling scheme selected");

    std::vector<ApiSpec> specs;
    for (const auto& path : options.spec_paths) specs.push_back(load_spec_file(path, diags));
    ApiSpec spec = options.supplement_path
                       ? merge_api_specs(specs, load_spec_file(*options.supplement_path, diags,
                                                               DocumentRole::kSupplement))
                       : merge_api_specs(specs);
    result.all_procedures = enumerate_procedures(spec, FamilyFilter::kAll).size();
    result.f08_procedures = enumerate_procedures(spec, FamilyFilter::kF08).size();

    const auto templates = load_templates(options.template_dir);
    const TaskConfig config = load_task_config_file(options.task_config_path, spec, diags);

    GeneratorOptions generator;
    generator.families = options.families;
    generator.schemes = options.schemes;
    generator.jobs = options.jobs;
    GeneratedTree tree = generate_tree(spec, templates, config, generator);
    diags.append(tree.diagnostics);

    if (options.strict && diags.warning_count() > 0) {
      throw ValidationError("options", std::to_string(diags.warning_count()) +
                                           " warning(s) with --strict");
    }
    write_tree_atomically(options.out_dir, tree.files);

    std::vector<std::string> parts;
    for (const auto& [family, summary] : tree.families) {
      parts.push_back(std::string(family_label(family)) + ": " + std::to_string(summary.procedures));
    }
    parts.push_back("checks: " + std::to_string(tree.checks.size()));
    std::string line;
    for (std::size_t i = 0; i < parts.size(); ++i) line += (i ? ", " : "") + parts[i];
    result.summary = line;
    result.tree = std::move(tree);
  } catch (const IoError& e) {
    diags.error(e.location(), e.detail());
    result.exit_code = kExitIo;
  } catch (const Error& e) {
    diags.error(e.location(), e.detail());
    result.exit_code = kExitValidation;
  } catch (const fs::filesystem_error& e) {
    diags.error(e.path1().string(), e.code().message());
    result.exit_code = kExitIo;
  }
  return result;
}

Json report_json(const RunResult& result) {
  Json report;
  report["exit_code"] = result.exit_code;
  report["summary"] = result.summary;
  report["procedures"] = {{"all", result.all_procedures}, {"f08", result.f08_procedures}};
  Json families = Json::object();
  if (result.tree) {
    for (const auto& [family, summary] : result.tree->families) {
      families[std::string(family_label(family))] = {{"procedures", summary.procedures},
                                                     {"wrappers", summary.units}};
    }
    report["checks"] = result.tree->checks.size();
    report["skipped"] = result.tree->skipped.size();
  }
  report["families"] = families;
  Json diagnostics = Json::array();
  for (const auto& d : result.diagnostics.entries()) {
    diagnostics.push_back({{"severity", d.severity == Severity::kError ? "error" : "warning"},
                           {"location", d.location},
                           {"message", d.message}});
  }
  report["diagnostics"] = diagnostics;
  return report;
}

}  // namespace mpiwrapgen
