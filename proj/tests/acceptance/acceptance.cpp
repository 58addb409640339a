// Acceptance checks: one PASS / FAIL / SKIP line per criterion. Exits non-zero
// when any criterion fails.

#include <array>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "mpiwrapgen/bindings.hpp"
#include "mpiwrapgen/checks.hpp"
#include "mpiwrapgen/codegen.hpp"
#include "mpiwrapgen/driver.hpp"
#include "mpiwrapgen/interop.hpp"
#include "mpiwrapgen/spec_model.hpp"
#include "mpiwrapgen/tasks.hpp"

namespace fs = std::filesystem;
using namespace mpiwrapgen;

namespace {

enum class Outcome { kPass, kFail, kSkip };

struct Verdict {
  Outcome outcome = Outcome::kPass;
  std::string detail;
};

Verdict pass(std::string detail = {}) { return {Outcome::kPass, std::move(detail)}; }
Verdict fail(std::string detail) { return {Outcome::kFail, std::move(detail)}; }
Verdict skip(std::string detail) { return {Outcome::kSkip, std::move(detail)}; }

const fs::path kFixtures = MPIWRAPGEN_FIXTURE_DIR;
const fs::path kSource = MPIWRAPGEN_SOURCE_DIR;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file()) {
      files[fs::relative(entry.path(), root).generic_string()] = read_file(entry.path());
    }
  }
  return files;
}

int shell(const std::string& command) {
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

struct Workspace {
  fs::path root;
  Workspace() {
    std::random_device rd;
    root = fs::temp_directory_path() / ("mpiwrapgen-acceptance-" + std::to_string(rd()));
    fs::create_directories(root);
  }
  ~Workspace() {
    std::error_code ec;
    fs::remove_all(root, ec);
  }
};

ApiSpec fixture_spec() {
  Diagnostics diagnostics;
  std::vector<ApiSpec> specs;
  for (const char* name : {"mpi-4.0.json", "mpi-4.1.json"}) {
    specs.push_back(load_spec_file(kFixtures / name, diagnostics));
  }
  return merge_api_specs(
      specs, load_spec_file(kFixtures / "removed.json", diagnostics, DocumentRole::kSupplement));
}

TaskConfig shipped_config(const ApiSpec& spec) {
  Diagnostics diagnostics;
  return load_task_config_file(kSource / "data" / "config.json", spec, diagnostics);
}

std::string cli_fixture_command(const fs::path& out, const std::string& extra = {}) {
  return std::string(MPIWRAPGEN_CLI) + " --spec " + (kFixtures / "mpi-4.0.json").string() +
         " --spec " + (kFixtures / "mpi-4.1.json").string() + " --supplement " +
         (kFixtures / "removed.json").string() + " --out " + out.string() + extra +
         " >/dev/null 2>&1";
}

std::vector<std::string> split_paths(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, ':');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Official documents are not shipped; they are supplied through
// MPIWRAPGEN_OFFICIAL_SPECS (colon-separated, oldest first) and optionally
// MPIWRAPGEN_OFFICIAL_SUPPLEMENT.
Verdict official_counts() {
  const char* specs = std::getenv("MPIWRAPGEN_OFFICIAL_SPECS");
  if (specs == nullptr || *specs == '\0') {
    return skip("official 2.2-4.1 documents not supplied (set MPIWRAPGEN_OFFICIAL_SPECS)");
  }
  Workspace ws;
  RunOptions options;
  for (const auto& p : split_paths(specs)) options.spec_paths.emplace_back(p);
  if (const char* supplement = std::getenv("MPIWRAPGEN_OFFICIAL_SUPPLEMENT");
      supplement && *supplement) {
    options.supplement_path = supplement;
  }
  options.template_dir = kSource / "data" / "templates";
  options.task_config_path = kSource / "data" / "config.json";
  options.out_dir = ws.root / "tree";
  const auto start = std::chrono::steady_clock::now();
  const RunResult result = run(options);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (result.exit_code != kExitOk) return fail("run exited with " + std::to_string(result.exit_code));
  const auto all = static_cast<long>(result.all_procedures);
  const auto f08 = static_cast<long>(result.f08_procedures);
  const auto f08_wrapped = static_cast<long>(result.tree->families.at(BindingFamily::kF08).procedures);
  std::ostringstream detail;
  detail << "all=" << all << " (" << std::showpos << all - 491 << std::noshowpos << ") f08=" << f08
         << " (" << std::showpos << f08 - 393 << std::noshowpos << ") f08 wrappers=" << f08_wrapped
         << " time=" << seconds << "s";
  const bool within = std::labs(all - 491) <= 5 && std::labs(f08 - 393) <= 5;
  if (within && f08_wrapped == f08 && seconds < 5.0) return pass(detail.str());
  return fail(detail.str() + " (expected 491 / 393 within 5, under 5 s)");
}

Verdict golden_send() {
  const ApiSpec spec = fixture_spec();
  const ProcedureSpec& send = query_procedure(spec, "MPI_Send");
  const std::vector<ManglingScheme> schemes = {{CaseRule::kLower, 1}};
  const SymbolVariant variant = f08_symbol_variants(send, schemes, false).front();
  const WrapperUnit unit =
      render_wrapper(send, BindingFamily::kF08,
                     compose(shipped_config(spec).instances_for("MPI_Send"), BindingFamily::kF08),
                     variant);
  const std::string golden = read_file(fs::path(MPIWRAPGEN_GOLDEN_DIR) / "MPI_Send_f08.F90");
  if (golden.empty()) return fail("golden file missing");
  if (unit.text != golden) return fail("rendered MPI_Send_f08 differs from golden");
  const std::array<std::string, 5> required = {
      "#if defined(HAVE_F08_MPI_SEND)", "integer :: send_type_size",
      "call write_event(\"ENTER MPI_Send\")", "call PMPI_Send_f08(buf, count, datatype, dest",
      "call write_event(\"EXIT MPI_Send\")"};
  std::size_t last = 0;
  for (const auto& r : required) {
    const auto pos = unit.text.find(r);
    if (pos == std::string::npos || pos < last) return fail("out of order or missing: " + r);
    last = pos;
  }
  return pass("byte-identical to golden");
}

HookFragments hook_union(const HookFragments& a, const HookFragments& b) {
  HookFragments out = a;
  for (const auto& [hook, fragments] : b) {
    out[hook].insert(out[hook].end(), fragments.begin(), fragments.end());
  }
  return out;
}

Verdict sendrecv_law() {
  const ApiSpec spec = fixture_spec();
  const TaskConfig config = shipped_config(spec);
  for (auto family : {BindingFamily::kC, BindingFamily::kF08}) {
    const auto sendrecv = compose_abstract(config.instances_for("MPI_Sendrecv"), family);
    const auto expected = hook_union(compose_abstract(config.instances_for("MPI_Send"), family),
                                     compose_abstract(config.instances_for("MPI_Recv"), family));
    if (sendrecv.empty()) return fail("MPI_Sendrecv has no task fragments");
    if (sendrecv != expected) {
      return fail(std::string(family_label(family)) + " fragments differ from Send + Recv");
    }
  }
  return pass("c and f08 fragments equal Send + Recv");
}

std::string oracle_symbol(const std::string& base, const ManglingScheme& scheme) {
  std::string out;
  for (char c : base) {
    const auto u = static_cast<unsigned char>(c);
    out += scheme.case_rule == CaseRule::kUpper ? static_cast<char>(std::toupper(u))
                                                : static_cast<char>(std::tolower(u));
  }
  return out + std::string(scheme.underscore_suffix_count, '_');
}

Verdict variant_count_law() {
  const ApiSpec spec = fixture_spec();
  const std::vector<ManglingScheme> schemes(kSchemeTable.begin(), kSchemeTable.end());
  const auto procedures = enumerate_procedures(spec, FamilyFilter::kAll);
  if (procedures.size() != 50) return fail("fixture has " + std::to_string(procedures.size()));
  std::size_t symbols = 0;
  for (const auto& p : procedures) {
    const std::size_t per_scheme = p.has_buffer() ? 2 : 1;
    if (p.has_fortran_binding) {
      const auto vs = fortran_symbol_variants(p, schemes, false);
      if (vs.size() != per_scheme * schemes.size()) return fail(p.name + " fortran count");
      std::set<std::string> unique;
      for (const auto& v : vs) {
        const std::string base = p.name + (v.descriptor_suffix == DescriptorSuffix::kFts ? "_fts" : "");
        if (v.symbol != oracle_symbol(base, v.scheme)) return fail(v.symbol + " != " + base);
        unique.insert(v.symbol);
      }
      if (unique.size() != vs.size()) return fail(p.name + " duplicate fortran symbol");
      symbols += vs.size();
    }
    if (p.has_f08_binding) {
      const auto vs = f08_symbol_variants(p, schemes, false, true);
      const std::size_t factor = p.has_large_count_variant ? 2 : 1;
      if (vs.size() != per_scheme * schemes.size() * factor) return fail(p.name + " f08 count");
      std::set<std::string> unique;
      for (const auto& v : vs) {
        const std::string base = p.name + (v.large_count ? "_c" : "") +
                                 (v.descriptor_suffix == DescriptorSuffix::kF08ts ? "_f08ts" : "_f08");
        if (v.symbol != oracle_symbol(base, v.scheme)) return fail(v.symbol + " != " + base);
        unique.insert(v.symbol);
      }
      if (unique.size() != vs.size()) return fail(p.name + " duplicate f08 symbol");
      symbols += vs.size();
    }
  }
  return pass("50 procedures, " + std::to_string(symbols) + " symbols recomputed");
}

Verdict issue_matrix() {
  // Rows 1..11; legacy layer column, then f08 column.
  constexpr std::array<std::array<bool, 2>, kIssueCount> kExpected = {{
      {false, true}, {true, true},  {false, true}, {false, true}, {false, true}, {true, true},
      {true, true},  {true, true},  {true, true},  {true, true},  {false, true},
  }};
  const auto legacy = issue_support_matrix(BindingFamily::kFortran);
  const auto f08 = issue_support_matrix(BindingFamily::kF08);
  int cells = 0;
  for (int i = 0; i < kIssueCount; ++i) {
    if (legacy[i].issue != i + 1 || f08[i].issue != i + 1) return fail("row order");
    if (legacy[i].handled != kExpected[i][0]) return fail("legacy issue " + std::to_string(i + 1));
    if (f08[i].handled != kExpected[i][1]) return fail("f08 issue " + std::to_string(i + 1));
    cells += 2;
  }
  return pass(std::to_string(cells) + " cells match");
}

struct Block {
  std::string file;
  std::string text;
};

std::vector<Block> guarded_blocks(const std::map<std::string, std::string>& files,
                                  const std::string& directory) {
  static const std::regex open(R"(#if defined\((HAVE_[A-Z0-9_]+)\))");
  std::vector<Block> out;
  for (const auto& [path, content] : files) {
    if (!path.starts_with(directory) || path.find("tool_interface") != std::string::npos) continue;
    for (std::sregex_iterator it(content.begin(), content.end(), open), end; it != end; ++it) {
      const std::string close = "#endif /* " + std::string((*it)[1]) + " */";
      const auto start = static_cast<std::size_t>(it->position());
      const auto stop = content.find(close, start);
      if (stop != std::string::npos) out.push_back({path, content.substr(start, stop - start)});
    }
  }
  return out;
}

Verdict same_language_law() {
  Workspace ws;
  if (shell(cli_fixture_command(ws.root / "tree")) != 0) return fail("generator run failed");
  const auto files = snapshot(ws.root / "tree");
  const ApiSpec spec = fixture_spec();

  static const std::regex head(R"((?:subroutine|function) (MPI_[A-Za-z0-9_]+)\()");
  static const std::regex pmpi_call(R"(call (P?MPI_[A-Za-z0-9_]+)\()");
  std::size_t checked = 0;
  for (const auto& b : guarded_blocks(files, "f08/")) {
    std::smatch m;
    if (!std::regex_search(b.text, m, head)) return fail("unparsable f08 block in " + b.file);
    const std::string specific = m[1];
    std::string name = specific;
    for (const char* suffix : {"_f08ts", "_f08", "_c"}) {
      const std::string s(suffix);
      if (name.ends_with(s)) name.resize(name.size() - s.size());
    }
    if (!needs_same_language_pmpi(query_procedure(spec, name))) continue;
    bool delegated = false;
    for (std::sregex_iterator it(b.text.begin(), b.text.end(), pmpi_call), end; it != end; ++it) {
      const std::string callee = (*it)[1];
      if (!callee.starts_with("P" + name)) continue;
      if (!callee.ends_with("_f08") && !callee.ends_with("_f08ts")) {
        return fail(specific + " delegates to non-f08 " + callee);
      }
      delegated = true;
    }
    if (!delegated) return fail(specific + " has no PMPI delegation");
    ++checked;
  }

  static const std::regex fortran_pmpi(R"(\b(pmpi_[a-z0-9_]+|PMPI_[A-Z0-9_]+)\s*\()");
  std::size_t intercepts = 0;
  for (const auto& b : guarded_blocks(files, "f/")) {
    if (std::regex_search(b.text, fortran_pmpi)) return fail("intercept calls a Fortran PMPI symbol");
    ++intercepts;
  }
  if (checked == 0 || intercepts == 0) return fail("nothing checked");
  return pass(std::to_string(checked) + " f08 wrappers, " + std::to_string(intercepts) +
              " intercepts");
}

Verdict marshal_properties() {
  for (ParamKind kind : kAllParamKinds) {
    for (auto dir : {BoundaryDirection::kToC, BoundaryDirection::kToFortran}) {
      ParameterSpec p;
      p.name = "arg";
      p.kind = kind;
      const auto plan = marshal_plan(p, dir);
      if (plan.empty()) return fail(std::string("empty plan for ") + std::string(to_string(kind)));
    }
  }
  std::mt19937_64 rng(1234);
  std::uniform_int_distribution<long long> index(-(1LL << 40), 1LL << 40);
  for (int i = 0; i < 1000; ++i) {
    const long long v = index(rng);
    if (apply_index_offset(apply_index_offset(v, BoundaryDirection::kToC),
                           BoundaryDirection::kToFortran) != v) {
      return fail("INDEX_OFFSET round trip at " + std::to_string(v));
    }
  }
  static constexpr std::string_view kAlphabet = "   abcXYZ_=:09 ";
  std::uniform_int_distribution<std::size_t> length(0, 32);
  std::uniform_int_distribution<std::size_t> pick(0, kAlphabet.size() - 1);
  for (int i = 0; i < 1000; ++i) {
    std::string s(length(rng), ' ');
    for (char& c : s) c = kAlphabet[pick(rng)];
    const std::string once = apply_info_trim(s);
    if (apply_info_trim(once) != once) return fail("INFO_TRIM not idempotent on '" + s + "'");
  }
  return pass(std::to_string(kAllParamKinds.size()) +
              " kinds total; 1000 INDEX_OFFSET and 1000 INFO_TRIM samples");
}

Verdict determinism() {
  Workspace ws;
  if (shell(cli_fixture_command(ws.root / "a")) != 0) return fail("first run failed");
  if (shell(cli_fixture_command(ws.root / "b", " --jobs 8")) != 0) return fail("parallel run failed");
  const auto a = snapshot(ws.root / "a");
  if (snapshot(ws.root / "b") != a) return fail("parallel tree differs");
  if (shell(cli_fixture_command(ws.root / "a", " --jobs 3")) != 0) return fail("rerun failed");
  if (snapshot(ws.root / "a") != a) return fail("rerun changed the tree");
  return pass(std::to_string(a.size()) + " files identical across 3 runs");
}

Verdict check_manifest() {
  const ApiSpec spec = fixture_spec();
  const std::vector<ManglingScheme> schemes(kSchemeTable.begin(), kSchemeTable.end());
  const auto checks = generate_check_manifest(spec, schemes);
  std::size_t modules = 0;
  std::size_t candidates = 0;
  for (const auto& c : checks) {
    if (c.kind == CheckKind::kModuleAccessibility) ++modules;
    if (c.kind != CheckKind::kSymbolPresence) continue;
    const ProcedureSpec& proc = query_procedure(spec, c.procedure);
    std::set<std::string> oracle;
    for (const auto& v : f08_symbol_variants(proc, schemes, false, true)) oracle.insert(v.symbol);
    for (const auto& candidate : c.candidates) {
      if (!oracle.contains(candidate)) return fail(candidate + " is not a bindings symbol");
      ++candidates;
    }
  }
  const std::size_t f08 = enumerate_procedures(spec, FamilyFilter::kF08).size();
  if (modules != f08) {
    return fail(std::to_string(modules) + " module checks for " + std::to_string(f08) +
                " f08 procedures");
  }
  return pass(std::to_string(modules) + " module checks, " + std::to_string(candidates) +
              " candidates revalidated");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"official_counts_491_393", official_counts},
      {"golden_mpi_send_f08", golden_send},
      {"sendrecv_law", sendrecv_law},
      {"variant_count_law", variant_count_law},
      {"issue_matrix_22_cells", issue_matrix},
      {"same_language_pmpi_law", same_language_law},
      {"marshal_totality_and_properties", marshal_properties},
      {"determinism", determinism},
      {"check_manifest", check_manifest},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = fail(std::string("exception: ") + e.what());
    }
    const char* label = v.outcome == Outcome::kPass   ? "PASS"
                        : v.outcome == Outcome::kFail ? "FAIL"
                                                      : "SKIP";
    if (v.outcome == Outcome::kFail) ++failures;
    std::cout << label << " " << name;
    if (!v.detail.empty()) std::cout << ": " << v.detail;
    std::cout << "\n";
  }
  return failures == 0 ? 0 : 1;
}
