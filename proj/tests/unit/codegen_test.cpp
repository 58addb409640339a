#include <gtest/gtest.h>

#include <cstdlib>
#include <cstring>
#include <sstream>
#include <regex>
#include <set>

#include "mpiwrapgen/codegen.hpp"
#include "mpiwrapgen/template_text.hpp"
#include "test_support.hpp"

namespace mpiwrapgen {
namespace {

using testing::default_config;
using testing::default_templates;
using testing::fixture;

const std::vector<ManglingScheme> kLower1 = {{CaseRule::kLower, 1}};

SymbolVariant f08_variant(const ProcedureSpec& proc, DescriptorSuffix suffix, bool large = false) {
  for (const auto& v : f08_symbol_variants(proc, kLower1, false, true)) {
    if (v.descriptor_suffix == suffix && v.large_count == large) return v;
  }
  ADD_FAILURE() << "no such variant";
  return {};
}

std::size_t position(const std::string& text, const std::string& needle) {
  const auto pos = text.find(needle);
  EXPECT_NE(pos, std::string::npos) << "missing: " << needle << "\n" << text;
  return pos;
}

// One guarded wrapper as it appears in a generated file.
struct Block {
  std::string file;
  std::string guard;
  std::string text;
};

std::vector<Block> guarded_blocks(const GeneratedTree& tree) {
  static const std::regex open(R"(#if defined\((HAVE_[A-Z0-9_]+)\))");
  std::vector<Block> out;
  for (const auto& [path, content] : tree.files) {
    if (path.find("tool_interface") != std::string::npos) continue;
    for (std::sregex_iterator it(content.begin(), content.end(), open), end; it != end; ++it) {
      const std::string guard = (*it)[1];
      const std::string close = "#endif /* " + guard + " */";
      const auto start = static_cast<std::size_t>(it->position());
      const auto stop = content.find(close, start);
      if (stop == std::string::npos) continue;
      out.push_back({path, guard, content.substr(start, stop + close.size() - start)});
    }
  }
  return out;
}

const GeneratedTree& fixture_tree() {
  static const GeneratedTree tree =
      generate_tree(fixture(), default_templates(), default_config(fixture()));
  return tree;
}

TEST(GuardName, Examples) {
  const ProcedureSpec& send = query_procedure(fixture(), "MPI_Send");
  EXPECT_EQ(guard_name(send, BindingFamily::kF08, f08_variant(send, DescriptorSuffix::kF08ts)),
            "HAVE_F08_TS_BUFFERS_MPI_SEND");
  EXPECT_EQ(guard_name(send, BindingFamily::kC, c_symbol_variant(send, false)), "HAVE_C_MPI_SEND");
  EXPECT_EQ(guard_name(send, BindingFamily::kF08, f08_variant(send, DescriptorSuffix::kF08, true)),
            "HAVE_F08_MPI_SEND_C");
}

TEST(GuardName, UniqueAcrossFixture) {
  std::set<std::string> seen;
  GeneratorOptions options;
  for (const auto& p : enumerate_procedures(fixture(), FamilyFilter::kAll)) {
    for (auto family : {BindingFamily::kC, BindingFamily::kFortran, BindingFamily::kF08}) {
      if (skip_reason(p, family)) continue;
      for (const auto& v : wrapper_variants(p, family, options)) {
        EXPECT_TRUE(seen.insert(guard_name(p, family, v)).second) << p.name;
      }
    }
  }
  EXPECT_GT(seen.size(), 100u);
}

TEST(RenderWrapper, SendF08Golden) {
  const ProcedureSpec& send = query_procedure(fixture(), "MPI_Send");
  const auto fragments = compose(default_config(fixture()).instances_for("MPI_Send"),
                                 BindingFamily::kF08);
  const WrapperUnit unit = render_wrapper(send, BindingFamily::kF08, fragments,
                                          f08_variant(send, DescriptorSuffix::kF08));
  const auto golden = testing::golden_dir() / "MPI_Send_f08.F90";
  if (const char* update = std::getenv("MPIWRAPGEN_UPDATE_GOLDEN"); update && *update == '1') {
    testing::write_file(golden, unit.text);
  }
  ASSERT_TRUE(std::filesystem::exists(golden));
  EXPECT_EQ(unit.text, testing::read_file(golden));
}

TEST(RenderWrapper, SendF08Structure) {
  const ProcedureSpec& send = query_procedure(fixture(), "MPI_Send");
  const auto fragments = compose(default_config(fixture()).instances_for("MPI_Send"),
                                 BindingFamily::kF08);
  const WrapperUnit unit = render_wrapper(send, BindingFamily::kF08, fragments,
                                          f08_variant(send, DescriptorSuffix::kF08ts));
  EXPECT_EQ(unit.guard, "HAVE_F08_TS_BUFFERS_MPI_SEND");
  const std::string& t = unit.text;
  const auto guard = position(t, "#if defined(HAVE_F08_TS_BUFFERS_MPI_SEND)");
  const auto signature = position(t, "subroutine MPI_Send_f08ts(");
  const auto bytes = position(t, "integer(kind=MPI_COUNT_KIND) :: bytes_sent");
  const auto enter = position(t, "call write_event(\"ENTER MPI_Send\")");
  const auto call = position(t, "call PMPI_Send_f08ts(");
  const auto exit = position(t, "call write_event(\"EXIT MPI_Send\")");
  const auto close = position(t, "#endif /* HAVE_F08_TS_BUFFERS_MPI_SEND */");
  EXPECT_LT(guard, signature);
  EXPECT_LT(signature, bytes);
  EXPECT_LT(bytes, enter);
  EXPECT_LT(enter, call);
  EXPECT_LT(call, exit);
  EXPECT_LT(exit, close);
  EXPECT_NE(t.find("type(*), dimension(..) :: buf"), std::string::npos);
  EXPECT_FALSE(unit.required_checks.empty());
}

TEST(RenderWrapper, BarrierCMinimal) {
  const ProcedureSpec& barrier = query_procedure(fixture(), "MPI_Barrier");
  const WrapperUnit unit =
      render_wrapper(barrier, BindingFamily::kC, {}, c_symbol_variant(barrier, false));
  const std::string& t = unit.text;
  const auto enter = position(t, "write_event(\"ENTER MPI_Barrier\")");
  const auto call = position(t, "PMPI_Barrier(comm)");
  const auto exit = position(t, "write_event(\"EXIT MPI_Barrier\")");
  EXPECT_LT(enter, call);
  EXPECT_LT(call, exit);
  EXPECT_EQ(t.find("tracked_comm"), std::string::npos);
  EXPECT_EQ(t.find("bytes_"), std::string::npos);
}

TEST(RenderWrapper, SendIntercept) {
  const ProcedureSpec& send = query_procedure(fixture(), "MPI_Send");
  const auto variant = fortran_symbol_variants(send, kLower1, false).front();
  const WrapperUnit unit = render_wrapper(send, BindingFamily::kFortran, {}, variant);
  const std::string& t = unit.text;
  EXPECT_EQ(unit.guard, "HAVE_F_MPI_SEND");
  EXPECT_NE(t.find("MPI_Fint* count"), std::string::npos) << t;
  EXPECT_NE(t.find("MPI_Fint* comm"), std::string::npos) << t;
  const auto convert = position(t, "PMPI_Comm_f2c(*comm)");
  const auto call = position(t, "= MPI_Send(");
  EXPECT_LT(convert, call);
  EXPECT_EQ(t.find("pmpi_send"), std::string::npos);
}

TEST(RenderSourceFile, ListedWrappersInOrder) {
  SourceFileTemplate tmpl;
  tmpl.name = "p2p";
  tmpl.wrappers = {"MPI_Send", "MPI_Bsend"};
  const RenderedFile file = render_source_file(tmpl, BindingFamily::kC, fixture(), TaskConfig{});
  const auto send = position(file.content, "int MPI_Send(");
  const auto bsend = position(file.content, "int MPI_Bsend(");
  EXPECT_LT(send, bsend);
  EXPECT_EQ(file.procedures, 2u);
  std::set<std::string> defined;
  static const std::regex fn(R"(^int (MPI_[A-Za-z_]+)\()");
  std::istringstream lines(file.content);
  for (std::string line; std::getline(lines, line);) {
    std::smatch m;
    if (std::regex_search(line, m, fn)) defined.insert(m[1]);
  }
  EXPECT_EQ(defined, (std::set<std::string>{"MPI_Send", "MPI_Send_c", "MPI_Bsend", "MPI_Bsend_c"}));
}

TEST(RenderSourceFile, EmptyIsPreludeOnly) {
  SourceFileTemplate tmpl;
  tmpl.name = "empty";
  const RenderedFile file = render_source_file(tmpl, BindingFamily::kC, fixture(), TaskConfig{});
  EXPECT_EQ(file.content, c_file_prelude(GeneratorOptions{}));
  EXPECT_EQ(file.units, 0u);
}

TEST(RenderSourceFile, FortranOnlyInCFileIsError) {
  const ApiSpec spec = testing::parse(std::string(R"({"procedures": [)") + testing::kSyncReg + "]}");
  SourceFileTemplate tmpl;
  tmpl.name = "misc";
  tmpl.wrappers = {"MPI_F_sync_reg"};
  EXPECT_THROW(render_source_file(tmpl, BindingFamily::kC, spec, TaskConfig{}), ValidationError);
  const RenderedFile f08 = render_source_file(tmpl, BindingFamily::kF08, spec, TaskConfig{});
  EXPECT_NE(f08.content.find("subroutine MPI_F_sync_reg_f08ts("), std::string::npos);
}

TEST(ResolveTemplates, DuplicateListingIsError) {
  SourceFileTemplate a;
  a.name = "a";
  a.wrappers = {"MPI_Send"};
  SourceFileTemplate b = a;
  b.name = "b";
  EXPECT_THROW(resolve_templates({a, b}, fixture()), ValidationError);
}

TEST(ResolveTemplates, AbsentListedNameRecorded) {
  SourceFileTemplate a;
  a.name = "a";
  a.wrappers = {"MPI_Send", "MPI_Not_there"};
  const auto resolved = resolve_templates({a}, fixture());
  EXPECT_EQ(resolved.front().listed, (std::vector<std::string>{"MPI_Send"}));
  EXPECT_EQ(resolved.front().absent, (std::vector<std::string>{"MPI_Not_there"}));
}

TEST(GenerateTree, MiniFixtureFileSet) {
  const ApiSpec spec = testing::mini();
  Diagnostics diagnostics;
  const GeneratedTree tree =
      generate_tree(spec, default_templates(), default_config(spec, &diagnostics));
  std::set<std::string> paths;
  for (const auto& [path, content] : tree.files) paths.insert(path);
  std::set<std::string> expected = {"manifest.json", "checks/manifest.json", "checks/probe.sh",
                                    "f/fortran_constants.c", "f08/tool_interface.F90",
                                    "f08/tool_interface.c"};
  for (const char* name : {"coll", "comm", "io", "misc", "p2p", "rma"}) {
    expected.insert(std::string("c/") + name + ".c");
    expected.insert(std::string("f/") + name + ".c");
    expected.insert(std::string("f08/") + name + ".F90");
  }
  EXPECT_EQ(paths, expected);
  EXPECT_EQ(tree.families.at(BindingFamily::kC).procedures, 3u);
  EXPECT_EQ(tree.families.at(BindingFamily::kFortran).procedures, 3u);
  EXPECT_EQ(tree.families.at(BindingFamily::kF08).procedures, 3u);
  EXPECT_GT(tree.diagnostics.warning_count(), 0u);
}

TEST(GenerateTree, FamilyFilter) {
  GeneratorOptions options;
  options.families = {BindingFamily::kF08};
  const GeneratedTree tree =
      generate_tree(fixture(), default_templates(), default_config(fixture()), options);
  for (const auto& [path, content] : tree.files) {
    EXPECT_TRUE(path.starts_with("f08/") || path.starts_with("checks/") || path == "manifest.json")
        << path;
  }
  EXPECT_EQ(tree.families.size(), 1u);
  EXPECT_EQ(tree.families.at(BindingFamily::kF08).procedures, 48u);
}

TEST(GenerateTree, FixtureCounts) {
  const GeneratedTree& tree = fixture_tree();
  EXPECT_EQ(tree.families.at(BindingFamily::kF08).procedures,
            enumerate_procedures(fixture(), FamilyFilter::kF08).size());
  EXPECT_EQ(tree.manifest["families"]["f08"]["procedures"], 48);
}

TEST(GenerateTree, CoverageReconciliation) {
  const GeneratedTree& tree = fixture_tree();
  for (const auto& [name, proc] : fixture().procedures) {
    for (auto family : {BindingFamily::kC, BindingFamily::kFortran, BindingFamily::kF08}) {
      const std::string guard_prefix =
          "HAVE_" + std::string(family == BindingFamily::kC         ? "C_"
                                : family == BindingFamily::kFortran ? "F_"
                                                                    : "F08_");
      bool emitted = false;
      for (const auto& b : guarded_blocks(tree)) {
        if (b.guard == guard_prefix + mangle(name, {CaseRule::kUpper, 0})) emitted = true;
      }
      bool skipped = false;
      for (const auto& s : tree.skipped) {
        if (s.procedure == name && (s.family == family_label(family) || s.family == "all")) {
          EXPECT_FALSE(s.reason.empty());
          skipped = true;
        }
      }
      EXPECT_NE(emitted, skipped) << name << " " << family_label(family);
    }
  }
}

TEST(GenerateTree, NoPlaceholderSurvives) {
  for (const auto& [path, content] : fixture_tree().files) {
    if (path.ends_with(".sh")) continue;
    EXPECT_FALSE(has_placeholder(content)) << path;
  }
}

TEST(GenerateTree, EmittedTextConventions) {
  for (const auto& [path, content] : fixture_tree().files) {
    EXPECT_EQ(content.find('\r'), std::string::npos) << path;
    EXPECT_EQ(content.find('\t'), std::string::npos) << path;
    ASSERT_FALSE(content.empty()) << path;
    EXPECT_EQ(content.back(), '\n') << path;
  }
}

TEST(GenerateTree, EventBracketing) {
  for (const auto& b : guarded_blocks(fixture_tree())) {
    if (b.file.starts_with("f/")) continue;
    const auto e = b.text.find("\"ENTER ");
    const auto x = b.text.find("\"EXIT ");
    const auto call = b.text.find("PMPI_", e);
    ASSERT_NE(e, std::string::npos) << b.guard;
    ASSERT_NE(x, std::string::npos) << b.guard;
    ASSERT_NE(call, std::string::npos) << b.guard;
    EXPECT_LT(e, call) << b.guard;
    EXPECT_LT(call, x) << b.guard;
  }
}

// Same-language law: f08 wrappers of callback / attribute / buffer
// procedures delegate to an f08 PMPI specific; C wrappers to the C symbol.
TEST(GenerateTree, SameLanguagePmpiLaw) {
  std::size_t checked = 0;
  for (const auto& b : guarded_blocks(fixture_tree())) {
    if (!b.file.starts_with("f08/") && !b.file.starts_with("c/")) continue;
    static const std::regex head(R"((?:subroutine|function|int|double|MPI_[A-Za-z]+) (MPI_[A-Za-z0-9_]+)\()");
    std::smatch m;
    ASSERT_TRUE(std::regex_search(b.text, m, head)) << b.guard;
    std::string specific = m[1];
    std::string procedure = specific;
    for (const char* suffix : {"_f08ts", "_f08", "_c"}) {
      if (procedure.ends_with(suffix)) procedure.resize(procedure.size() - std::strlen(suffix));
    }
    const ProcedureSpec& proc = query_procedure(fixture(), procedure);
    if (!needs_same_language_pmpi(proc)) continue;
    const std::regex delegation("P" + specific + R"(\()");
    EXPECT_TRUE(std::regex_search(b.text, delegation)) << b.guard;
    if (b.file.starts_with("f08/")) {
      EXPECT_TRUE(specific.ends_with("_f08") || specific.ends_with("_f08ts")) << b.guard;
      EXPECT_EQ(b.text.find("bind(C"), std::string::npos) << b.guard;
    }
    ++checked;
  }
  EXPECT_GT(checked, 40u);
}

TEST(GenerateTree, InterceptNeverCallsFortranPmpi) {
  static const std::regex fortran_pmpi(R"(\b(pmpi_[a-z0-9_]+|PMPI_[A-Z0-9_]+)\s*\()");
  std::size_t blocks = 0;
  for (const auto& b : guarded_blocks(fixture_tree())) {
    if (!b.file.starts_with("f/")) continue;
    EXPECT_FALSE(std::regex_search(b.text, fortran_pmpi)) << b.guard;
    ++blocks;
  }
  EXPECT_EQ(blocks, fixture_tree().families.at(BindingFamily::kFortran).units);
}

TEST(GenerateTree, DeterministicAcrossRunsAndThreads) {
  GeneratorOptions parallel;
  parallel.jobs = 8;
  const GeneratedTree again =
      generate_tree(fixture(), default_templates(), default_config(fixture()));
  const GeneratedTree threaded =
      generate_tree(fixture(), default_templates(), default_config(fixture()), parallel);
  EXPECT_EQ(again.files, fixture_tree().files);
  EXPECT_EQ(threaded.files, fixture_tree().files);
}

TEST(RenderToolShim, StatusArgumentUsesTaggedCarrier) {
  const EventSignature sig{"record_status", {{"status", ParamKind::kStatus, Direction::kIn}}, false};
  const ToolShim shim =
      render_tool_shim(sig, status_strategy(false, LanguageTag::kF08));
  EXPECT_FALSE(shim.c_status_support.empty());
  EXPECT_NE(shim.c_status_support.find("carrier->lang == MPIWRAPGEN_LANG_C"), std::string::npos);
  EXPECT_NE(shim.c_status_support.find("carrier->lang == MPIWRAPGEN_LANG_F08"), std::string::npos);
  EXPECT_FALSE(shim.direct());
}

TEST(RenderToolShim, IntegerOnlyIsDirect) {
  const EventSignature sig{"record_value", {{"value", ParamKind::kOtherInt, Direction::kIn}}, false};
  const ToolShim shim = render_tool_shim(sig, status_strategy(false, LanguageTag::kF08));
  EXPECT_TRUE(shim.direct());
  EXPECT_EQ(shim.conversion_layers(), 0);
  EXPECT_TRUE(shim.c_entry.empty());
}

TEST(RenderToolShim, StringAndLogicalUseBothLayers) {
  const EventSignature sig{"note",
                           {{"text", ParamKind::kString, Direction::kIn},
                            {"flag", ParamKind::kLogicalFlag, Direction::kIn}},
                           false};
  const ToolShim shim = render_tool_shim(sig, status_strategy(false, LanguageTag::kF08));
  EXPECT_TRUE(shim.fortran_layer);
  EXPECT_TRUE(shim.c_layer);
  EXPECT_EQ(shim.conversion_layers(), 2);
}

TEST(ToolInterface, DefaultSignaturesRender) {
  const auto files = render_tool_interface(default_event_signatures(GeneratorOptions{}),
                                           status_strategy(false, LanguageTag::kF08));
  EXPECT_NE(files.fortran.find("module mpiwrapgen_tool"), std::string::npos);
  EXPECT_NE(files.fortran.find("event_gen_active"), std::string::npos);
  EXPECT_NE(files.c.find("mpiwrapgen_status_query"), std::string::npos);
}

}  // namespace
}  // namespace mpiwrapgen
