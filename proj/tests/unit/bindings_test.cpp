#include <gtest/gtest.h>

#include <cctype>
#include <set>

#include "mpiwrapgen/bindings.hpp"
#include "test_support.hpp"

namespace mpiwrapgen {
namespace {

using testing::fixture_spec;
using testing::load;

std::vector<std::string> symbols(const std::vector<SymbolVariant>& variants) {
  std::vector<std::string> out;
  for (const auto& v : variants) out.push_back(v.symbol);
  return out;
}

// Independent mangling oracle: the rule written out character by character.
std::string oracle_mangle(const std::string& name, const ManglingScheme& scheme) {
  std::string out;
  for (char c : name) {
    if (scheme.case_rule == CaseRule::kLower) {
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (scheme.case_rule == CaseRule::kUpper) {
      out += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    } else {
      out += c;
    }
  }
  return out + std::string(scheme.underscore_suffix_count, '_');
}

const std::vector<ManglingScheme> kLower1 = {{CaseRule::kLower, 1}};

TEST(Mangle, Examples) {
  EXPECT_EQ(mangle("MPI_Send", {CaseRule::kLower, 1}), "mpi_send_");
  EXPECT_EQ(mangle("MPI_Send", kPreserveScheme), "MPI_Send");
  EXPECT_EQ(mangle("MPI_Send", {CaseRule::kUpper, 2}), "MPI_SEND__");
}

TEST(Mangle, MatchesOracleAndIsInjective) {
  const auto procs = enumerate_procedures(fixture_spec(), FamilyFilter::kAll);
  for (const auto& scheme : kSchemeTable) {
    std::set<std::string> seen;
    for (const auto& p : procs) {
      const std::string m = mangle(p.name, scheme);
      EXPECT_EQ(m, oracle_mangle(p.name, scheme));
      EXPECT_TRUE(seen.insert(m).second) << m;
    }
  }
}

TEST(SchemeTable, SixSchemesWithoutPreserve) {
  EXPECT_EQ(kSchemeTable.size(), 6u);
  for (const auto& s : kSchemeTable) {
    EXPECT_NE(s.case_rule, CaseRule::kPreserve);
    EXPECT_EQ(parse_scheme(to_string(s)), s);
  }
  EXPECT_FALSE(parse_scheme("lower/3").has_value());
  EXPECT_FALSE(parse_scheme("sideways/1").has_value());
}

TEST(FortranSymbolVariants, SendPmpi) {
  const ProcedureSpec& send = query_procedure(testing::mini(), "MPI_Send");
  EXPECT_EQ(symbols(fortran_symbol_variants(send, kLower1, true)),
            (std::vector<std::string>{"pmpi_send_", "pmpi_send_fts_"}));
}

TEST(FortranSymbolVariants, NoBufferSingleVariant) {
  const ProcedureSpec& rank = query_procedure(testing::fixture(), "MPI_Comm_rank");
  EXPECT_EQ(symbols(fortran_symbol_variants(rank, kLower1, false)),
            (std::vector<std::string>{"mpi_comm_rank_"}));
}

TEST(FortranSymbolVariants, TwoSchemesGiveFour) {
  const ProcedureSpec& send = query_procedure(testing::mini(), "MPI_Send");
  const std::vector<ManglingScheme> schemes = {{CaseRule::kLower, 1}, {CaseRule::kLower, 2}};
  EXPECT_EQ(symbols(fortran_symbol_variants(send, schemes, false)),
            (std::vector<std::string>{"mpi_send_", "mpi_send_fts_", "mpi_send__",
                                      "mpi_send_fts__"}));
}

TEST(FortranSymbolVariants, NoFortranBindingIsContractError) {
  const ProcedureSpec& f2c = query_procedure(testing::fixture(), "MPI_Comm_f2c");
  EXPECT_THROW(fortran_symbol_variants(f2c, kLower1, false), ContractError);
}

TEST(F08SymbolVariants, Send) {
  const ProcedureSpec& send = query_procedure(testing::mini(), "MPI_Send");
  EXPECT_EQ(symbols(f08_symbol_variants(send, kLower1, false)),
            (std::vector<std::string>{"mpi_send_f08_", "mpi_send_f08ts_"}));
}

TEST(F08SymbolVariants, Barrier) {
  const ProcedureSpec& barrier = query_procedure(testing::fixture(), "MPI_Barrier");
  EXPECT_EQ(symbols(f08_symbol_variants(barrier, kLower1, false)),
            (std::vector<std::string>{"mpi_barrier_f08_"}));
}

TEST(F08SymbolVariants, LargeCountMarkerPrecedesDescriptorSuffix) {
  const ProcedureSpec& send = query_procedure(testing::mini(), "MPI_Send");
  ASSERT_TRUE(send.has_large_count_variant);
  EXPECT_EQ(symbols(f08_symbol_variants(send, kLower1, false, true)),
            (std::vector<std::string>{"mpi_send_f08_", "mpi_send_f08ts_", "mpi_send_c_f08_",
                                      "mpi_send_c_f08ts_"}));
}

TEST(F08SymbolVariants, NoF08BindingIsContractError) {
  const ProcedureSpec& address = query_procedure(testing::fixture(), "MPI_Address");
  EXPECT_THROW(f08_symbol_variants(address, kLower1, false), ContractError);
}

// Variant-count law and symbol recomputation over the whole fixture.
TEST(SymbolVariants, CountLawAndRecomputation) {
  const std::vector<ManglingScheme> schemes(kSchemeTable.begin(), kSchemeTable.end());
  for (const auto& p : enumerate_procedures(fixture_spec(), FamilyFilter::kAll)) {
    const std::size_t per_scheme = 1 + (p.has_buffer() ? 1 : 0);
    if (p.has_fortran_binding) {
      const auto vs = fortran_symbol_variants(p, schemes, false);
      EXPECT_EQ(vs.size(), per_scheme * schemes.size()) << p.name;
      std::set<std::string> unique;
      for (const auto& v : vs) {
        EXPECT_EQ(v.family, BindingFamily::kFortran);
        EXPECT_TRUE(v.descriptor_suffix == DescriptorSuffix::kNone ||
                    v.descriptor_suffix == DescriptorSuffix::kFts);
        EXPECT_EQ(v.symbol, oracle_mangle(v.procedure + std::string(suffix_text(v.descriptor_suffix)),
                                          v.scheme));
        unique.insert(v.symbol);
      }
      EXPECT_EQ(unique.size(), vs.size()) << p.name;
    }
    if (p.has_f08_binding) {
      const auto vs = f08_symbol_variants(p, schemes, false, true);
      const std::size_t factor = p.has_large_count_variant ? 2 : 1;
      EXPECT_EQ(vs.size(), per_scheme * schemes.size() * factor) << p.name;
      std::set<std::string> unique;
      for (const auto& v : vs) {
        EXPECT_EQ(v.family, BindingFamily::kF08);
        EXPECT_TRUE(v.descriptor_suffix == DescriptorSuffix::kF08 ||
                    v.descriptor_suffix == DescriptorSuffix::kF08ts);
        const std::string base = v.procedure + (v.large_count ? "_c" : "") +
                                 std::string(suffix_text(v.descriptor_suffix));
        EXPECT_EQ(v.symbol, oracle_mangle(base, v.scheme));
        unique.insert(v.symbol);
      }
      EXPECT_EQ(unique.size(), vs.size()) << p.name;
    }
  }
}

TEST(SymbolVariants, PmpiDiffersOnlyByPrefix) {
  const ProcedureSpec& send = query_procedure(testing::mini(), "MPI_Send");
  const std::vector<ManglingScheme> schemes(kSchemeTable.begin(), kSchemeTable.end());
  const auto plain = f08_symbol_variants(send, schemes, false, true);
  const auto profiled = f08_symbol_variants(send, schemes, true, true);
  ASSERT_EQ(plain.size(), profiled.size());
  for (std::size_t i = 0; i < plain.size(); ++i) {
    EXPECT_EQ(profiled[i].symbol, mangle("P" + plain[i].specific(), plain[i].scheme));
  }
}

TEST(CSymbolVariant, PreserveSchemeNoSuffix) {
  const ProcedureSpec& send = query_procedure(testing::mini(), "MPI_Send");
  const SymbolVariant v = c_symbol_variant(send, true);
  EXPECT_EQ(v.symbol, "PMPI_Send");
  EXPECT_EQ(v.scheme, kPreserveScheme);
  EXPECT_EQ(v.descriptor_suffix, DescriptorSuffix::kNone);
  EXPECT_EQ(c_symbol_variant(send, false, true).symbol, "MPI_Send_c");
}

TEST(RenderCPrototype, Send) {
  const ProcedureSpec& send = query_procedure(testing::mini(), "MPI_Send");
  EXPECT_EQ(render_c_prototype(send),
            "int MPI_Send(const void* buf, int count, MPI_Datatype datatype, int dest, int tag, "
            "MPI_Comm comm)");
  EXPECT_EQ(render_c_prototype(send, true),
            "int MPI_Send_c(const void* buf, MPI_Count count, MPI_Datatype datatype, int dest, "
            "int tag, MPI_Comm comm)");
}

TEST(RenderCPrototype, Barrier) {
  const ProcedureSpec& barrier = query_procedure(testing::fixture(), "MPI_Barrier");
  EXPECT_EQ(render_c_prototype(barrier), "int MPI_Barrier(MPI_Comm comm)");
}

TEST(RenderCPrototype, FortranOnlyIsContractError) {
  EXPECT_THROW(render_c_prototype(testing::parse_one(testing::kSyncReg)), ContractError);
}

TEST(CParameterDeclaration, ExactDeclarator) {
  const ProcedureSpec p = testing::parse_one(R"({"name": "MPI_Foo", "parameters": [
      {"name": "argv", "kind": "OTHER_OPAQUE", "c_type": "char", "c_pointers": 3},
      {"name": "ranges", "kind": "OTHER_INT", "c_type": "int", "c_pointers": 0, "c_array": "[][3]"},
      {"name": "names", "kind": "OTHER_OPAQUE", "c_type": "char", "c_pointers": 1, "c_const": true,
       "c_array": "[]"}]})");
  EXPECT_EQ(c_parameter_declaration(p.parameters[0], false), "char*** argv");
  EXPECT_EQ(c_parameter_declaration(p.parameters[1], false), "int ranges[][3]");
  EXPECT_EQ(c_parameter_declaration(p.parameters[2], false), "const char* names[]");
}

TEST(RenderF08Interface, SendLines) {
  const ProcedureSpec& send = query_procedure(testing::mini(), "MPI_Send");
  const std::string text = render_f08_interface(send);
  EXPECT_NE(text.find("type(*), dimension(..) :: buf"), std::string::npos) << text;
  EXPECT_NE(text.find("type(MPI_Comm), intent(in) :: comm"), std::string::npos) << text;
  EXPECT_NE(text.find("integer, optional, intent(out) :: ierror"), std::string::npos) << text;
}

TEST(RenderF08Interface, StatusIsDerivedType) {
  const ProcedureSpec& recv = query_procedure(testing::mini(), "MPI_Recv");
  EXPECT_NE(render_f08_interface(recv).find("type(MPI_Status)"), std::string::npos);
}

TEST(FortranParameterOrder, ErrorCodeLastAndCOnlyDropped) {
  for (const auto& p : enumerate_procedures(fixture_spec(), FamilyFilter::kFortran)) {
    const auto params = fortran_parameter_order(p);
    for (std::size_t i = 0; i < params.size(); ++i) {
      EXPECT_FALSE(params[i].c_only) << p.name;
      if (params[i].kind == ParamKind::kErrorCode) EXPECT_EQ(i + 1, params.size()) << p.name;
    }
  }
}

}  // namespace
}  // namespace mpiwrapgen
