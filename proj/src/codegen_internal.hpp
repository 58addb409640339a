#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mpiwrapgen/tasks.hpp"

namespace mpiwrapgen::detail {

inline constexpr std::string_view kIndent = "    ";

std::string upper(std::string_view text);
std::string lower(std::string_view text);

/// Appends `text` line by line, each prefixed with `indent`; blank lines stay
/// empty.
void append_lines(std::string& out, std::string_view text, std::string_view indent);

/// Appends every fragment of `hook`.
void append_hook(std::string& out, const HookFragments& fragments, HookPoint hook,
                 std::string_view indent);

std::string join(const std::vector<std::string>& parts, std::string_view separator);

std::string generated_banner(std::string_view comment_prefix);

/// One free-form Fortran statement, broken after commas with `&`
/// continuations when longer than 100 columns.
std::string fortran_line(const std::string& statement, const std::string& indent);

/// Appends the MPI_* names (types, kind parameters, abstract interfaces) the
/// type part of a declaration refers to, skipping ones already present.
void collect_mpi_names(const std::string& declaration, std::vector<std::string>& names);

}  // namespace mpiwrapgen::detail
