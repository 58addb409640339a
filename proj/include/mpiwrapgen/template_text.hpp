#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace mpiwrapgen {

// `${name}` placeholders; `$${` is a literal `${`.

/// Names referenced by placeholders, in order of first appearance.
std::vector<std::string> placeholder_names(std::string_view text);

/// Replaces every placeholder. An unknown name or an unterminated `${`
/// raises ValidationError labelled with `where`.
std::string substitute(std::string_view text,
                       const std::map<std::string, std::string, std::less<>>& values,
                       std::string_view where);

/// True if text still contains an unescaped `${`.
bool has_placeholder(std::string_view text);

}  // namespace mpiwrapgen
