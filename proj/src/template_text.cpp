#include "mpiwrapgen/template_text.hpp"

#include <algorithm>

#include "mpiwrapgen/diagnostics.hpp"

namespace mpiwrapgen {

namespace {

// Calls on_text for literal runs and on_name for placeholders. Returns false
// on an unterminated placeholder.
template <typename OnText, typename OnName>
bool scan(std::string_view text, OnText on_text, OnName on_name) {
  std::size_t i = 0;
  while (i < text.size()) {
    const auto dollar = text.find('$', i);
    if (dollar == std::string_view::npos) {
      on_text(text.substr(i));
      return true;
    }
    on_text(text.substr(i, dollar - i));
    if (text.substr(dollar).starts_with("$${")) {
      on_text("${");
      i = dollar + 3;
      continue;
    }
    if (text.substr(dollar).starts_with("${")) {
      const auto close = text.find('}', dollar + 2);
      if (close == std::string_view::npos) return false;
      on_name(text.substr(dollar + 2, close - dollar - 2));
      i = close + 1;
      continue;
    }
    on_text("$");
    i = dollar + 1;
  }
  return true;
}

}  // namespace

std::vector<std::string> placeholder_names(std::string_view text) {
  std::vector<std::string> names;
  scan(
      text, [](std::string_view) {},
      [&](std::string_view name) {
        if (std::find(names.begin(), names.end(), name) == names.end()) {
          names.emplace_back(name);
        }
      });
  return names;
}

std::string substitute(std::string_view text,
                       const std::map<std::string, std::string, std::less<>>& values,
                       std::string_view where) {
  std::string out;
  std::string missing;
  const bool closed = scan(
      text, [&](std::string_view literal) { out += literal; },
      [&](std::string_view name) {
        auto it = values.find(name);
        if (it == values.end()) {
          if (missing.empty()) missing = std::string(name);
          return;
        }
        out += it->second;
      });
  if (!closed) {
    throw ValidationError(std::string(where), "unterminated placeholder");
  }
  if (!missing.empty()) {
    throw ValidationError(std::string(where), "unresolved placeholder '${" + missing + "}'");
  }
  return out;
}

bool has_placeholder(std::string_view text) {
  bool found = false;
  const bool closed = scan(
      text, [](std::string_view) {}, [&](std::string_view) { found = true; });
  return found || !closed;
}

}  // namespace mpiwrapgen
