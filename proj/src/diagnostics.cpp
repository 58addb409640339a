#include "mpiwrapgen/diagnostics.hpp"

#include <algorithm>

namespace mpiwrapgen {

namespace {

std::string compose(const std::string& location, const std::string& message) {
  if (location.empty()) return message;
  return location + ": " + message;
}

}  // namespace

Error::Error(std::string location, const std::string& message)
    : std::runtime_error(compose(location, message)),
      location_(std::move(location)),
      detail_(message) {}

void Diagnostics::warn(std::string location, std::string message) {
  entries_.push_back({Severity::kWarning, std::move(location), std::move(message)});
}

void Diagnostics::error(std::string location, std::string message) {
  entries_.push_back({Severity::kError, std::move(location), std::move(message)});
}

std::size_t Diagnostics::warning_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(
      entries_.begin(), entries_.end(),
      [](const Diagnostic& d) { return d.severity == Severity::kWarning; }));
}

std::size_t Diagnostics::error_count() const noexcept {
  return entries_.size() - warning_count();
}

void Diagnostics::append(const Diagnostics& other) {
  entries_.insert(entries_.end(), other.entries_.begin(), other.entries_.end());
}

std::string format(const Diagnostic& d) {
  std::string out = d.severity == Severity::kError ? "error: " : "warning: ";
  return out + compose(d.location, d.message);
}

}  // namespace mpiwrapgen
