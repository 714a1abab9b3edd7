#pragma once

#include <stdexcept>
#include <string>

namespace forkvol {

/// Bad or inconsistent input data (files, series, calendars).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid combination of options or parameters supplied by the caller.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The likelihood could not be evaluated or maximized.
class EstimationError : public std::runtime_error {
 public:
  EstimationError(const std::string& what, std::string diagnostics = {})
      : std::runtime_error(what), diagnostics_(std::move(diagnostics)) {}

  const std::string& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::string diagnostics_;
};

/// A price download failed. Retriable errors are transport failures or
/// server-side 5xx responses; permanent ones are schema or client errors.
class FetchError : public std::runtime_error {
 public:
  FetchError(const std::string& what, bool retriable)
      : std::runtime_error(what), retriable_(retriable) {}

  bool retriable() const noexcept { return retriable_; }

 private:
  bool retriable_;
};

}  // namespace forkvol
