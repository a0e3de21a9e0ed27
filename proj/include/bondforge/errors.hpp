#pragma once

#include <stdexcept>
#include <string>

namespace bondforge {

/// Malformed or inadmissible input; `field` is a path such as "joints[2].dh.w".
class InputError : public std::invalid_argument {
 public:
  InputError(std::string field, const std::string& what)
      : std::invalid_argument(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// A computed result contradicts a structural theorem or a consistency check.
class AnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bondforge
