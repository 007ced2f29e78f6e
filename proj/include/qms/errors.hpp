#pragma once

#include <stdexcept>
#include <string>

namespace qms {

enum class ErrorKind {
  dimension_mismatch,
  not_hermitian,
  invalid_operator_system,
  invalid_triple,
  parity_mismatch,
  unsupported_kind,
  irrational_theta,
  invalid_weight,
  empty_space,
  invalid_metric,
  hypothesis_failed,
  config_invalid,
  io_error,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) fail(kind, what);
}

}  // namespace qms
