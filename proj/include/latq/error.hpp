#pragma once
// Error type shared by all modules. Callers switch on kind().

#include <stdexcept>
#include <string>

namespace latq {

enum class ErrorKind {
  Parse,
  FieldMismatch,
  DivisionByZero,
  DegenerateInput,
  FitMismatch,
  Shape,
  RankDeficiency,
  Parameter,
  Resource,
  Invariance,
  Faithfulness,
  Domain,
  ClassMismatch,
  Consistency,
  Structural,
  BudgetExceeded,
  Dependency,
  Degeneracy,
  CriticalValueCrossed,
  InconsistentSample,
  Basis,
  Structure,
  Unsupported,
  Io,
};

const char* to_string(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind k, const std::string& what)
      : std::runtime_error(std::string(to_string(k)) + ": " + what), kind_(k) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind k, const std::string& what) { throw Error(k, what); }

}  // namespace latq
