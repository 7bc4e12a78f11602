#pragma once

#include <stdexcept>
#include <string>

namespace lorenz {

// Exit-code classes used by the CLI. Library code throws, the dispatcher maps.
enum class ErrorKind {
  Domain,        // argument outside the map's domain (x = 0, |x| > 1)
  Precondition,  // operation precondition violated
  Hypothesis,    // a modelling hypothesis (axiom, ball-fraction bound) fails
  Config,        // malformed configuration / CLI input
  Internal,      // numerical routine failed where it provably should not
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorKind::Precondition, what);
}

inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Hypothesis:
      return 2;
    case ErrorKind::Domain:
    case ErrorKind::Precondition:
    case ErrorKind::Internal:
      return 3;
    case ErrorKind::Config:
      return 4;
  }
  return 3;
}

}  // namespace lorenz
