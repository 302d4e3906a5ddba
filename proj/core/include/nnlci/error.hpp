#pragma once

#include <stdexcept>
#include <string>

namespace nnlci {

/// Base of every error raised by the library. Driver code maps the concrete
/// subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A solver produced (or was handed) a state with rho <= 0 or p <= 0, or a
/// value blew past the stability guard.
class NonPhysicalState : public Error {
 public:
  using Error::Error;
};

class DegenerateField : public Error {
 public:
  using Error::Error;
};

class OutOfRange : public Error {
 public:
  using Error::Error;
};

class VacuumFormation : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class GridMismatch : public Error {
 public:
  using Error::Error;
};

class VariantMismatch : public Error {
 public:
  using Error::Error;
};

class DivergedLoss : public Error {
 public:
  using Error::Error;
};

class CorruptModelFile : public Error {
 public:
  using Error::Error;
};

class CorruptDatasetFile : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Must be called from a catch block. Rethrows the active nnlci::Error as the
/// same concrete type with `context + ": "` prepended to its message; other
/// exceptions propagate unchanged.
[[noreturn]] void rethrow_with_context(const std::string& context);

}  // namespace nnlci
