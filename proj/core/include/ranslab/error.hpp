#pragma once

#include <stdexcept>
#include <string>

namespace ranslab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class InvalidMesh : public Error {
 public:
  using Error::Error;
};

class MappingFailure : public Error {
 public:
  using Error::Error;
};

/// Ill-shaped expression (e.g. inner product of a vector and a scalar).
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A term that is not linear in the trial function was handed to lhs/rhs.
class NonlinearityError : public Error {
 public:
  using Error::Error;
};

class AssemblyError : public Error {
 public:
  using Error::Error;
};

class SingularMatrix : public Error {
 public:
  using Error::Error;
};

class ConstraintError : public Error {
 public:
  using Error::Error;
};

class ConfigurationError : public Error {
 public:
  using Error::Error;
};

class LookupError : public Error {
 public:
  using Error::Error;
};

/// Formula references a name that is not bound in the namespace.
class NamespaceError : public Error {
 public:
  using Error::Error;
};

/// Derived quantity mode cannot be applied to its formula.
class ModeError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

/// Linear solver failure annotated with the scheme that triggered it.
class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace ranslab
