#pragma once

#include <stdexcept>
#include <string>

namespace gmqso {

// Base of every error raised by the library. The CLI maps the concrete
// subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operands belong to different groups, or an element does not fit its group.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// Input outside an operation's domain (empty set, bad cyclic order, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A simplex or stochasticity constraint is violated.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A configured size/step/precision bound was exceeded.
class CapacityError : public Error {
 public:
  using Error::Error;
};

}  // namespace gmqso
