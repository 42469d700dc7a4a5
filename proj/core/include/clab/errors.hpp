#ifndef CLAB_ERRORS_HPP
#define CLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace clab {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A structural invariant of an input object fails (bad table, bad
// permutation, dimension mismatch, cocycle equation violated).
class ConsistencyError : public Error {
public:
  using Error::Error;
};

// A documented precondition of an operation is not met.
class PreconditionError : public Error {
public:
  using Error::Error;
};

// An enumeration would exceed the configured size guard.
class SizeGuardError : public Error {
public:
  using Error::Error;
};

// Two routes that must agree disagreed, or a verified witness failed
// re-verification.  Always a bug, never a data error.
class InternalError : public Error {
public:
  using Error::Error;
};

// Averaged operator has no usable spectral gap (degenerate guess).
class NoGapError : public Error {
public:
  using Error::Error;
};

// A cocycle admits no Host-Kra solution set for some translation.
class NotCLSystemError : public Error {
public:
  using Error::Error;
};

// Group action fails to be transitive where a certificate needs it.
class NotTransitiveError : public Error {
public:
  using Error::Error;
};

// A translational certificate check failed.
class CertificateError : public Error {
public:
  using Error::Error;
};

// Malformed input file or JSON.
class ParseError : public Error {
public:
  using Error::Error;
};

} // namespace clab

#endif
