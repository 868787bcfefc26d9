#ifndef PMCF_ERRORS_HPP
#define PMCF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pmcf {

//! Base class of every error raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error { public: using Error::Error; };

// domain / mesh
class NonConvexDomain : public Error { public: using Error::Error; };
class MeshSizeTooLarge : public Error { public: using Error::Error; };
class UnsupportedVersion : public Error { public: using Error::Error; };
class DanglingVertexReference : public Error { public: using Error::Error; };

class MalformedSection : public Error
{
public:
  MalformedSection(std::string section, int line, const std::string& what)
    : Error("malformed section " + section + " at line " + std::to_string(line) + ": " + what)
    , section_(std::move(section))
    , line_(line)
  {}

  const std::string& section() const { return section_; }
  int line() const { return line_; }

private:
  std::string section_;
  int line_;
};

// fem
class NonAdmissibleFunction : public Error { public: using Error::Error; };

// linear algebra
class DimensionMismatch : public Error { public: using Error::Error; };
class ZeroDiagonal : public Error { public: using Error::Error; };

// nonlinear solvers
class NewtonError : public Error { public: using Error::Error; };
class NewtonDiverged : public NewtonError { public: using NewtonError::NewtonError; };
class MaxIterationsExceeded : public NewtonError { public: using NewtonError::NewtonError; };

// oracle / analysis / geometry
class OutOfDomain : public Error { public: using Error::Error; };
class DegenerateFit : public Error { public: using Error::Error; };
class OpenCurve : public Error { public: using Error::Error; };

} // namespace pmcf

#endif
