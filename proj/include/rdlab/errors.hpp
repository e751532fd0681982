#ifndef RDLAB_ERRORS_HPP
#define RDLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rdlab {

// Config / input shape violations (CLI exit code 2).
class SchemaError : public std::runtime_error {
 public:
  explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

// Mathematically infeasible request, e.g. distortion below the floor
// or a rate precondition violation (CLI exit code 3).
class InfeasibleError : public std::runtime_error {
 public:
  explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

// Memory / state-space budget exceeded (CLI exit code 4).
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rdlab

#endif  // RDLAB_ERRORS_HPP
