#pragma once

#include <stdexcept>
#include <string>

namespace rxl {

// Bad user-supplied data: malformed expressions, inconsistent dimensions, ...
class input_error : public std::runtime_error {
 public:
  explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

// A persisted table does not match the requested (s, spec, mode) or is corrupt.
class cache_error : public std::runtime_error {
 public:
  explicit cache_error(const std::string& what) : std::runtime_error(what) {}
};

// A computation would exceed a configured enumeration cap.
class resource_error : public std::runtime_error {
 public:
  explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rxl
