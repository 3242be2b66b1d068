#pragma once

#include <stdexcept>
#include <string>

namespace sdwan {

// Malformed or invalid input documents (topology, plan, conf, key files).
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// A self-check inside the library failed; indicates a bug, never bad input.
class InternalError : public std::logic_error {
 public:
  explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace sdwan
