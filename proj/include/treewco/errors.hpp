#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace treewco {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input does not describe a rooted, connected, terminal-free truncated tree.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Vertex id that is not part of the tree.
class LookupError : public Error {
 public:
  using Error::Error;
};

/// Depth or size parameter outside the admissible range.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Two objects that must share a tree were built on different trees.
class TreeMismatchError : public Error {
 public:
  using Error::Error;
};

/// Spec file rejected while loading. `pointer()` is the JSON pointer of the
/// offending node ("" for the document root).
class LoadError : public Error {
 public:
  LoadError(std::string pointer, const std::string& what)
      : Error(pointer.empty() ? what : pointer + ": " + what), pointer_(std::move(pointer)) {}

  const std::string& pointer() const noexcept { return pointer_; }

 private:
  std::string pointer_;
};

}  // namespace treewco
