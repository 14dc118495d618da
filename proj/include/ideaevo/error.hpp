#pragma once

#include <stdexcept>
#include <string>

namespace ideaevo {

// Raised when an argument violates an operation's precondition.
class InvalidInput : public std::invalid_argument {
 public:
  explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

// Raised by operations that need at least one idea copy to act on.
class EmptyPopulation : public std::logic_error {
 public:
  explicit EmptyPopulation(const std::string& what) : std::logic_error(what) {}
};

// File-system failures in the batch harness, carrying the offending path.
class IoError : public std::runtime_error {
 public:
  IoError(const std::string& path, const std::string& what)
      : std::runtime_error(what + ": " + path), path_(path) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

namespace detail {

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw InvalidInput(msg);
}

inline bool is_probability(double x) noexcept { return x >= 0.0 && x <= 1.0; }

}  // namespace detail
}  // namespace ideaevo
