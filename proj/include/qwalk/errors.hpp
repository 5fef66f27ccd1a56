#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qwalk {

// Graph size below the supported minimum (n < 2) or mismatched operand sizes.
class InvalidSizeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Parameter outside its allowed domain (kappa <= 0, tau <= 0, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class PartitionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class LinearDependenceError : public std::runtime_error {
 public:
  LinearDependenceError(std::size_t index, double relative_norm)
      : std::runtime_error("gram_schmidt: vector " + std::to_string(index) +
                           " is linearly dependent on its predecessors "
                           "(relative rejection norm " +
                           std::to_string(relative_norm) + ")"),
        index_(index) {}

  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qwalk
