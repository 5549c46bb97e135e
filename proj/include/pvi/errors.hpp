#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pvi {

// Error taxonomy shared across the library. The CLI maps these onto
// distinct process exit codes.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParameterError : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};
struct IndexingError : Error {
  using Error::Error;
};
struct ContractViolation : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};
struct FormatError : Error {
  using Error::Error;
};
struct FingerprintMismatch : Error {
  using Error::Error;
};

// Raised when a state or outcome set is too large to materialise. Carries
// the count that would have been required.
class CapacityError : public Error {
 public:
  CapacityError(const std::string& what, std::uint64_t required)
      : Error(what), required_(required) {}
  std::uint64_t required_count() const noexcept { return required_; }

 private:
  std::uint64_t required_;
};

class NumericDivergence : public Error {
 public:
  NumericDivergence(const std::string& what, std::uint64_t iteration)
      : Error(what), iteration_(iteration) {}
  std::uint64_t iteration() const noexcept { return iteration_; }

 private:
  std::uint64_t iteration_;
};

}  // namespace pvi
