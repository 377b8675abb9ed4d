#pragma once

#include <stdexcept>
#include <string>

namespace igals {

/// Error categories surfaced by the library. Tests and the CLI dispatch on these.
enum class Errc {
  kInvalidDegree,
  kInvalidContinuity,
  kInvalidLevel,
  kInvalidWeight,
  kOutOfDomain,
  kUnsupportedOrder,
  kMisalignedInterval,
  kMisalignedSubdomain,
  kNotPositiveDefinite,
  kNotBlockDiagonal,
  kDegenerateInput,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

}  // namespace igals
