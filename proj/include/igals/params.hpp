#pragma once

#include <optional>
#include <string>

namespace igals {

/// Scalar weights and mesh parameters of one experiment; unused weights stay
/// unset and serialize as empty CSV fields.
struct ProblemParams {
  int p = 0;
  int ell = 0;
  int k = 0;
  std::optional<double> alpha2;
  std::optional<double> beta2;
  std::optional<double> gamma2;
  std::string control_space;  // "max", "reduced", or empty
};

}  // namespace igals
