#pragma once

#include <string>

#include "igals/error_metrics.hpp"

namespace igals {

/// Closed-form data for one experiment: exact state u with derivatives,
/// consistent source f = -Delta u, boundary data g = u|_boundary, observation
/// u_d and prior f_p for the inverse runs.
struct ManufacturedCase {
  std::string name;
  int k = 1;
  ScalarField2 u;
  Func2 f;
  Func2 g;
  ScalarField2 u_d;
  Func2 f_p;
};

/// u = g = cos(k pi x) cos(k pi y), f = -Delta u = 2 k^2 pi^2 cos(k pi x) cos(k pi y).
ManufacturedCase example1_case(int k);

/// u_d = sin(k pi x) sin(k pi y), f_p = -Delta u_d = 2 k^2 pi^2 sin(k pi x) sin(k pi y).
ManufacturedCase example2_case(int k);

}  // namespace igals
