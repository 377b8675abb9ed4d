#pragma once

#include <span>
#include <vector>

#include "igals/assembly.hpp"
#include "igals/params.hpp"

namespace igals {

/// Scalar field with derivatives through second order.
struct ScalarField2 {
  Func2 value, ddx, ddy, ddxx, ddxy, ddyy;
};

/// Error norms of a discrete field against an exact one, by per-element Gauss
/// quadrature with p+3 points per direction. The H2 seminorm uses the
/// Frobenius-Hessian convention (mixed derivative counted twice);
/// h2_full = sqrt(l2^2 + h1^2 + h2^2) by definition. The ref_* fields carry
/// the same norms of the exact field so relative errors can be formed.
struct ErrorReport {
  double l2 = 0.0, h1_semi = 0.0, h2_semi = 0.0, h2_full = 0.0;
  double ref_l2 = 0.0, ref_h1_semi = 0.0, ref_h2_semi = 0.0, ref_h2_full = 0.0;
  int dof = 0;
  ProblemParams params;

  double rel_l2() const { return l2 / ref_l2; }
  double rel_h1_semi() const { return h1_semi / ref_h1_semi; }
  double rel_h2_semi() const { return h2_semi / ref_h2_semi; }
  double rel_h2_full() const { return h2_full / ref_h2_full; }
};

ErrorReport field_error(const Vec& coeffs, const TensorSpace& space, const ScalarField2& exact,
                        Exec exec = Exec::kParallel, int quad_points = 0);

/// Observed orders log2(e_l / e_{l+1}) for consecutive refinement levels.
/// Throws kDegenerateInput when an error is nonpositive.
std::vector<double> observed_rate(std::span<const double> errors);

}  // namespace igals
