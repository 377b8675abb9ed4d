#pragma once

#include <array>
#include <vector>

namespace igals {

/// Degrees above this would need quadrature rules past the 16-point cap
/// (error metrics use p+3 points per direction).
inline constexpr int kMaxDegree = 13;

/// Open knot vector on [0,1]: endpoint knots repeated degree+1 times,
/// interior breakpoints j/2^level, each with multiplicity degree-continuity.
struct KnotVector {
  int degree = 0;
  int num_elements = 1;  // 2^level
  std::vector<double> knots;
};

/// Univariate B-spline space S_{p,level,q} on [0,1].
struct SplineSpace {
  KnotVector knots;
  int dim = 0;
  int level = 0;
  int continuity = 0;

  int degree() const { return knots.degree; }
  int num_elements() const { return knots.num_elements; }
  double breakpoint(int e) const {
    return static_cast<double>(e) / knots.num_elements;
  }
  /// Knot index i with t_i <= x < t_{i+1} over a nonempty span.
  /// Right-limit convention at breakpoints, left-limit at x = 1.
  int find_span(double x) const;
  /// Knot averages xi_i = (t_{i+1} + ... + t_{i+p}) / p, i = 0..dim-1.
  std::vector<double> greville_points() const;
};

/// Builds S_{p,level,q}. Throws kInvalidDegree, kInvalidLevel or
/// kInvalidContinuity when the preconditions p >= 1, level >= 0,
/// -1 <= q <= p-1 are violated.
SplineSpace make_space(int degree, int level, int continuity);

/// Values (or d-th derivatives) of the degree+1 basis functions supported
/// at a point; `first` is the global index of the first one.
struct BasisValues {
  int first = 0;
  int count = 0;
  std::array<double, kMaxDegree + 1> values{};
  double operator[](int i) const { return values[static_cast<size_t>(i)]; }
};

/// All derivative orders 0..max_deriv in one sweep (the assembly kernels
/// always need several orders at the same quadrature point).
struct BasisDerivatives {
  int first = 0;
  int count = 0;
  std::array<std::array<double, kMaxDegree + 1>, 3> d{};

  double value(int order, int local) const {
    return d[static_cast<size_t>(order)][static_cast<size_t>(local)];
  }
};

/// Cox-de Boor triangle plus the knot-difference derivative recurrence.
/// Throws kOutOfDomain for x outside [0,1], kUnsupportedOrder for
/// max_deriv > min(degree, 2).
BasisDerivatives eval_basis_all(const SplineSpace& space, double x, int max_deriv);

/// d-th derivatives of the supported basis functions at x (d in 0..2, d <= p).
BasisValues eval_basis(const SplineSpace& space, double x, int deriv);

}  // namespace igals
