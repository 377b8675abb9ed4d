#pragma once

// Scalar-generic core of the basis evaluation: the double instantiation backs
// the public API, the long double one feeds the high-precision residual
// assembly. Knot values are dyadic rationals, so casting them up is exact.

#include <array>
#include <string>

#include "igals/errors.hpp"
#include "igals/spline.hpp"

namespace igals::detail {

template <typename Real>
struct BasisDerivativesT {
  int first = 0;
  int count = 0;
  std::array<std::array<Real, kMaxDegree + 1>, 3> d{};

  Real value(int order, int local) const {
    return d[static_cast<size_t>(order)][static_cast<size_t>(local)];
  }
};

template <typename Real>
BasisDerivativesT<Real> eval_basis_all_impl(const SplineSpace& space, Real x, int max_deriv) {
  if (x < Real(0) || x > Real(1)) {
    throw Error(Errc::kOutOfDomain,
                "eval_basis: x = " + std::to_string(static_cast<double>(x)) + " outside [0,1]");
  }
  const int p = space.degree();
  if (max_deriv < 0 || max_deriv > 2 || max_deriv > p) {
    throw Error(Errc::kUnsupportedOrder, "eval_basis: derivative order must be in 0..min(p,2)");
  }

  const int span = space.find_span(static_cast<double>(x));
  const auto& t = space.knots.knots;
  const auto knot = [&](int i) { return static_cast<Real>(t[static_cast<size_t>(i)]); };

  // Triangle of non-vanishing basis functions together with the knot
  // differences needed by the derivative recurrence (NURBS-book layout).
  Real ndu[kMaxDegree + 1][kMaxDegree + 1];
  Real left[kMaxDegree + 1], right[kMaxDegree + 1];
  ndu[0][0] = Real(1);
  for (int j = 1; j <= p; ++j) {
    left[j] = x - knot(span + 1 - j);
    right[j] = knot(span + j) - x;
    Real saved = Real(0);
    for (int r = 0; r < j; ++r) {
      ndu[j][r] = right[r + 1] + left[j - r];  // spans a nonempty interval, never zero
      const Real temp = ndu[r][j - 1] / ndu[j][r];
      ndu[r][j] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    ndu[j][j] = saved;
  }

  BasisDerivativesT<Real> out;
  out.first = span - p;
  out.count = p + 1;
  for (int j = 0; j <= p; ++j) out.d[0][static_cast<size_t>(j)] = ndu[j][p];

  Real a[2][kMaxDegree + 1];
  for (int r = 0; r <= p; ++r) {
    int s1 = 0, s2 = 1;
    a[0][0] = Real(1);
    for (int k = 1; k <= max_deriv; ++k) {
      Real dv = Real(0);
      const int rk = r - k, pk = p - k;
      if (r >= k) {
        a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
        dv = a[s2][0] * ndu[rk][pk];
      }
      const int j1 = (rk >= -1) ? 1 : -rk;
      const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
      for (int j = j1; j <= j2; ++j) {
        a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][rk + j];
        dv += a[s2][j] * ndu[rk + j][pk];
      }
      if (r <= pk) {
        a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
        dv += a[s2][k] * ndu[r][pk];
      }
      out.d[static_cast<size_t>(k)][static_cast<size_t>(r)] = dv;
      std::swap(s1, s2);
    }
  }
  Real factor = static_cast<Real>(p);
  for (int k = 1; k <= max_deriv; ++k) {
    for (int j = 0; j <= p; ++j) out.d[static_cast<size_t>(k)][static_cast<size_t>(j)] *= factor;
    factor *= static_cast<Real>(p - k);
  }
  return out;
}

}  // namespace igals::detail
