#include "igals/spline.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <string>

#include "igals/errors.hpp"
#include "basis_eval_impl.hpp"

namespace igals {

SplineSpace make_space(int degree, int level, int continuity) {
  if (degree < 1 || degree > kMaxDegree) {
    throw Error(Errc::kInvalidDegree,
                "make_space: degree " + std::to_string(degree) + " outside [1, " +
                    std::to_string(kMaxDegree) + "]");
  }
  if (level < 0) {
    throw Error(Errc::kInvalidLevel, "make_space: refinement level must be >= 0");
  }
  if (continuity < -1 || continuity > degree - 1) {
    throw Error(Errc::kInvalidContinuity,
                "make_space: continuity " + std::to_string(continuity) +
                    " outside [-1, " + std::to_string(degree - 1) + "]");
  }

  SplineSpace s;
  s.level = level;
  s.continuity = continuity;
  const int nel = 1 << level;
  const int mult = degree - continuity;

  KnotVector kv;
  kv.degree = degree;
  kv.num_elements = nel;
  kv.knots.reserve(2 * (degree + 1) + (nel - 1) * mult);
  for (int i = 0; i <= degree; ++i) kv.knots.push_back(0.0);
  for (int j = 1; j < nel; ++j) {
    const double b = static_cast<double>(j) / nel;
    for (int m = 0; m < mult; ++m) kv.knots.push_back(b);
  }
  for (int i = 0; i <= degree; ++i) kv.knots.push_back(1.0);

  s.knots = std::move(kv);
  s.dim = static_cast<int>(s.knots.knots.size()) - degree - 1;
  return s;
}

int SplineSpace::find_span(double x) const {
  const int nel = num_elements();
  int e = (x >= 1.0) ? nel - 1 : static_cast<int>(x * nel);
  e = std::clamp(e, 0, nel - 1);
  const int mult = degree() - continuity;
  return degree() + e * mult;
}

std::vector<double> SplineSpace::greville_points() const {
  const int p = degree();
  std::vector<double> pts(static_cast<size_t>(dim));
  for (int i = 0; i < dim; ++i) {
    double sum = 0.0;
    for (int j = 1; j <= p; ++j) sum += knots.knots[static_cast<size_t>(i + j)];
    pts[static_cast<size_t>(i)] = sum / p;
  }
  return pts;
}

BasisDerivatives eval_basis_all(const SplineSpace& space, double x, int max_deriv) {
  const detail::BasisDerivativesT<double> impl =
      detail::eval_basis_all_impl<double>(space, x, max_deriv);
  BasisDerivatives out;
  out.first = impl.first;
  out.count = impl.count;
  out.d = impl.d;
  return out;
}

BasisValues eval_basis(const SplineSpace& space, double x, int deriv) {
  const BasisDerivatives all = eval_basis_all(space, x, deriv);
  BasisValues out;
  out.first = all.first;
  out.count = all.count;
  for (int j = 0; j < all.count; ++j) {
    out.values[static_cast<size_t>(j)] = all.value(deriv, j);
  }
  return out;
}

}  // namespace igals
