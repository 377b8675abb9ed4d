#pragma once

// Internal per-direction quadrature tables shared by the assembly and
// error-metric kernels.

#include <vector>

#include "igals/quadrature.hpp"
#include "igals/spline.hpp"

namespace igals::detail {

struct DirTable {
  int npts = 0;
  int e_lo = 0;
  int e_hi = 0;  // element range [e_lo, e_hi)
  std::vector<double> points;             // [(e - e_lo) * npts + q]
  std::vector<double> weights;            // jacobian-scaled
  std::vector<BasisDerivatives> basis;    // same layout

  int num_elements() const { return e_hi - e_lo; }
  int idx(int e, int q) const { return (e - e_lo) * npts + q; }
};

inline DirTable make_dir_table(const SplineSpace& s, int npts, int max_deriv,
                               int e_lo, int e_hi) {
  DirTable t;
  t.npts = npts;
  t.e_lo = e_lo;
  t.e_hi = e_hi;
  const auto& rule = gauss_rule(npts);
  const int n = (e_hi - e_lo) * npts;
  t.points.resize(static_cast<size_t>(n));
  t.weights.resize(static_cast<size_t>(n));
  t.basis.resize(static_cast<size_t>(n));
  for (int e = e_lo; e < e_hi; ++e) {
    const double a = s.breakpoint(e), b = s.breakpoint(e + 1);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int q = 0; q < npts; ++q) {
      const int i = t.idx(e, q);
      t.points[static_cast<size_t>(i)] = mid + half * rule.nodes[static_cast<size_t>(q)];
      t.weights[static_cast<size_t>(i)] = half * rule.weights[static_cast<size_t>(q)];
      t.basis[static_cast<size_t>(i)] =
          eval_basis_all(s, t.points[static_cast<size_t>(i)], max_deriv);
    }
  }
  return t;
}

}  // namespace igals::detail
