#include "igals/error_metrics.hpp"

#include <array>
#include <cmath>

#include "igals/errors.hpp"
#include "quad_tables.hpp"

namespace igals {
namespace {

// Per-element squared contributions: diff and exact-field norms for the six
// derivative components (0,0) (1,0) (0,1) (2,0) (1,1) (0,2).
using ElementSums = std::array<double, 12>;

ElementSums element_error(const detail::DirTable& tx, const detail::DirTable& ty, int ex, int ey,
                          const Eigen::MatrixXd& cgrid, const ScalarField2& exact) {
  ElementSums sums{};
  for (int qx = 0; qx < tx.npts; ++qx) {
    const int ixq = tx.idx(ex, qx);
    const auto& bx = tx.basis[static_cast<size_t>(ixq)];
    const double x = tx.points[static_cast<size_t>(ixq)];
    const double wx = tx.weights[static_cast<size_t>(ixq)];
    for (int qy = 0; qy < ty.npts; ++qy) {
      const int iyq = ty.idx(ey, qy);
      const auto& by = ty.basis[static_cast<size_t>(iyq)];
      const double y = ty.points[static_cast<size_t>(iyq)];
      const double w = wx * ty.weights[static_cast<size_t>(iyq)];

      double uh[3][3] = {};
      for (int a = 0; a < bx.count; ++a) {
        for (int b = 0; b < by.count; ++b) {
          const double c = cgrid(bx.first + a, by.first + b);
          if (c == 0.0) continue;
          for (int dx = 0; dx <= 2; ++dx) {
            for (int dy = 0; dy + dx <= 2; ++dy) {
              uh[dx][dy] += c * bx.value(dx, a) * by.value(dy, b);
            }
          }
        }
      }
      const double ex_v[6] = {exact.value(x, y), exact.ddx(x, y),  exact.ddy(x, y),
                              exact.ddxx(x, y),  exact.ddxy(x, y), exact.ddyy(x, y)};
      const double uh_v[6] = {uh[0][0], uh[1][0], uh[0][1], uh[2][0], uh[1][1], uh[0][2]};
      for (int c = 0; c < 6; ++c) {
        const double diff = uh_v[c] - ex_v[c];
        sums[static_cast<size_t>(c)] += w * diff * diff;
        sums[static_cast<size_t>(6 + c)] += w * ex_v[c] * ex_v[c];
      }
    }
  }
  return sums;
}

}  // namespace

ErrorReport field_error(const Vec& coeffs, const TensorSpace& space, const ScalarField2& exact,
                        Exec exec, int quad_points) {
  const SplineSpace& sx = space.x_space;
  const SplineSpace& sy = space.y_space;
  const int npts =
      quad_points > 0 ? quad_points : std::max(sx.degree(), sy.degree()) + 3;
  const detail::DirTable tx = detail::make_dir_table(sx, npts, 2, 0, sx.num_elements());
  const detail::DirTable ty = detail::make_dir_table(sy, npts, 2, 0, sy.num_elements());

  Eigen::MatrixXd cgrid = Eigen::MatrixXd::Zero(sx.dim, sy.dim);
  for (int ix = 0; ix < space.nx(); ++ix) {
    for (int iy = 0; iy < space.ny(); ++iy) {
      cgrid(ix + space.x_offset(), iy + space.y_offset()) = coeffs[ix * space.ny() + iy];
    }
  }

  const int nelx = sx.num_elements(), nely = sy.num_elements();
  const int nelem = nelx * nely;
  ElementSums total{};
  if (exec == Exec::kParallel) {
    std::vector<ElementSums> partial(static_cast<size_t>(nelem));
#ifdef IGALS_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int e = 0; e < nelem; ++e) {
      partial[static_cast<size_t>(e)] = element_error(tx, ty, e / nely, e % nely, cgrid, exact);
    }
    for (int e = 0; e < nelem; ++e) {
      for (size_t c = 0; c < total.size(); ++c) total[c] += partial[static_cast<size_t>(e)][c];
    }
  } else {
    for (int e = 0; e < nelem; ++e) {
      const ElementSums s = element_error(tx, ty, e / nely, e % nely, cgrid, exact);
      for (size_t c = 0; c < total.size(); ++c) total[c] += s[c];
    }
  }

  ErrorReport rep;
  rep.dof = space.dim();
  rep.l2 = std::sqrt(total[0]);
  rep.h1_semi = std::sqrt(total[1] + total[2]);
  rep.h2_semi = std::sqrt(total[3] + 2.0 * total[4] + total[5]);
  rep.h2_full = std::sqrt(total[0] + total[1] + total[2] + total[3] + 2.0 * total[4] + total[5]);
  rep.ref_l2 = std::sqrt(total[6]);
  rep.ref_h1_semi = std::sqrt(total[7] + total[8]);
  rep.ref_h2_semi = std::sqrt(total[9] + 2.0 * total[10] + total[11]);
  rep.ref_h2_full =
      std::sqrt(total[6] + total[7] + total[8] + total[9] + 2.0 * total[10] + total[11]);
  return rep;
}

std::vector<double> observed_rate(std::span<const double> errors) {
  std::vector<double> rates;
  for (size_t i = 0; i + 1 < errors.size(); ++i) {
    if (errors[i] <= 0.0 || errors[i + 1] <= 0.0) {
      throw Error(Errc::kDegenerateInput, "observed_rate: errors must be positive");
    }
    rates.push_back(std::log2(errors[i] / errors[i + 1]));
  }
  return rates;
}

}  // namespace igals
