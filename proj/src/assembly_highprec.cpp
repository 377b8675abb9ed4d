#include "assembly_highprec.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "basis_eval_impl.hpp"
#include "igals/quadrature.hpp"

namespace igals::detail {
namespace {

using MatLd = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using VecLd = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

std::vector<double> merged_breakpoints(const SplineSpace& a, const SplineSpace& b, double lo,
                                       double hi) {
  std::vector<double> pts;
  for (int e = 0; e <= a.num_elements(); ++e) pts.push_back(a.breakpoint(e));
  for (int e = 0; e <= b.num_elements(); ++e) pts.push_back(b.breakpoint(e));
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](double u, double v) { return std::abs(u - v) < 1e-12; }),
            pts.end());
  std::vector<double> out;
  for (double p : pts) {
    if (p >= lo - 1e-12 && p <= hi + 1e-12) out.push_back(p);
  }
  return out;
}

MatLd gramian_1d_ld(const SplineSpace& test, const SplineSpace& trial, int a, int b, double lo,
                    double hi) {
  const int npts = std::max(test.degree(), trial.degree()) + 1;
  const QuadratureRuleLd& rule = gauss_rule_ld(npts);
  const std::vector<double> cells = merged_breakpoints(test, trial, lo, hi);

  MatLd g = MatLd::Zero(test.dim, trial.dim);
  for (size_t c = 0; c + 1 < cells.size(); ++c) {
    const long double x0 = cells[c], x1 = cells[c + 1];
    const long double mid = 0.5L * (x0 + x1), half = 0.5L * (x1 - x0);
    for (int q = 0; q < npts; ++q) {
      const long double x = mid + half * rule.nodes[static_cast<size_t>(q)];
      const long double w = half * rule.weights[static_cast<size_t>(q)];
      const auto bt = eval_basis_all_impl<long double>(test, x, a);
      const auto br = eval_basis_all_impl<long double>(trial, x, b);
      for (int i = 0; i < bt.count; ++i) {
        const long double wi = w * bt.value(a, i);
        for (int j = 0; j < br.count; ++j) {
          g(bt.first + i, br.first + j) += wi * br.value(b, j);
        }
      }
    }
  }
  return g;
}

struct TermLd {
  const MatLd* x;
  const MatLd* y;
};

SpMatLd kron_sum_ld(std::span<const TermLd> terms) {
  const int rx = static_cast<int>(terms[0].x->rows());
  const int ry = static_cast<int>(terms[0].y->rows());
  const int cx = static_cast<int>(terms[0].x->cols());
  const int cy = static_cast<int>(terms[0].y->cols());

  std::vector<Eigen::Triplet<long double>> trips;
  for (int jx = 0; jx < cx; ++jx) {
    for (int jy = 0; jy < cy; ++jy) {
      const int col = jx * cy + jy;
      std::vector<std::pair<int, long double>> entries;
      for (const TermLd& t : terms) {
        for (int ix = 0; ix < rx; ++ix) {
          const long double vx = (*t.x)(ix, jx);
          if (vx == 0.0L) continue;
          for (int iy = 0; iy < ry; ++iy) {
            const long double vy = (*t.y)(iy, jy);
            if (vy == 0.0L) continue;
            entries.emplace_back(ix * ry + iy, vx * vy);
          }
        }
      }
      std::stable_sort(entries.begin(), entries.end(),
                       [](const auto& a, const auto& b) { return a.first < b.first; });
      size_t w = 0;
      for (size_t r = 0; r < entries.size(); ++r) {
        if (w > 0 && entries[w - 1].first == entries[r].first) {
          entries[w - 1].second += entries[r].second;
        } else {
          entries[w++] = entries[r];
        }
      }
      entries.resize(w);
      for (const auto& [row, v] : entries) trips.emplace_back(row, col, v);
    }
  }
  SpMatLd out(rx * ry, cx * cy);
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

MatLd piece(const TensorSpace& test, const TensorSpace& trial, bool xdir, int a, int b,
            double lo = 0.0, double hi = 1.0) {
  const SplineSpace& t = xdir ? test.x_space : test.y_space;
  const SplineSpace& r = xdir ? trial.x_space : trial.y_space;
  const int ro = xdir ? test.x_offset() : test.y_offset();
  const int co = xdir ? trial.x_offset() : trial.y_offset();
  const int nr = xdir ? test.nx() : test.ny();
  const int nc = xdir ? trial.nx() : trial.ny();
  return gramian_1d_ld(t, r, a, b, lo, hi).block(ro, co, nr, nc);
}

}  // namespace

SpMatLd laplace_gramian_2d_ld(const TensorSpace& test, const TensorSpace& trial) {
  const MatLd gx22 = piece(test, trial, true, 2, 2), gx00 = piece(test, trial, true, 0, 0);
  const MatLd gx20 = piece(test, trial, true, 2, 0), gx02 = piece(test, trial, true, 0, 2);
  const MatLd gy22 = piece(test, trial, false, 2, 2), gy00 = piece(test, trial, false, 0, 0);
  const MatLd gy20 = piece(test, trial, false, 2, 0), gy02 = piece(test, trial, false, 0, 2);
  const TermLd terms[] = {{&gx22, &gy00}, {&gx00, &gy22}, {&gx20, &gy02}, {&gx02, &gy20}};
  return kron_sum_ld(terms);
}

SpMatLd cross_laplace_gramian_ld(const TensorSpace& test, const TensorSpace& trial) {
  const MatLd hx20 = piece(test, trial, true, 2, 0), hx00 = piece(test, trial, true, 0, 0);
  const MatLd hy20 = piece(test, trial, false, 2, 0), hy00 = piece(test, trial, false, 0, 0);
  const TermLd terms[] = {{&hx20, &hy00}, {&hx00, &hy20}};
  return kron_sum_ld(terms);
}

SpMatLd subdomain_mass_ld(const TensorSpace& test, const TensorSpace& trial, const Rect& gamma) {
  const MatLd gx = piece(test, trial, true, 0, 0, gamma.x_lo, gamma.x_hi);
  const MatLd gy = piece(test, trial, false, 0, 0, gamma.y_lo, gamma.y_hi);
  const TermLd terms[] = {{&gx, &gy}};
  return kron_sum_ld(terms);
}

SpMatLd mass_2d_ld(const TensorSpace& test, const TensorSpace& trial) {
  return subdomain_mass_ld(test, trial, Rect::unit());
}

namespace {

VecLd restrict_grid(const TensorSpace& space, const MatLd& full) {
  VecLd out(space.dim());
  for (int ix = 0; ix < space.nx(); ++ix) {
    for (int iy = 0; iy < space.ny(); ++iy) {
      out[ix * space.ny() + iy] = full(ix + space.x_offset(), iy + space.y_offset());
    }
  }
  return out;
}

VecLd domain_load_ld(const TensorSpace& test, const Func2& phi, bool neg_laplace,
                     const Rect& rect) {
  const SplineSpace& sx = test.x_space;
  const SplineSpace& sy = test.y_space;
  const int npts = std::max(sx.degree(), sy.degree()) + 2;
  const QuadratureRuleLd& rule = gauss_rule_ld(npts);
  const int md = neg_laplace ? 2 : 0;

  const auto elem = [](const SplineSpace& s, double v) {
    return static_cast<int>(std::lround(v * s.num_elements()));
  };

  MatLd full = MatLd::Zero(sx.dim, sy.dim);
  for (int ex = elem(sx, rect.x_lo); ex < elem(sx, rect.x_hi); ++ex) {
    const long double ax = sx.breakpoint(ex), bx = sx.breakpoint(ex + 1);
    const long double mx = 0.5L * (ax + bx), hx = 0.5L * (bx - ax);
    for (int qx = 0; qx < npts; ++qx) {
      const long double x = mx + hx * rule.nodes[static_cast<size_t>(qx)];
      const long double wx = hx * rule.weights[static_cast<size_t>(qx)];
      const auto bxv = eval_basis_all_impl<long double>(sx, x, md);
      for (int ey = elem(sy, rect.y_lo); ey < elem(sy, rect.y_hi); ++ey) {
        const long double ay = sy.breakpoint(ey), by = sy.breakpoint(ey + 1);
        const long double my = 0.5L * (ay + by), hy = 0.5L * (by - ay);
        for (int qy = 0; qy < npts; ++qy) {
          const long double y = my + hy * rule.nodes[static_cast<size_t>(qy)];
          const long double w = wx * hy * rule.weights[static_cast<size_t>(qy)];
          const long double fv =
              w * static_cast<long double>(phi(static_cast<double>(x), static_cast<double>(y)));
          for (int a = 0; a < bxv.count; ++a) {
            const auto byv = eval_basis_all_impl<long double>(sy, y, md);
            for (int b = 0; b < byv.count; ++b) {
              const long double shape =
                  neg_laplace ? -(bxv.value(2, a) * byv.value(0, b) + bxv.value(0, a) * byv.value(2, b))
                              : bxv.value(0, a) * byv.value(0, b);
              full(bxv.first + a, byv.first + b) += fv * shape;
            }
          }
        }
      }
    }
  }
  return restrict_grid(test, full);
}

VecLd boundary_load_ld(const TensorSpace& test, const Func2& phi) {
  const SplineSpace& sx = test.x_space;
  const SplineSpace& sy = test.y_space;
  const int npts = std::max(sx.degree(), sy.degree()) + 2;
  const QuadratureRuleLd& rule = gauss_rule_ld(npts);
  MatLd full = MatLd::Zero(sx.dim, sy.dim);
  const auto y0 = eval_basis_all_impl<long double>(sy, 0.0L, 0);
  const auto y1 = eval_basis_all_impl<long double>(sy, 1.0L, 0);
  const auto x0 = eval_basis_all_impl<long double>(sx, 0.0L, 0);
  const auto x1 = eval_basis_all_impl<long double>(sx, 1.0L, 0);

  const auto sweep = [&](const SplineSpace& s, auto&& add) {
    for (int e = 0; e < s.num_elements(); ++e) {
      const long double a = s.breakpoint(e), b = s.breakpoint(e + 1);
      const long double m = 0.5L * (a + b), h = 0.5L * (b - a);
      for (int q = 0; q < npts; ++q) {
        add(m + h * rule.nodes[static_cast<size_t>(q)], h * rule.weights[static_cast<size_t>(q)]);
      }
    }
  };
  sweep(sx, [&](long double x, long double w) {
    const auto bx = eval_basis_all_impl<long double>(sx, x, 0);
    const long double f0 = w * static_cast<long double>(phi(static_cast<double>(x), 0.0));
    const long double f1 = w * static_cast<long double>(phi(static_cast<double>(x), 1.0));
    for (int a = 0; a < bx.count; ++a) {
      for (int b = 0; b < y0.count; ++b) {
        full(bx.first + a, y0.first + b) += f0 * bx.value(0, a) * y0.value(0, b);
      }
      for (int b = 0; b < y1.count; ++b) {
        full(bx.first + a, y1.first + b) += f1 * bx.value(0, a) * y1.value(0, b);
      }
    }
  });
  sweep(sy, [&](long double y, long double w) {
    const auto by = eval_basis_all_impl<long double>(sy, y, 0);
    const long double f0 = w * static_cast<long double>(phi(0.0, static_cast<double>(y)));
    const long double f1 = w * static_cast<long double>(phi(1.0, static_cast<double>(y)));
    for (int b = 0; b < by.count; ++b) {
      for (int a = 0; a < x0.count; ++a) {
        full(x0.first + a, by.first + b) += f0 * x0.value(0, a) * by.value(0, b);
      }
      for (int a = 0; a < x1.count; ++a) {
        full(x1.first + a, by.first + b) += f1 * x1.value(0, a) * by.value(0, b);
      }
    }
  });
  return restrict_grid(test, full);
}

}  // namespace

VecLd load_vector_ld(const TensorSpace& test, const Func2& phi, LoadAction action,
                     std::optional<Rect> gamma) {
  switch (action) {
    case LoadAction::kIdentityOnDomain:
      return domain_load_ld(test, phi, false, Rect::unit());
    case LoadAction::kNegLaplaceTest:
      return domain_load_ld(test, phi, true, Rect::unit());
    case LoadAction::kBoundaryTrace:
      return boundary_load_ld(test, phi);
    case LoadAction::kIdentityOnSubdomain:
      return domain_load_ld(test, phi, false, *gamma);
  }
  return VecLd();
}

SpMatLd boundary_mass_ld(const TensorSpace& test, const TensorSpace& trial) {
  const MatLd gx = piece(test, trial, true, 0, 0);
  const MatLd gy = piece(test, trial, false, 0, 0);

  const auto trace = [](const SplineSpace& s, int offset, int active, long double at) {
    VecLd v = VecLd::Zero(active);
    const auto b = eval_basis_all_impl<long double>(s, at, 0);
    for (int j = 0; j < b.count; ++j) {
      const int idx = b.first + j - offset;
      if (idx >= 0 && idx < active) v[idx] = b.value(0, j);
    }
    return v;
  };
  const VecLd ty0t = trace(test.y_space, test.y_offset(), test.ny(), 0.0L);
  const VecLd ty1t = trace(test.y_space, test.y_offset(), test.ny(), 1.0L);
  const VecLd ty0r = trace(trial.y_space, trial.y_offset(), trial.ny(), 0.0L);
  const VecLd ty1r = trace(trial.y_space, trial.y_offset(), trial.ny(), 1.0L);
  const VecLd tx0t = trace(test.x_space, test.x_offset(), test.nx(), 0.0L);
  const VecLd tx1t = trace(test.x_space, test.x_offset(), test.nx(), 1.0L);
  const VecLd tx0r = trace(trial.x_space, trial.x_offset(), trial.nx(), 0.0L);
  const VecLd tx1r = trace(trial.x_space, trial.x_offset(), trial.nx(), 1.0L);

  const MatLd ey = ty0t * ty0r.transpose() + ty1t * ty1r.transpose();
  const MatLd ex = tx0t * tx0r.transpose() + tx1t * tx1r.transpose();
  const TermLd terms[] = {{&gx, &ey}, {&ex, &gy}};
  return kron_sum_ld(terms);
}

}  // namespace igals::detail
