#include "igals/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <utility>
#include <vector>

#include "igals/errors.hpp"
#include "igals/quadrature.hpp"
#include "quad_tables.hpp"

namespace igals {
namespace {

constexpr double kAlignTol = 1e-12;

bool is_breakpoint(const SplineSpace& s, double v) {
  const double scaled = v * s.num_elements();
  return std::abs(scaled - std::round(scaled)) < kAlignTol * s.num_elements() &&
         v > -kAlignTol && v < 1.0 + kAlignTol;
}

int breakpoint_index(const SplineSpace& s, double v) {
  return static_cast<int>(std::round(v * s.num_elements()));
}

// Union of the two spaces' breakpoints within [lo, hi].
std::vector<double> merged_breakpoints(const SplineSpace& a, const SplineSpace& b,
                                       double lo, double hi) {
  std::vector<double> pts;
  for (int e = 0; e <= a.num_elements(); ++e) pts.push_back(a.breakpoint(e));
  for (int e = 0; e <= b.num_elements(); ++e) pts.push_back(b.breakpoint(e));
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](double u, double v) { return std::abs(u - v) < kAlignTol; }),
            pts.end());
  std::vector<double> out;
  for (double p : pts) {
    if (p >= lo - kAlignTol && p <= hi + kAlignTol) out.push_back(p);
  }
  return out;
}

SpMat slice(const SpMat& g, int r0, int nr, int c0, int nc) {
  SpMat out = g.block(r0, c0, nr, nc);
  return out;
}

// Boundary trace values of the active basis functions at x = at (0 or 1).
Vec trace_values(const SplineSpace& s, int offset, int active, double at) {
  Vec v = Vec::Zero(active);
  const BasisValues b = eval_basis(s, at, 0);
  for (int j = 0; j < b.count; ++j) {
    const int idx = b.first + j - offset;
    if (idx >= 0 && idx < active) v[idx] = b[j];
  }
  return v;
}

SpMat outer_sparse(const Vec& a, const Vec& b) {
  std::vector<Eigen::Triplet<double>> trips;
  for (int j = 0; j < b.size(); ++j) {
    if (b[j] == 0.0) continue;
    for (int i = 0; i < a.size(); ++i) {
      if (a[i] == 0.0) continue;
      trips.emplace_back(i, j, a[i] * b[j]);
    }
  }
  SpMat m(a.size(), b.size());
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

struct GammaElements {
  int ex_lo, ex_hi, ey_lo, ey_hi;  // element ranges [lo, hi)
};

GammaElements align_rect(const TensorSpace& space, const Rect& r) {
  const SplineSpace& sx = space.x_space;
  const SplineSpace& sy = space.y_space;
  if (!(r.x_lo < r.x_hi && r.y_lo < r.y_hi) || !is_breakpoint(sx, r.x_lo) ||
      !is_breakpoint(sx, r.x_hi) || !is_breakpoint(sy, r.y_lo) || !is_breakpoint(sy, r.y_hi)) {
    throw Error(Errc::kMisalignedSubdomain,
                "subdomain corners must lie on knot lines of the space");
  }
  return {breakpoint_index(sx, r.x_lo), breakpoint_index(sx, r.x_hi),
          breakpoint_index(sy, r.y_lo), breakpoint_index(sy, r.y_hi)};
}

}  // namespace

TensorSpace make_tensor_space(const SplineSpace& sx, const SplineSpace& sy, bool dirichlet) {
  TensorSpace t;
  t.x_space = sx;
  t.y_space = sy;
  t.dirichlet = dirichlet;
  return t;
}

TensorSpace make_tensor_space(int degree, int level, int continuity, bool dirichlet) {
  const SplineSpace s = make_space(degree, level, continuity);
  return make_tensor_space(s, s, dirichlet);
}

SpMat gramian_1d(const SplineSpace& test, const SplineSpace& trial, int a, int b,
                 double lo, double hi, int quad_points) {
  if (!(lo < hi) || !is_breakpoint(test, lo) || !is_breakpoint(test, hi) ||
      !is_breakpoint(trial, lo) || !is_breakpoint(trial, hi)) {
    throw Error(Errc::kMisalignedInterval,
                "gramian_1d: interval ends must be breakpoints of both spaces");
  }
  const int npts = quad_points > 0 ? quad_points : std::max(test.degree(), trial.degree()) + 1;
  const auto& rule = gauss_rule(npts);
  const std::vector<double> cells = merged_breakpoints(test, trial, lo, hi);

  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(test.dim, trial.dim);
  for (size_t c = 0; c + 1 < cells.size(); ++c) {
    const double x0 = cells[c], x1 = cells[c + 1];
    const double mid = 0.5 * (x0 + x1), half = 0.5 * (x1 - x0);
    for (int q = 0; q < npts; ++q) {
      const double x = mid + half * rule.nodes[static_cast<size_t>(q)];
      const double w = half * rule.weights[static_cast<size_t>(q)];
      const BasisValues bt = eval_basis(test, x, a);
      const BasisValues br = eval_basis(trial, x, b);
      for (int i = 0; i < bt.count; ++i) {
        const double wi = w * bt[i];
        for (int j = 0; j < br.count; ++j) {
          g(bt.first + i, br.first + j) += wi * br[j];
        }
      }
    }
  }
  return g.sparseView(0.0, 0.0);
}

SpMat kron_sum(std::span<const KronTerm> terms, Exec exec) {
  const int rx = static_cast<int>(terms[0].x->rows());
  const int ry = static_cast<int>(terms[0].y->rows());
  const int cx = static_cast<int>(terms[0].x->cols());
  const int cy = static_cast<int>(terms[0].y->cols());
  const int cols = cx * cy;

  using Entry = std::pair<int, double>;
  std::vector<std::vector<Entry>> col_entries(static_cast<size_t>(cols));

  const auto fill_column = [&](int col) {
    const int jx = col / cy, jy = col % cy;
    auto& entries = col_entries[static_cast<size_t>(col)];
    for (const KronTerm& t : terms) {
      for (SpMat::InnerIterator itx(*t.x, jx); itx; ++itx) {
        const double vx = t.coeff * itx.value();
        for (SpMat::InnerIterator ity(*t.y, jy); ity; ++ity) {
          entries.emplace_back(static_cast<int>(itx.row()) * ry + static_cast<int>(ity.row()),
                               vx * ity.value());
        }
      }
    }
    std::stable_sort(entries.begin(), entries.end(),
                     [](const Entry& a, const Entry& b) { return a.first < b.first; });
    size_t w = 0;
    for (size_t r = 0; r < entries.size(); ++r) {
      if (w > 0 && entries[w - 1].first == entries[r].first) {
        entries[w - 1].second += entries[r].second;
      } else {
        entries[w++] = entries[r];
      }
    }
    entries.resize(w);
  };

  if (exec == Exec::kParallel) {
#ifdef IGALS_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic, 64)
#endif
    for (int col = 0; col < cols; ++col) fill_column(col);
  } else {
    for (int col = 0; col < cols; ++col) fill_column(col);
  }

  std::vector<Eigen::Triplet<double>> trips;
  size_t nnz = 0;
  for (const auto& c : col_entries) nnz += c.size();
  trips.reserve(nnz);
  for (int col = 0; col < cols; ++col) {
    for (const Entry& e : col_entries[static_cast<size_t>(col)]) {
      trips.emplace_back(e.first, col, e.second);
    }
  }
  SpMat out(rx * ry, cols);
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

SpMat laplace_gramian_2d(const TensorSpace& test, const TensorSpace& trial, Exec exec) {
  const auto piece = [&](int a, int b, bool xdir) {
    const SplineSpace& t = xdir ? test.x_space : test.y_space;
    const SplineSpace& r = xdir ? trial.x_space : trial.y_space;
    const int ro = xdir ? test.x_offset() : test.y_offset();
    const int co = xdir ? trial.x_offset() : trial.y_offset();
    const int nr = xdir ? test.nx() : test.ny();
    const int nc = xdir ? trial.nx() : trial.ny();
    return slice(gramian_1d(t, r, a, b), ro, nr, co, nc);
  };
  const SpMat gx22 = piece(2, 2, true), gx00 = piece(0, 0, true);
  const SpMat gx20 = piece(2, 0, true), gx02 = piece(0, 2, true);
  const SpMat gy22 = piece(2, 2, false), gy00 = piece(0, 0, false);
  const SpMat gy20 = piece(2, 0, false), gy02 = piece(0, 2, false);
  const KronTerm terms[] = {
      {&gx22, &gy00, 1.0}, {&gx00, &gy22, 1.0}, {&gx20, &gy02, 1.0}, {&gx02, &gy20, 1.0}};
  return kron_sum(terms, exec);
}

SpMat cross_laplace_gramian(const TensorSpace& test, const TensorSpace& trial, Exec exec) {
  const SpMat hx20 = slice(gramian_1d(test.x_space, trial.x_space, 2, 0), test.x_offset(),
                           test.nx(), trial.x_offset(), trial.nx());
  const SpMat hx00 = slice(gramian_1d(test.x_space, trial.x_space, 0, 0), test.x_offset(),
                           test.nx(), trial.x_offset(), trial.nx());
  const SpMat hy20 = slice(gramian_1d(test.y_space, trial.y_space, 2, 0), test.y_offset(),
                           test.ny(), trial.y_offset(), trial.ny());
  const SpMat hy00 = slice(gramian_1d(test.y_space, trial.y_space, 0, 0), test.y_offset(),
                           test.ny(), trial.y_offset(), trial.ny());
  const KronTerm terms[] = {{&hx20, &hy00, 1.0}, {&hx00, &hy20, 1.0}};
  return kron_sum(terms, exec);
}

SpMat boundary_mass(const TensorSpace& test, const TensorSpace& trial) {
  const SpMat gx = slice(gramian_1d(test.x_space, trial.x_space, 0, 0), test.x_offset(),
                         test.nx(), trial.x_offset(), trial.nx());
  const SpMat gy = slice(gramian_1d(test.y_space, trial.y_space, 0, 0), test.y_offset(),
                         test.ny(), trial.y_offset(), trial.ny());

  const Vec ty0_t = trace_values(test.y_space, test.y_offset(), test.ny(), 0.0);
  const Vec ty1_t = trace_values(test.y_space, test.y_offset(), test.ny(), 1.0);
  const Vec ty0_r = trace_values(trial.y_space, trial.y_offset(), trial.ny(), 0.0);
  const Vec ty1_r = trace_values(trial.y_space, trial.y_offset(), trial.ny(), 1.0);
  const Vec tx0_t = trace_values(test.x_space, test.x_offset(), test.nx(), 0.0);
  const Vec tx1_t = trace_values(test.x_space, test.x_offset(), test.nx(), 1.0);
  const Vec tx0_r = trace_values(trial.x_space, trial.x_offset(), trial.nx(), 0.0);
  const Vec tx1_r = trace_values(trial.x_space, trial.x_offset(), trial.nx(), 1.0);

  const SpMat ey = outer_sparse(ty0_t, ty0_r) + outer_sparse(ty1_t, ty1_r);
  const SpMat ex = outer_sparse(tx0_t, tx0_r) + outer_sparse(tx1_t, tx1_r);

  const KronTerm terms[] = {{&gx, &ey, 1.0}, {&ex, &gy, 1.0}};
  return kron_sum(terms, Exec::kSerial);
}

SpMat subdomain_mass(const TensorSpace& test, const TensorSpace& trial, const Rect& gamma,
                     Exec exec) {
  align_rect(test, gamma);
  align_rect(trial, gamma);
  const SpMat gx = slice(gramian_1d(test.x_space, trial.x_space, 0, 0, gamma.x_lo, gamma.x_hi),
                         test.x_offset(), test.nx(), trial.x_offset(), trial.nx());
  const SpMat gy = slice(gramian_1d(test.y_space, trial.y_space, 0, 0, gamma.y_lo, gamma.y_hi),
                         test.y_offset(), test.ny(), trial.y_offset(), trial.ny());
  const KronTerm terms[] = {{&gx, &gy, 1.0}};
  return kron_sum(terms, exec);
}

SpMat mass_2d(const TensorSpace& test, const TensorSpace& trial, Exec exec) {
  return subdomain_mass(test, trial, Rect::unit(), exec);
}

namespace {

// One element's load contributions, shared by the serial and parallel paths.
void element_load(const detail::DirTable& tx, const detail::DirTable& ty, int ex, int ey,
                  const Func2& phi, bool neg_laplace, double* local, int nfy) {
  const int nfx = tx.basis[static_cast<size_t>(tx.idx(ex, 0))].count;
  for (int i = 0; i < nfx * nfy; ++i) local[i] = 0.0;
  for (int qx = 0; qx < tx.npts; ++qx) {
    const int ix = tx.idx(ex, qx);
    const auto& bx = tx.basis[static_cast<size_t>(ix)];
    const double x = tx.points[static_cast<size_t>(ix)];
    const double wx = tx.weights[static_cast<size_t>(ix)];
    for (int qy = 0; qy < ty.npts; ++qy) {
      const int iy = ty.idx(ey, qy);
      const auto& by = ty.basis[static_cast<size_t>(iy)];
      const double w = wx * ty.weights[static_cast<size_t>(iy)];
      const double f = w * phi(x, ty.points[static_cast<size_t>(iy)]);
      for (int a = 0; a < bx.count; ++a) {
        for (int b = 0; b < by.count; ++b) {
          const double shape = neg_laplace
                                   ? -(bx.value(2, a) * by.value(0, b) + bx.value(0, a) * by.value(2, b))
                                   : bx.value(0, a) * by.value(0, b);
          local[a * nfy + b] += f * shape;
        }
      }
    }
  }
}

Vec domain_load(const TensorSpace& test, const Func2& phi, bool neg_laplace,
                const GammaElements& ge, int npts, Exec exec) {
  const SplineSpace& sx = test.x_space;
  const SplineSpace& sy = test.y_space;
  const int max_deriv = neg_laplace ? 2 : 0;
  const detail::DirTable tx = detail::make_dir_table(sx, npts, max_deriv, ge.ex_lo, ge.ex_hi);
  const detail::DirTable ty = detail::make_dir_table(sy, npts, max_deriv, ge.ey_lo, ge.ey_hi);

  const int nfx = sx.degree() + 1, nfy = sy.degree() + 1;
  const int loc = nfx * nfy;
  const int nelx = ge.ex_hi - ge.ex_lo, nely = ge.ey_hi - ge.ey_lo;
  const int nelem = nelx * nely;

  Eigen::MatrixXd full = Eigen::MatrixXd::Zero(sx.dim, sy.dim);
  const auto scatter = [&](int e, const double* local) {
    const int ex = ge.ex_lo + e / nely, ey = ge.ey_lo + e % nely;
    const int fx = tx.basis[static_cast<size_t>(tx.idx(ex, 0))].first;
    const int fy = ty.basis[static_cast<size_t>(ty.idx(ey, 0))].first;
    for (int a = 0; a < nfx; ++a) {
      for (int b = 0; b < nfy; ++b) full(fx + a, fy + b) += local[a * nfy + b];
    }
  };

  if (exec == Exec::kParallel) {
    std::vector<double> all(static_cast<size_t>(nelem) * loc);
#ifdef IGALS_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int e = 0; e < nelem; ++e) {
      element_load(tx, ty, ge.ex_lo + e / nely, ge.ey_lo + e % nely, phi, neg_laplace,
                   all.data() + static_cast<size_t>(e) * loc, nfy);
    }
    for (int e = 0; e < nelem; ++e) scatter(e, all.data() + static_cast<size_t>(e) * loc);
  } else {
    std::vector<double> local(static_cast<size_t>(loc));
    for (int e = 0; e < nelem; ++e) {
      element_load(tx, ty, ge.ex_lo + e / nely, ge.ey_lo + e % nely, phi, neg_laplace,
                   local.data(), nfy);
      scatter(e, local.data());
    }
  }

  // Restrict to active indices.
  Vec out(test.dim());
  for (int ix = 0; ix < test.nx(); ++ix) {
    for (int iy = 0; iy < test.ny(); ++iy) {
      out[ix * test.ny() + iy] = full(ix + test.x_offset(), iy + test.y_offset());
    }
  }
  return out;
}

Vec boundary_load(const TensorSpace& test, const Func2& phi, int npts) {
  const SplineSpace& sx = test.x_space;
  const SplineSpace& sy = test.y_space;
  const detail::DirTable tx = detail::make_dir_table(sx, npts, 0, 0, sx.num_elements());
  const detail::DirTable ty = detail::make_dir_table(sy, npts, 0, 0, sy.num_elements());

  Eigen::MatrixXd full = Eigen::MatrixXd::Zero(sx.dim, sy.dim);
  const BasisValues y0 = eval_basis(sy, 0.0, 0), y1 = eval_basis(sy, 1.0, 0);
  const BasisValues x0 = eval_basis(sx, 0.0, 0), x1 = eval_basis(sx, 1.0, 0);

  // edges y = 0 and y = 1
  for (size_t i = 0; i < tx.points.size(); ++i) {
    const auto& bx = tx.basis[i];
    const double w = tx.weights[i], x = tx.points[i];
    const double f0 = w * phi(x, 0.0), f1 = w * phi(x, 1.0);
    for (int a = 0; a < bx.count; ++a) {
      for (int b = 0; b < y0.count; ++b) {
        full(bx.first + a, y0.first + b) += f0 * bx.value(0, a) * y0[b];
      }
      for (int b = 0; b < y1.count; ++b) {
        full(bx.first + a, y1.first + b) += f1 * bx.value(0, a) * y1[b];
      }
    }
  }
  // edges x = 0 and x = 1
  for (size_t i = 0; i < ty.points.size(); ++i) {
    const auto& by = ty.basis[i];
    const double w = ty.weights[i], y = ty.points[i];
    const double f0 = w * phi(0.0, y), f1 = w * phi(1.0, y);
    for (int b = 0; b < by.count; ++b) {
      for (int a = 0; a < x0.count; ++a) {
        full(x0.first + a, by.first + b) += f0 * x0[a] * by.value(0, b);
      }
      for (int a = 0; a < x1.count; ++a) {
        full(x1.first + a, by.first + b) += f1 * x1[a] * by.value(0, b);
      }
    }
  }

  Vec out(test.dim());
  for (int ix = 0; ix < test.nx(); ++ix) {
    for (int iy = 0; iy < test.ny(); ++iy) {
      out[ix * test.ny() + iy] = full(ix + test.x_offset(), iy + test.y_offset());
    }
  }
  return out;
}

}  // namespace

Vec load_vector(const TensorSpace& test, const Func2& phi, LoadAction action,
                std::optional<Rect> gamma, Exec exec, int quad_points) {
  const int npts = quad_points > 0 ? quad_points
                                   : std::max(test.x_space.degree(), test.y_space.degree()) + 2;
  switch (action) {
    case LoadAction::kIdentityOnDomain: {
      const GammaElements ge{0, test.x_space.num_elements(), 0, test.y_space.num_elements()};
      return domain_load(test, phi, false, ge, npts, exec);
    }
    case LoadAction::kNegLaplaceTest: {
      const GammaElements ge{0, test.x_space.num_elements(), 0, test.y_space.num_elements()};
      return domain_load(test, phi, true, ge, npts, exec);
    }
    case LoadAction::kBoundaryTrace:
      return boundary_load(test, phi, npts);
    case LoadAction::kIdentityOnSubdomain: {
      if (!gamma) {
        throw Error(Errc::kMisalignedSubdomain, "load_vector: subdomain action needs a rectangle");
      }
      return domain_load(test, phi, false, align_rect(test, *gamma), npts, exec);
    }
  }
  throw Error(Errc::kDegenerateInput, "load_vector: unknown action");
}

double eval_field(const TensorSpace& space, const Vec& coeffs, double x, double y,
                  int dx, int dy) {
  const BasisValues bx = eval_basis(space.x_space, x, dx);
  const BasisValues by = eval_basis(space.y_space, y, dy);
  double v = 0.0;
  for (int a = 0; a < bx.count; ++a) {
    const int ix = bx.first + a - space.x_offset();
    if (ix < 0 || ix >= space.nx()) continue;
    for (int b = 0; b < by.count; ++b) {
      const int iy = by.first + b - space.y_offset();
      if (iy < 0 || iy >= space.ny()) continue;
      v += coeffs[ix * space.ny() + iy] * bx[a] * by[b];
    }
  }
  return v;
}

void write_matrix_market(const SpMat& m, const std::string& path) {
  std::ofstream out(path);
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << m.rows() << " " << m.cols() << " " << m.nonZeros() << "\n";
  char buf[64];
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SpMat::InnerIterator it(m, k); it; ++it) {
      std::snprintf(buf, sizeof buf, "%ld %ld %.17g\n", static_cast<long>(it.row() + 1),
                    static_cast<long>(it.col() + 1), it.value());
      out << buf;
    }
  }
}

}  // namespace igals
