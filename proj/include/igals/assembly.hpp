#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <optional>
#include <span>
#include <string>

#include "igals/exec.hpp"
#include "igals/spline.hpp"

namespace igals {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;
using Func2 = std::function<double(double, double)>;

/// Axis-aligned rectangle, corners on knot lines of the spaces it is used with.
struct Rect {
  double x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;

  static Rect square(double lo, double hi) { return {lo, hi, lo, hi}; }
  static Rect unit() { return {0.0, 1.0, 0.0, 1.0}; }
  bool is_unit() const {
    return x_lo == 0.0 && x_hi == 1.0 && y_lo == 0.0 && y_hi == 1.0;
  }
};

/// Tensor product of two spline spaces on (0,1)^2. With dirichlet = true the
/// first and last basis function of each direction are removed, which is
/// exactly the subspace of functions with vanishing boundary trace.
/// Active indices are flattened x-major: index = ix * ny() + iy.
struct TensorSpace {
  SplineSpace x_space;
  SplineSpace y_space;
  bool dirichlet = false;

  int x_offset() const { return dirichlet ? 1 : 0; }
  int y_offset() const { return dirichlet ? 1 : 0; }
  int nx() const { return x_space.dim - 2 * x_offset(); }
  int ny() const { return y_space.dim - 2 * y_offset(); }
  int dim() const { return nx() * ny(); }
};

TensorSpace make_tensor_space(const SplineSpace& sx, const SplineSpace& sy, bool dirichlet);
TensorSpace make_tensor_space(int degree, int level, int continuity, bool dirichlet);

/// G_{ij} = int_lo^hi D^a B_i^test D^b B_j^trial dx by per-element Gauss
/// quadrature with max(p_test, p_trial)+1 points (exact for the polynomial
/// integrand). lo and hi must be breakpoints of both spaces
/// (kMisalignedInterval otherwise). quad_points overrides the rule order
/// when nonzero (used by the quadrature-consistency tests).
SpMat gramian_1d(const SplineSpace& test, const SplineSpace& trial, int a, int b,
                 double lo = 0.0, double hi = 1.0, int quad_points = 0);

/// Sum of Kronecker products  sum_k coeff_k * X_k (x) Y_k  with x-major
/// flattening. Column contents are computed independently, so the parallel
/// path is entrywise identical to the serial one.
struct KronTerm {
  const SpMat* x = nullptr;
  const SpMat* y = nullptr;
  double coeff = 1.0;
};
SpMat kron_sum(std::span<const KronTerm> terms, Exec exec = Exec::kParallel);

/// (Delta u, Delta v)_Omega between tensor spaces sharing (0,1)^2; symmetric
/// positive semidefinite when test == trial.
SpMat laplace_gramian_2d(const TensorSpace& test, const TensorSpace& trial,
                         Exec exec = Exec::kParallel);

/// (f, Delta v)_Omega for v in the test space, f in the trial space.
SpMat cross_laplace_gramian(const TensorSpace& test, const TensorSpace& trial,
                            Exec exec = Exec::kParallel);

/// (u, v)_{boundary of (0,1)^2}: trace products summed over the four edges.
SpMat boundary_mass(const TensorSpace& test, const TensorSpace& trial);

/// (u, v)_Gamma over an axis-aligned, knot-aligned rectangle
/// (kMisalignedSubdomain otherwise).
SpMat subdomain_mass(const TensorSpace& test, const TensorSpace& trial, const Rect& gamma,
                     Exec exec = Exec::kParallel);

/// Full mass matrix (u, v)_Omega.
SpMat mass_2d(const TensorSpace& test, const TensorSpace& trial, Exec exec = Exec::kParallel);

enum class LoadAction {
  kIdentityOnDomain,   // int_Omega phi B_i
  kNegLaplaceTest,     // int_Omega phi (-Delta B_i)
  kBoundaryTrace,      // int_{boundary} phi B_i
  kIdentityOnSubdomain  // int_Gamma phi B_i
};

/// Right-hand-side assembly with p+2 Gauss points per direction (data
/// functions are not polynomial). quad_points overrides when nonzero.
Vec load_vector(const TensorSpace& test, const Func2& phi, LoadAction action,
                std::optional<Rect> gamma = std::nullopt, Exec exec = Exec::kParallel,
                int quad_points = 0);

/// Value of the (dx,dy)-derivative of the discrete field at (x, y);
/// coeffs are active-index coefficients of the space.
double eval_field(const TensorSpace& space, const Vec& coeffs, double x, double y,
                  int dx = 0, int dy = 0);

/// Matrix Market coordinate export ("%%MatrixMarket matrix coordinate real general").
void write_matrix_market(const SpMat& m, const std::string& path);

}  // namespace igals
