#pragma once

#include <utility>

#include "igals/assembly.hpp"

namespace igals {

using SpMatLd = Eigen::SparseMatrix<long double>;
using VecLd = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
using ResidualTerms = std::vector<std::pair<long double, SpMatLd>>;

/// Symmetric sparse system: only the lower triangle is stored, together with
/// the symmetric Jacobi scaling d (d_i A_ij d_j has unit diagonal).
struct SparseSymmetricSystem {
  int n = 0;
  SpMat lower;
  Vec rhs;
  Vec equilibration;
  /// Optional exact summands coeff*M of the operator (full storage, extended
  /// precision). When present, refinement residuals are accumulated term by
  /// term: pre-summing unbalanced terms (tiny observation mass plus a
  /// 1e4-weighted stiffness, say) rounds the small term's contribution away
  /// and caps the attainable forward error well above working precision.
  ResidualTerms residual_terms;
  /// Optional extended-precision right-hand side matching residual_terms.
  VecLd rhs_ld;
};

/// Extracts the lower triangle of a symmetric matrix and its Jacobi scaling.
SparseSymmetricSystem make_system(const SpMat& symmetric, Vec rhs);

struct SolveReport {
  double residual_norm = 0.0;      // ||Ax-b||_2 / ||b||_2 after refinement
  int refinement_steps = 0;
  double condition_estimate = 0.0; // 1-norm estimate of the equilibrated matrix (diagnostic)
  /// Set when the backward-stable target tol*(||b|| + ||A|| ||x||) was missed.
  /// (tol*||b|| alone is unattainable in double precision when ||A|| ||x||
  /// dwarfs ||b||, as it does at the extreme weight combinations.)
  bool refinement_stalled = false;
};

struct SolveOptions {
  double tol = 1e-10;
  int max_refine = 10;
  bool equilibrate = true;
  bool estimate_condition = true;
};

/// Equilibrated sparse LDL^T factorization plus iterative refinement
/// (residuals accumulated in long double). Throws kNotPositiveDefinite on a
/// nonpositive pivot; a missed residual target is flagged in the report, not
/// thrown, and the best iterate is returned.
std::pair<Vec, SolveReport> factor_and_solve(const SparseSymmetricSystem& system,
                                             const SolveOptions& options = {});

/// Static condensation of the control block when the control mass matrix is
/// element-block-diagonal. The inputs are the assembled blocks of
///   [[primary_block, g2*C], [g2*C^T, (b2+g2)*M_f]] (u, f) = (rhs_primary, rhs_control),
/// and the reduced system is the exact Schur complement in u.
struct CondensedSystem {
  SparseSymmetricSystem reduced;
  SpMat control_mass_inv;
  SpMat coupling;      // C
  SpMat primary_block;
  SpMat control_mass;  // M_f, unscaled
  Vec rhs_primary;
  Vec rhs_control;
  double beta2 = 0.0, gamma2 = 0.0;
  /// Exact summands of the stacked two-field operator (see
  /// SparseSymmetricSystem); block_condense seeds them from the double blocks
  /// and callers may replace them with extended-precision assemblies.
  ResidualTerms stacked_terms;
  VecLd stacked_rhs_ld;

  /// Back-substitution f = (b2+g2)^{-1} M_f^{-1} (rhs_control - g2 C^T u).
  Vec recover_control(const Vec& primary) const;
};

/// Throws kNotBlockDiagonal when the control mass couples more than
/// max_block_size unknowns in one connected component ((p+1)^2 for a
/// fully discontinuous tensor control space).
CondensedSystem block_condense(const SpMat& primary_block, const SpMat& coupling,
                               const SpMat& control_mass, const Vec& rhs_primary,
                               const Vec& rhs_control, double beta2, double gamma2,
                               int max_block_size);

/// Solves the coupled two-field system through the condensed factorization,
/// with iterative refinement against the original blocks: the numerically
/// formed Schur complement then only acts as a preconditioner and the
/// returned pair matches a monolithic solve to working accuracy.
std::pair<std::pair<Vec, Vec>, SolveReport> solve_condensed(const CondensedSystem& system,
                                                            const SolveOptions& options = {});

}  // namespace igals
