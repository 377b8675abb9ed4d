#pragma once

#include <span>
#include <vector>

#include "igals/cases.hpp"
#include "igals/solver.hpp"

namespace igals {

struct ForwardConfig {
  int p = 2;
  int ell = 3;
  int k = 1;
  double alpha2 = 1.0;
};

/// Ansatz space S_{p,ell,p-1} (x) S_{p,ell,p-1}, no essential boundary
/// conditions (the boundary enters through the alpha^2 penalty only).
TensorSpace forward_space(const ForwardConfig& cfg);

/// System matrix (Delta u, Delta v) + alpha^2 (u, v)_boundary with rhs
/// (f, -Delta v) + alpha^2 (g, v)_boundary; symmetric positive definite for
/// alpha^2 > 0.
SparseSymmetricSystem assemble_forward(const ForwardConfig& cfg, const Func2& f, const Func2& g,
                                       Exec exec = Exec::kParallel);

struct ForwardRun {
  ForwardConfig cfg;
  TensorSpace space;
  Vec coeffs;
  SolveReport solve;
  ErrorReport error;
  double wall_time_s = 0.0;
};

ForwardRun solve_forward(const ForwardConfig& cfg, const ManufacturedCase& mcase,
                         Exec exec = Exec::kParallel, const SolveOptions& options = {});

/// One solve per (ell, alpha2) pair, ordered by (ell, alpha2) as given.
std::vector<ForwardRun> forward_convergence_study(int p, int k, std::span<const int> ells,
                                                  std::span<const double> alpha2s,
                                                  Exec exec = Exec::kParallel,
                                                  const SolveOptions& options = {});

}  // namespace igals
