#pragma once

#include <span>
#include <vector>

#include "igals/cases.hpp"
#include "igals/solver.hpp"

namespace igals {

/// Discrete control space F_h: S_{p,ell,p-1} (max continuity) or
/// S_{p,ell,p-3} (reduced continuity, which makes Delta U_h a subspace of F_h).
enum class ControlSpace { kMaxContinuity, kReduced };

inline const char* control_space_name(ControlSpace c) {
  return c == ControlSpace::kReduced ? "reduced" : "max";
}

struct InverseConfig {
  int p = 2;
  int ell = 6;
  int k = 1;
  double beta2 = 1.0;
  double gamma2 = 1.0;
  ControlSpace control = ControlSpace::kReduced;
  Rect gamma = Rect::square(0.25, 0.75);
};

/// State space U_h (Dirichlet-restricted S_{p,ell,p-1} tensor) of the config.
TensorSpace inverse_state_space(const InverseConfig& cfg);
/// Control space F_h of the config.
TensorSpace inverse_control_space(const InverseConfig& cfg);

/// Assembled blocks of the symmetric two-field system
///   [[M_Gamma + g2 L, g2 C], [g2 C^T, (b2+g2) M_f]] (u, f) = ((u_d,v)_Gamma, b2 (f_p,g)).
struct InverseAssembly {
  TensorSpace state;
  TensorSpace control;
  SpMat obs_mass;      // M_Gamma
  SpMat laplace;       // L on the state space
  SpMat state_block;   // M_Gamma + g2 L
  SpMat coupling;      // C: (f, Delta v)
  SpMat control_mass;  // M_f, unscaled
  Vec rhs_state;
  Vec rhs_control;     // includes the b2 factor
  SparseSymmetricSystem system;  // monolithic block 2x2
};

InverseAssembly assemble_inverse(const InverseConfig& cfg, const Func2& u_d, const Func2& f_p,
                                 Exec exec = Exec::kParallel);

struct InverseSolution {
  Vec u_coeffs;
  Vec f_coeffs;
  SolveReport report;
};

enum class InverseSolvePath { kAuto, kMonolithic, kCondensed };

/// Solves the two-field system. kAuto statically condenses the control when
/// its mass matrix is element-block-diagonal (reduced space) and solves the
/// coupled system otherwise; the two paths agree to solver accuracy.
InverseSolution solve_inverse(const InverseConfig& cfg, const Func2& u_d, const Func2& f_p,
                              InverseSolvePath path = InverseSolvePath::kAuto,
                              Exec exec = Exec::kParallel, const SolveOptions& options = {});

struct InverseRun {
  InverseConfig cfg;
  InverseSolution solution;
  ErrorReport error;  // state against u_d
  double wall_time_s = 0.0;
};

/// One solve per (beta2, gamma2) pair against the Example-2 data, ordered as given.
std::vector<InverseRun> inverse_parameter_sweep(int p, int ell, int k,
                                                std::span<const double> beta2s,
                                                std::span<const double> gamma2s,
                                                ControlSpace control,
                                                Exec exec = Exec::kParallel,
                                                const SolveOptions& options = {});

/// Dense verification of the containment identity A M_f^{-1} A = Delta^2 on
/// U_h: gap_u = |(C M_f^{-1} C^T u, u) - ||Delta u_h||^2| / ||Delta u_h||^2
/// over the full basis plus num_random Gaussian vectors. With the reduced
/// control space the gap vanishes to roundoff; with maximal continuity the
/// quadratic form stays below ||Delta u_h||^2 (upper bound inequality) and the
/// gap is strict for some u.
struct SchurCheck {
  double max_relative_gap = 0.0;
  bool is_containment = false;
  double max_upper_violation = 0.0;  // max over u of (q_G - q_L)/q_L, clipped at 0
  int vectors_tested = 0;
};

SchurCheck schur_identity_check(int p, int ell, ControlSpace control, int num_random = 50,
                                unsigned long seed = 12345);

}  // namespace igals
