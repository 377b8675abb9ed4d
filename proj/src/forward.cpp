#include "igals/forward.hpp"

#include <chrono>
#include <string>

#include "assembly_highprec.hpp"
#include "igals/errors.hpp"

namespace igals {
namespace {

void validate(const ForwardConfig& cfg) {
  if (cfg.p < 2) {
    throw Error(Errc::kInvalidDegree, "forward problem needs p >= 2 (second derivatives)");
  }
  if (!(cfg.alpha2 > 0.0)) {
    throw Error(Errc::kInvalidWeight, "forward problem needs alpha2 > 0");
  }
}

}  // namespace

TensorSpace forward_space(const ForwardConfig& cfg) {
  validate(cfg);
  return make_tensor_space(cfg.p, cfg.ell, cfg.p - 1, /*dirichlet=*/false);
}

SparseSymmetricSystem assemble_forward(const ForwardConfig& cfg, const Func2& f, const Func2& g,
                                       Exec exec) {
  const TensorSpace space = forward_space(cfg);
  SpMat laplace = laplace_gramian_2d(space, space, exec);
  SpMat bmass = boundary_mass(space, space);
  const SpMat matrix = laplace + cfg.alpha2 * bmass;
  const Vec rhs = load_vector(space, f, LoadAction::kNegLaplaceTest, std::nullopt, exec) +
                  cfg.alpha2 * load_vector(space, g, LoadAction::kBoundaryTrace);
  SparseSymmetricSystem sys = make_system(matrix, rhs);
  sys.residual_terms = {{1.0L, detail::laplace_gramian_2d_ld(space, space)},
                        {static_cast<long double>(cfg.alpha2),
                         detail::boundary_mass_ld(space, space)}};
  sys.rhs_ld = detail::load_vector_ld(space, f, LoadAction::kNegLaplaceTest) +
               static_cast<long double>(cfg.alpha2) *
                   detail::load_vector_ld(space, g, LoadAction::kBoundaryTrace);
  return sys;
}

ForwardRun solve_forward(const ForwardConfig& cfg, const ManufacturedCase& mcase, Exec exec,
                         const SolveOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  ForwardRun run;
  run.cfg = cfg;
  run.space = forward_space(cfg);
  const SparseSymmetricSystem system = assemble_forward(cfg, mcase.f, mcase.g, exec);
  auto [x, report] = factor_and_solve(system, options);
  run.coeffs = std::move(x);
  run.solve = report;
  run.error = field_error(run.coeffs, run.space, mcase.u, exec);
  run.error.params = {cfg.p, cfg.ell, cfg.k, cfg.alpha2, std::nullopt, std::nullopt, ""};
  run.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return run;
}

std::vector<ForwardRun> forward_convergence_study(int p, int k, std::span<const int> ells,
                                                  std::span<const double> alpha2s, Exec exec,
                                                  const SolveOptions& options) {
  const ManufacturedCase mcase = example1_case(k);
  std::vector<ForwardRun> runs;
  runs.reserve(ells.size() * alpha2s.size());
  for (int ell : ells) {
    for (double alpha2 : alpha2s) {
      runs.push_back(solve_forward({p, ell, k, alpha2}, mcase, exec, options));
    }
  }
  return runs;
}

}  // namespace igals
