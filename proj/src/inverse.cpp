#include "igals/inverse.hpp"

#include <chrono>
#include <random>
#include <vector>

#include "assembly_highprec.hpp"
#include "embed.hpp"
#include "igals/errors.hpp"

namespace igals {
namespace {

int control_continuity(const InverseConfig& cfg) {
  return cfg.control == ControlSpace::kReduced ? cfg.p - 3 : cfg.p - 1;
}

void validate(const InverseConfig& cfg) {
  if (cfg.p < 2) {
    throw Error(Errc::kInvalidDegree, "inverse problem needs p >= 2");
  }
  if (!(cfg.beta2 > 0.0) || !(cfg.gamma2 > 0.0)) {
    throw Error(Errc::kInvalidWeight, "inverse problem needs beta2 > 0 and gamma2 > 0");
  }
}

SpMat assemble_block_2x2(const SpMat& a, const SpMat& b, const SpMat& d) {
  // [[a, b], [b^T, d]]
  const int nu = static_cast<int>(a.rows());
  const int nf = static_cast<int>(d.rows());
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(a.nonZeros() + 2 * b.nonZeros() + d.nonZeros()));
  for (int k = 0; k < a.outerSize(); ++k) {
    for (SpMat::InnerIterator it(a, k); it; ++it) {
      trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    }
  }
  for (int k = 0; k < b.outerSize(); ++k) {
    for (SpMat::InnerIterator it(b, k); it; ++it) {
      trips.emplace_back(static_cast<int>(it.row()), nu + static_cast<int>(it.col()), it.value());
      trips.emplace_back(nu + static_cast<int>(it.col()), static_cast<int>(it.row()), it.value());
    }
  }
  for (int k = 0; k < d.outerSize(); ++k) {
    for (SpMat::InnerIterator it(d, k); it; ++it) {
      trips.emplace_back(nu + static_cast<int>(it.row()), nu + static_cast<int>(it.col()),
                         it.value());
    }
  }
  SpMat out(nu + nf, nu + nf);
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

}  // namespace

TensorSpace inverse_state_space(const InverseConfig& cfg) {
  validate(cfg);
  return make_tensor_space(cfg.p, cfg.ell, cfg.p - 1, /*dirichlet=*/true);
}

TensorSpace inverse_control_space(const InverseConfig& cfg) {
  validate(cfg);
  return make_tensor_space(cfg.p, cfg.ell, control_continuity(cfg), /*dirichlet=*/false);
}

InverseAssembly assemble_inverse(const InverseConfig& cfg, const Func2& u_d, const Func2& f_p,
                                 Exec exec) {
  InverseAssembly a;
  a.state = inverse_state_space(cfg);
  a.control = inverse_control_space(cfg);

  a.obs_mass = subdomain_mass(a.state, a.state, cfg.gamma, exec);
  a.laplace = laplace_gramian_2d(a.state, a.state, exec);
  a.state_block = a.obs_mass + cfg.gamma2 * a.laplace;
  a.coupling = cross_laplace_gramian(a.state, a.control, exec);
  a.control_mass = mass_2d(a.control, a.control, exec);
  a.rhs_state = load_vector(a.state, u_d, LoadAction::kIdentityOnSubdomain, cfg.gamma, exec);
  a.rhs_control = cfg.beta2 * load_vector(a.control, f_p, LoadAction::kIdentityOnDomain,
                                          std::nullopt, exec);

  const SpMat full = assemble_block_2x2(a.state_block, cfg.gamma2 * a.coupling,
                                        (cfg.beta2 + cfg.gamma2) * a.control_mass);
  Vec rhs(a.state.dim() + a.control.dim());
  rhs.head(a.state.dim()) = a.rhs_state;
  rhs.tail(a.control.dim()) = a.rhs_control;
  a.system = make_system(full, std::move(rhs));
  const int n = a.state.dim() + a.control.dim();
  const detail::SpMatLd obs_ld = detail::subdomain_mass_ld(a.state, a.state, cfg.gamma);
  const detail::SpMatLd laplace_ld = detail::laplace_gramian_2d_ld(a.state, a.state);
  const detail::SpMatLd coupling_ld = detail::cross_laplace_gramian_ld(a.state, a.control);
  const detail::SpMatLd mass_ld = detail::mass_2d_ld(a.control, a.control);
  const SpMatLd mass_embedded = detail::embed_diag<long double>(mass_ld, a.state.dim(), n);
  a.system.residual_terms = {
      {1.0L, detail::embed_diag<long double>(obs_ld, 0, n)},
      {static_cast<long double>(cfg.gamma2), detail::embed_diag<long double>(laplace_ld, 0, n)},
      {static_cast<long double>(cfg.gamma2),
       detail::embed_coupling<long double>(coupling_ld, a.state.dim(), n)},
      {static_cast<long double>(cfg.beta2), mass_embedded},
      {static_cast<long double>(cfg.gamma2), mass_embedded}};
  a.system.rhs_ld.resize(n);
  a.system.rhs_ld.head(a.state.dim()) =
      detail::load_vector_ld(a.state, u_d, LoadAction::kIdentityOnSubdomain, cfg.gamma);
  a.system.rhs_ld.tail(a.control.dim()) =
      static_cast<long double>(cfg.beta2) *
      detail::load_vector_ld(a.control, f_p, LoadAction::kIdentityOnDomain);
  return a;
}

InverseSolution solve_inverse(const InverseConfig& cfg, const Func2& u_d, const Func2& f_p,
                              InverseSolvePath path, Exec exec, const SolveOptions& options) {
  const InverseAssembly a = assemble_inverse(cfg, u_d, f_p, exec);
  const bool condensed = path == InverseSolvePath::kCondensed ||
                         (path == InverseSolvePath::kAuto && cfg.control == ControlSpace::kReduced);
  InverseSolution sol;
  if (condensed) {
    const int block = (cfg.p + 1) * (cfg.p + 1);
    CondensedSystem cs =
        block_condense(a.state_block, a.coupling, a.control_mass, a.rhs_state, a.rhs_control,
                       cfg.beta2, cfg.gamma2, block);
    cs.stacked_terms = a.system.residual_terms;
    cs.stacked_rhs_ld = a.system.rhs_ld;
    auto [uf, report] = solve_condensed(cs, options);
    sol.u_coeffs = std::move(uf.first);
    sol.f_coeffs = std::move(uf.second);
    sol.report = report;
  } else {
    auto [x, report] = factor_and_solve(a.system, options);
    sol.u_coeffs = x.head(a.state.dim());
    sol.f_coeffs = x.tail(a.control.dim());
    sol.report = report;
  }
  return sol;
}

std::vector<InverseRun> inverse_parameter_sweep(int p, int ell, int k,
                                                std::span<const double> beta2s,
                                                std::span<const double> gamma2s,
                                                ControlSpace control, Exec exec,
                                                const SolveOptions& options) {
  const ManufacturedCase mcase = example2_case(k);
  std::vector<InverseRun> runs;
  runs.reserve(beta2s.size() * gamma2s.size());
  for (double beta2 : beta2s) {
    for (double gamma2 : gamma2s) {
      const auto t0 = std::chrono::steady_clock::now();
      InverseRun run;
      run.cfg = InverseConfig{p, ell, k, beta2, gamma2, control, Rect::square(0.25, 0.75)};
      run.solution = solve_inverse(run.cfg, mcase.u_d.value, mcase.f_p,
                                   InverseSolvePath::kAuto, exec, options);
      const TensorSpace state = inverse_state_space(run.cfg);
      run.error = field_error(run.solution.u_coeffs, state, mcase.u_d, exec);
      run.error.params = {p, ell, k, std::nullopt, beta2, gamma2, control_space_name(control)};
      run.wall_time_s =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      runs.push_back(std::move(run));
    }
  }
  return runs;
}

SchurCheck schur_identity_check(int p, int ell, ControlSpace control, int num_random,
                                unsigned long seed) {
  if (ell > 3) {
    throw Error(Errc::kInvalidLevel, "schur_identity_check: dense verification needs ell <= 3");
  }
  InverseConfig cfg;
  cfg.p = p;
  cfg.ell = ell;
  cfg.control = control;
  const TensorSpace state = inverse_state_space(cfg);
  const TensorSpace ctrl = inverse_control_space(cfg);

  const Eigen::MatrixXd laplace = Eigen::MatrixXd(laplace_gramian_2d(state, state));
  const Eigen::MatrixXd coupling = Eigen::MatrixXd(cross_laplace_gramian(state, ctrl));
  const Eigen::MatrixXd mass = Eigen::MatrixXd(mass_2d(ctrl, ctrl));

  // G = C M_f^{-1} C^T; both quadratic forms are evaluated exactly (dense).
  const Eigen::MatrixXd minv_ct = mass.ldlt().solve(coupling.transpose());
  const Eigen::MatrixXd schur = coupling * minv_ct;

  SchurCheck out;
  out.is_containment = control == ControlSpace::kReduced;

  const auto probe = [&](const Vec& u) {
    const double q_schur = u.dot(schur * u);
    const double q_laplace = u.dot(laplace * u);
    if (q_laplace <= 0.0) return;
    const double gap = std::abs(q_schur - q_laplace) / q_laplace;
    out.max_relative_gap = std::max(out.max_relative_gap, gap);
    out.max_upper_violation =
        std::max(out.max_upper_violation, std::max(0.0, (q_schur - q_laplace) / q_laplace));
    ++out.vectors_tested;
  };

  const int n = state.dim();
  for (int i = 0; i < n; ++i) probe(Vec::Unit(n, i));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int r = 0; r < num_random; ++r) {
    Vec u(n);
    for (int i = 0; i < n; ++i) u[i] = normal(rng);
    probe(u);
  }
  return out;
}

}  // namespace igals
