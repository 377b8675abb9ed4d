#include <cmath>
#include <random>

#include <doctest.h>

#include "igals/cases.hpp"
#include "igals/errors.hpp"
#include "igals/inverse.hpp"
#include "oracles.hpp"

using igals::ControlSpace;
using igals::Func2;
using igals::InverseConfig;
using igals::InverseSolvePath;
using igals::Rect;
using igals::ScalarField2;
using igals::SpMat;
using igals::TensorSpace;
using igals::Vec;

namespace {

igals::ManufacturedCase bubble_case() {
  igals::ManufacturedCase c;
  c.name = "bubble";
  c.k = 1;
  ScalarField2 u;
  u.value = [](double x, double y) { return x * (1 - x) * y * (1 - y); };
  u.ddx = [](double x, double y) { return (1 - 2 * x) * y * (1 - y); };
  u.ddy = [](double x, double y) { return x * (1 - x) * (1 - 2 * y); };
  u.ddxx = [](double, double y) { return -2 * y * (1 - y); };
  u.ddxy = [](double x, double y) { return (1 - 2 * x) * (1 - 2 * y); };
  u.ddyy = [](double x, double) { return -2 * x * (1 - x); };
  c.u = c.u_d = u;
  c.f_p = [](double x, double y) { return 2 * y * (1 - y) + 2 * x * (1 - x); };  // -Delta u_d
  c.f = c.f_p;
  c.g = u.value;
  return c;
}

}  // namespace

TEST_CASE("zero-residual pair inside the ansatz is recovered exactly") {
  const auto c = bubble_case();
  for (ControlSpace control : {ControlSpace::kReduced, ControlSpace::kMaxContinuity}) {
    for (auto [b2, g2] : {std::pair{1.0, 1.0}, std::pair{1e-4, 1e4}, std::pair{1.0, 1e4}}) {
      InverseConfig cfg;
      cfg.p = 2;
      cfg.ell = 3;
      cfg.beta2 = b2;
      cfg.gamma2 = g2;
      cfg.control = control;
      cfg.gamma = Rect::unit();  // full observation
      const igals::InverseSolution sol = igals::solve_inverse(cfg, c.u_d.value, c.f_p);

      const TensorSpace state = igals::inverse_state_space(cfg);
      const igals::ErrorReport err_u = igals::field_error(sol.u_coeffs, state, c.u_d);
      CHECK(err_u.h2_full <= 1e-8 * err_u.ref_h2_full);

      // The reconstructed state vanishes on the boundary.
      std::mt19937_64 trace_rng(77);
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      for (int t = 0; t < 100; ++t) {
        const double s = unif(trace_rng);
        const double vals[4] = {igals::eval_field(state, sol.u_coeffs, s, 0.0),
                                igals::eval_field(state, sol.u_coeffs, s, 1.0),
                                igals::eval_field(state, sol.u_coeffs, 0.0, s),
                                igals::eval_field(state, sol.u_coeffs, 1.0, s)};
        for (double v : vals) CHECK(std::abs(v) <= 1e-12);
      }

      const TensorSpace control_space = igals::inverse_control_space(cfg);
      // L2 misfit of the recovered control against the exact prior.
      const Func2 f_h = oracle::field(control_space, sol.f_coeffs);
      const double misfit = oracle::gauss_2d(
          [&](double x, double y) {
            const double d = f_h(x, y) - c.f_p(x, y);
            return d * d;
          },
          Rect::unit(), 2 * (1 << cfg.ell), 8);
      const double norm = oracle::gauss_2d(
          [&](double x, double y) {
            const double v = c.f_p(x, y);
            return v * v;
          },
          Rect::unit(), 2 * (1 << cfg.ell), 8);
      CHECK(std::sqrt(misfit) <= 1e-8 * std::sqrt(norm));
    }
  }
}

TEST_CASE("assembled two-field matrix is symmetric") {
  InverseConfig cfg;
  cfg.p = 2;
  cfg.ell = 2;
  const auto mcase = igals::example2_case(1);
  const igals::InverseAssembly a = igals::assemble_inverse(cfg, mcase.u_d.value, mcase.f_p);
  const SpMat full = a.system.lower.selfadjointView<Eigen::Lower>();
  // The lower-triangle storage mirrors exactly; check the assembled blocks too.
  const Eigen::MatrixXd cross = Eigen::MatrixXd(a.coupling);
  const Eigen::MatrixXd state_block = Eigen::MatrixXd(a.state_block);
  CHECK((state_block - state_block.transpose()).cwiseAbs().maxCoeff() <=
        1e-13 * state_block.cwiseAbs().maxCoeff());
  const Eigen::MatrixXd mass = Eigen::MatrixXd(a.control_mass);
  CHECK((mass - mass.transpose()).cwiseAbs().maxCoeff() <= 1e-13 * mass.cwiseAbs().maxCoeff());
  CHECK(cross.rows() == a.state.dim());
  CHECK(cross.cols() == a.control.dim());
}

TEST_CASE("solution satisfies the optimality system in both blocks") {
  InverseConfig cfg;
  cfg.p = 2;
  cfg.ell = 3;
  cfg.beta2 = 1e-2;
  cfg.gamma2 = 1e2;
  const auto mcase = igals::example2_case(1);
  const igals::InverseAssembly a = igals::assemble_inverse(cfg, mcase.u_d.value, mcase.f_p);
  const igals::InverseSolution sol =
      igals::solve_inverse(cfg, mcase.u_d.value, mcase.f_p, InverseSolvePath::kCondensed);

  const Vec r_state = a.state_block * sol.u_coeffs + cfg.gamma2 * (a.coupling * sol.f_coeffs) -
                      a.rhs_state;
  const Vec r_control = cfg.gamma2 * (a.coupling.transpose() * sol.u_coeffs) +
                        (cfg.beta2 + cfg.gamma2) * (a.control_mass * sol.f_coeffs) -
                        a.rhs_control;
  const double scale = std::max(a.rhs_state.norm(), a.rhs_control.norm());
  CHECK(r_state.norm() <= 1e-9 * scale);
  CHECK(r_control.norm() <= 1e-9 * scale);
}

TEST_CASE("condensed and monolithic paths agree in both fields") {
  const auto mcase = igals::example2_case(1);
  for (int ell : {3, 4}) {
    InverseConfig cfg;
    cfg.p = 2;
    cfg.ell = ell;
    cfg.beta2 = 1e-2;
    cfg.gamma2 = 1e2;
    const igals::InverseSolution a =
        igals::solve_inverse(cfg, mcase.u_d.value, mcase.f_p, InverseSolvePath::kCondensed);
    const igals::InverseSolution b =
        igals::solve_inverse(cfg, mcase.u_d.value, mcase.f_p, InverseSolvePath::kMonolithic);
    CHECK((a.u_coeffs - b.u_coeffs).norm() <= 1e-9 * b.u_coeffs.norm());
    CHECK((a.f_coeffs - b.f_coeffs).norm() <= 1e-9 * b.f_coeffs.norm());
  }
}

TEST_CASE("direct quadrature of the two-field loss matches the quadratic form") {
  InverseConfig cfg;
  cfg.p = 2;
  cfg.ell = 2;
  cfg.beta2 = 0.5;
  cfg.gamma2 = 2.0;
  const auto mcase = igals::example2_case(1);
  const igals::InverseAssembly a = igals::assemble_inverse(cfg, mcase.u_d.value, mcase.f_p);
  const SpMat full = a.system.lower.selfadjointView<Eigen::Lower>();

  std::mt19937_64 rng(43);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec z(a.state.dim() + a.control.dim());
  for (int i = 0; i < z.size(); ++i) z[i] = normal(rng);
  const Vec u = z.head(a.state.dim());
  const Vec f = z.tail(a.control.dim());

  const Func2 lap_u = oracle::laplacian(a.state, u);
  const Func2 u_h = oracle::field(a.state, u);
  const Func2 f_h = oracle::field(a.control, f);
  const int nel = 2 * (1 << cfg.ell);
  const double pde = oracle::gauss_2d(
      [&](double x, double y) {
        const double r = -lap_u(x, y) - f_h(x, y);
        return r * r;
      },
      Rect::unit(), nel, 10);
  const double obs = oracle::gauss_2d(
      [&](double x, double y) {
        const double r = u_h(x, y) - mcase.u_d.value(x, y);
        return r * r;
      },
      Rect::square(0.25, 0.75), nel, 10);
  const double prior = oracle::gauss_2d(
      [&](double x, double y) {
        const double r = f_h(x, y) - mcase.f_p(x, y);
        return r * r;
      },
      Rect::unit(), nel, 10);
  const double direct = cfg.gamma2 * pde + obs + cfg.beta2 * prior;

  const double c0 = oracle::gauss_2d(
                        [&](double x, double y) {
                          const double v = mcase.u_d.value(x, y);
                          return v * v;
                        },
                        Rect::square(0.25, 0.75), nel, 10) +
                    cfg.beta2 * oracle::gauss_2d(
                                    [&](double x, double y) {
                                      const double v = mcase.f_p(x, y);
                                      return v * v;
                                    },
                                    Rect::unit(), nel, 10);
  Vec rhs(z.size());
  rhs.head(a.state.dim()) = a.rhs_state;
  rhs.tail(a.control.dim()) = a.rhs_control;
  const double quadratic = z.dot(full * z) - 2.0 * z.dot(rhs) + c0;
  CHECK(direct == doctest::Approx(quadratic).epsilon(1e-7));
}

TEST_CASE("containment keeps the sweep flat across the weight grid") {
  const double beta2s[] = {1.0, 1e-2, 1e-4};
  const double gamma2s[] = {1.0, 1e2, 1e4};
  for (int ell : {4, 5}) {
    const auto runs =
        igals::inverse_parameter_sweep(2, ell, 1, beta2s, gamma2s, ControlSpace::kReduced);
    REQUIRE(runs.size() == 9);
    double lo = 1e300, hi = 0.0;
    for (const auto& run : runs) {
      const double err = run.error.rel_h2_full();
      lo = std::min(lo, err);
      hi = std::max(hi, err);
    }
    CHECK(hi <= 1.02 * lo);
  }
}

TEST_CASE("schur identity holds exactly under containment") {
  for (auto [p, ell] : {std::pair{2, 2}, std::pair{2, 3}, std::pair{3, 2}}) {
    const igals::SchurCheck check =
        igals::schur_identity_check(p, ell, ControlSpace::kReduced);
    CHECK(check.is_containment);
    CHECK(check.max_relative_gap <= 1e-10);
    CHECK(check.max_upper_violation <= 1e-10);
  }
}

TEST_CASE("maximal continuity control only satisfies the upper bound") {
  const igals::SchurCheck check =
      igals::schur_identity_check(2, 2, ControlSpace::kMaxContinuity);
  CHECK_FALSE(check.is_containment);
  CHECK(check.max_upper_violation <= 1e-10);  // (G u, u) <= ||Delta u||^2 always
  CHECK(check.max_relative_gap > 1e-3);       // strict loss for some u
}

TEST_CASE("fields with globally continuous laplacian show no gap either way") {
  // For the quadratic bubble, Delta u is a biquadratic polynomial, hence inside
  // even the maximal-continuity control space.
  InverseConfig cfg;
  cfg.p = 2;
  cfg.ell = 2;
  cfg.control = ControlSpace::kMaxContinuity;
  const TensorSpace state = igals::inverse_state_space(cfg);
  const TensorSpace control = igals::inverse_control_space(cfg);
  const Vec u = oracle::greville_interpolant_2d(
      state, [](double x, double y) { return x * (1 - x) * y * (1 - y); });

  const Eigen::MatrixXd laplace =
      Eigen::MatrixXd(igals::laplace_gramian_2d(state, state));
  const Eigen::MatrixXd coupling =
      Eigen::MatrixXd(igals::cross_laplace_gramian(state, control));
  const Eigen::MatrixXd mass = Eigen::MatrixXd(igals::mass_2d(control, control));
  const Eigen::MatrixXd schur = coupling * mass.ldlt().solve(coupling.transpose());
  const double q_schur = u.dot(schur * u);
  const double q_laplace = u.dot(laplace * u);
  CHECK(std::abs(q_schur - q_laplace) <= 1e-10 * q_laplace);
}

TEST_CASE("dense schur verification refuses large meshes") {
  CHECK_THROWS_AS(igals::schur_identity_check(2, 4, ControlSpace::kReduced), igals::Error);
}

TEST_CASE("invalid inverse configurations are rejected") {
  const auto mcase = igals::example2_case(1);
  InverseConfig cfg;
  cfg.beta2 = 0.0;
  CHECK_THROWS_AS(igals::assemble_inverse(cfg, mcase.u_d.value, mcase.f_p), igals::Error);
  cfg.beta2 = 1.0;
  cfg.gamma2 = -1.0;
  CHECK_THROWS_AS(igals::assemble_inverse(cfg, mcase.u_d.value, mcase.f_p), igals::Error);
  cfg.gamma2 = 1.0;
  cfg.ell = 1;  // default Gamma corners miss the knot lines
  CHECK_THROWS_AS(igals::assemble_inverse(cfg, mcase.u_d.value, mcase.f_p), igals::Error);
  try {
    igals::assemble_inverse(cfg, mcase.u_d.value, mcase.f_p);
  } catch (const igals::Error& e) {
    CHECK(e.code() == igals::Errc::kMisalignedSubdomain);
  }
}

TEST_CASE("large prior weight pulls the control to the projected prior") {
  InverseConfig cfg;
  cfg.p = 2;
  cfg.ell = 3;
  cfg.beta2 = 1e8;
  cfg.gamma2 = 1.0;
  const auto mcase = igals::example2_case(1);
  const igals::InverseSolution sol = igals::solve_inverse(cfg, mcase.u_d.value, mcase.f_p);

  const TensorSpace control = igals::inverse_control_space(cfg);
  const SpMat mass = igals::mass_2d(control, control);
  const Vec load = igals::load_vector(control, mcase.f_p, igals::LoadAction::kIdentityOnDomain);
  const Vec projection = oracle::solve_long_double(mass, load);
  CHECK((sol.f_coeffs - projection).norm() <= 1e-4 * projection.norm());
}
