#include <cmath>
#include <random>

#include <doctest.h>

#include "igals/cases.hpp"
#include "igals/errors.hpp"
#include "igals/forward.hpp"
#include "oracles.hpp"

using igals::ForwardConfig;
using igals::Func2;
using igals::Rect;
using igals::SpMat;
using igals::TensorSpace;
using igals::Vec;

namespace {

// L1 by direct quadrature, independent of the assembled quadratic form.
double loss_by_quadrature(const TensorSpace& space, const Vec& coeffs, const Func2& f,
                          const Func2& g, double alpha2) {
  const Func2 lap = oracle::laplacian(space, coeffs);
  const double interior = oracle::gauss_2d(
      [&](double x, double y) {
        const double r = -lap(x, y) - f(x, y);
        return r * r;
      },
      Rect::unit(), 2 * space.x_space.num_elements(), 10);
  const auto edge = [&](const std::function<double(double)>& u_tr,
                        const std::function<double(double)>& g_tr) {
    return oracle::simpson(
        [&](double t) {
          const double r = u_tr(t) - g_tr(t);
          return r * r;
        },
        0.0, 1.0, 2048);
  };
  const double boundary =
      edge([&](double t) { return igals::eval_field(space, coeffs, t, 0.0); },
           [&](double t) { return g(t, 0.0); }) +
      edge([&](double t) { return igals::eval_field(space, coeffs, t, 1.0); },
           [&](double t) { return g(t, 1.0); }) +
      edge([&](double t) { return igals::eval_field(space, coeffs, 0.0, t); },
           [&](double t) { return g(0.0, t); }) +
      edge([&](double t) { return igals::eval_field(space, coeffs, 1.0, t); },
           [&](double t) { return g(1.0, t); });
  return interior + alpha2 * boundary;
}

double loss_constant(const Func2& f, const Func2& g, double alpha2, int nel) {
  const double interior = oracle::gauss_2d(
      [&](double x, double y) {
        const double v = f(x, y);
        return v * v;
      },
      Rect::unit(), 2 * nel, 10);
  const auto edge_sq = [&](const std::function<double(double)>& tr) {
    return oracle::simpson([&](double t) { const double v = tr(t); return v * v; }, 0.0, 1.0,
                           2048);
  };
  const double boundary = edge_sq([&](double t) { return g(t, 0.0); }) +
                          edge_sq([&](double t) { return g(t, 1.0); }) +
                          edge_sq([&](double t) { return g(0.0, t); }) +
                          edge_sq([&](double t) { return g(1.0, t); });
  return interior + alpha2 * boundary;
}

}  // namespace

TEST_CASE("constant boundary data is reproduced exactly") {
  const ForwardConfig cfg{2, 2, 1, 1.0};
  const Func2 zero = [](double, double) { return 0.0; };
  const Func2 one = [](double, double) { return 1.0; };
  const igals::SparseSymmetricSystem sys = igals::assemble_forward(cfg, zero, one);
  auto [x, report] = igals::factor_and_solve(sys);
  CHECK((x - Vec::Ones(x.size())).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("quadratics in the ansatz space are reproduced for any weight") {
  igals::ManufacturedCase quad;
  quad.k = 1;
  quad.u.value = [](double x, double y) { return x * (1 - x) + y * (1 - y); };
  quad.u.ddx = [](double x, double) { return 1 - 2 * x; };
  quad.u.ddy = [](double, double y) { return 1 - 2 * y; };
  quad.u.ddxx = [](double, double) { return -2.0; };
  quad.u.ddxy = [](double, double) { return 0.0; };
  quad.u.ddyy = [](double, double) { return -2.0; };
  quad.f = [](double, double) { return 4.0; };  // -Delta u
  quad.g = quad.u.value;

  for (double alpha2 : {1e-6, 1.0, 1e6}) {
    for (int ell : {0, 2}) {
      const igals::ForwardRun run = igals::solve_forward({2, ell, 1, alpha2}, quad);
      CHECK(run.error.h2_full <= 1e-8);
    }
  }
}

TEST_CASE("table cell at l=3, alpha^2=1 lands on the expected value") {
  const igals::ForwardRun run = igals::solve_forward({2, 3, 1, 1.0}, igals::example1_case(1));
  CHECK(run.error.rel_h2_full() == doctest::Approx(7.86e-2).epsilon(0.05));
  CHECK(run.error.dof == 100);
  CHECK(run.solve.residual_norm <= 1e-10);
}

TEST_CASE("H2 convergence is first order at p=2") {
  std::vector<double> errors;
  for (int ell : {3, 4, 5}) {
    errors.push_back(igals::solve_forward({2, ell, 1, 1.0}, igals::example1_case(1))
                         .error.rel_h2_full());
  }
  const auto rates = igals::observed_rate(errors);
  for (double r : rates) {
    CHECK(r >= 0.95);
    CHECK(r <= 1.05);
  }
}

TEST_CASE("discrete solution minimizes the assembled loss") {
  const ForwardConfig cfg{2, 3, 1, 1.0};
  const auto mcase = igals::example1_case(1);
  const igals::SparseSymmetricSystem sys = igals::assemble_forward(cfg, mcase.f, mcase.g);
  auto [x, report] = igals::factor_and_solve(sys);
  const SpMat full = sys.lower.selfadjointView<Eigen::Lower>();

  const auto quad_form = [&](const Vec& v) { return v.dot(full * v) - 2.0 * v.dot(sys.rhs); };
  const double base = quad_form(x);
  std::mt19937_64 rng(37);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(x.size()) - 1);
  for (int trial = 0; trial < 50; ++trial) {
    const int i = pick(rng);
    for (double eps : {1e-4, -1e-4}) {
      Vec xp = x;
      xp[i] += eps;
      CHECK(quad_form(xp) >= base - 1e-12 * std::abs(base));
    }
  }
}

TEST_CASE("direct quadrature of the loss matches the quadratic form") {
  const ForwardConfig cfg{2, 2, 1, 1.0};
  const auto mcase = igals::example1_case(1);
  const igals::SparseSymmetricSystem sys = igals::assemble_forward(cfg, mcase.f, mcase.g);
  const SpMat full = sys.lower.selfadjointView<Eigen::Lower>();
  const TensorSpace space = igals::forward_space(cfg);

  std::mt19937_64 rng(41);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec v(space.dim());
  for (int i = 0; i < v.size(); ++i) v[i] = normal(rng);

  const double direct = loss_by_quadrature(space, v, mcase.f, mcase.g, cfg.alpha2);
  const double constant = loss_constant(mcase.f, mcase.g, cfg.alpha2, space.x_space.num_elements());
  const double quadratic = v.dot(full * v) - 2.0 * v.dot(sys.rhs) + constant;
  CHECK(direct == doctest::Approx(quadratic).epsilon(1e-8));
}

TEST_CASE("solutions inherit the x-y symmetry of the data") {
  const igals::ForwardRun run = igals::solve_forward({2, 3, 1, 1.0}, igals::example1_case(1));
  const int n = run.space.nx();
  Eigen::Map<const Eigen::MatrixXd> grid(run.coeffs.data(), run.space.ny(), n);
  // x-major flattening: grid(iy, ix); the transpose swaps the two directions.
  const double scale = run.coeffs.cwiseAbs().maxCoeff();
  CHECK((grid - grid.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * scale);
}

TEST_CASE("invalid configurations are rejected") {
  const auto mcase = igals::example1_case(1);
  CHECK_THROWS_AS(igals::assemble_forward({1, 2, 1, 1.0}, mcase.f, mcase.g), igals::Error);
  CHECK_THROWS_AS(igals::assemble_forward({2, 2, 1, 0.0}, mcase.f, mcase.g), igals::Error);
  CHECK_THROWS_AS(igals::assemble_forward({2, -1, 1, 1.0}, mcase.f, mcase.g), igals::Error);
}
