#include <cmath>
#include <random>
#include <thread>

#include <doctest.h>

#include "igals/assembly.hpp"
#include "igals/cases.hpp"
#include "igals/error_metrics.hpp"

using igals::Exec;
using igals::Func2;
using igals::LoadAction;
using igals::make_tensor_space;
using igals::Rect;
using igals::SpMat;
using igals::TensorSpace;
using igals::Vec;

namespace {

double max_entry_gap(const SpMat& a, const SpMat& b) {
  return (Eigen::MatrixXd(a) - Eigen::MatrixXd(b)).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("parallel assembly kernels reproduce the serial reference exactly") {
  for (int p : {2, 3}) {
    const TensorSpace space = make_tensor_space(p, 3, p - 1, false);
    const TensorSpace control = make_tensor_space(p, 3, p - 3, false);

    CHECK(max_entry_gap(igals::laplace_gramian_2d(space, space, Exec::kSerial),
                        igals::laplace_gramian_2d(space, space, Exec::kParallel)) == 0.0);
    CHECK(max_entry_gap(igals::cross_laplace_gramian(space, control, Exec::kSerial),
                        igals::cross_laplace_gramian(space, control, Exec::kParallel)) == 0.0);
    CHECK(max_entry_gap(
              igals::subdomain_mass(space, space, Rect::square(0.25, 0.75), Exec::kSerial),
              igals::subdomain_mass(space, space, Rect::square(0.25, 0.75), Exec::kParallel)) ==
          0.0);

    const Func2 phi = [](double x, double y) { return std::cos(3 * x) * std::exp(y); };
    for (LoadAction action : {LoadAction::kIdentityOnDomain, LoadAction::kNegLaplaceTest}) {
      const Vec serial = igals::load_vector(space, phi, action, std::nullopt, Exec::kSerial);
      const Vec parallel = igals::load_vector(space, phi, action, std::nullopt, Exec::kParallel);
      CHECK((serial - parallel).cwiseAbs().maxCoeff() == 0.0);
    }
    const Vec sub_s = igals::load_vector(space, phi, LoadAction::kIdentityOnSubdomain,
                                         Rect::square(0.25, 0.75), Exec::kSerial);
    const Vec sub_p = igals::load_vector(space, phi, LoadAction::kIdentityOnSubdomain,
                                         Rect::square(0.25, 0.75), Exec::kParallel);
    CHECK((sub_s - sub_p).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("parallel error quadrature reproduces the serial reference exactly") {
  const TensorSpace space = make_tensor_space(2, 4, 1, false);
  const auto mcase = igals::example1_case(1);
  std::mt19937_64 rng(61);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec coeffs(space.dim());
  for (int i = 0; i < coeffs.size(); ++i) coeffs[i] = normal(rng);

  const igals::ErrorReport s = igals::field_error(coeffs, space, mcase.u, Exec::kSerial);
  const igals::ErrorReport par = igals::field_error(coeffs, space, mcase.u, Exec::kParallel);
  CHECK(s.l2 == par.l2);
  CHECK(s.h1_semi == par.h1_semi);
  CHECK(s.h2_semi == par.h2_semi);
  CHECK(s.h2_full == par.h2_full);
  CHECK(s.ref_h2_full == par.ref_h2_full);
}

TEST_CASE("assembly is safe to run from concurrent threads") {
  const TensorSpace space = make_tensor_space(2, 3, 1, false);
  const SpMat reference = igals::laplace_gramian_2d(space, space, Exec::kSerial);
  std::vector<SpMat> results(4);
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      const TensorSpace local = make_tensor_space(2, 3, 1, false);
      results[static_cast<size_t>(t)] = igals::laplace_gramian_2d(local, local, Exec::kSerial);
    });
  }
  for (auto& t : threads) t.join();
  for (const SpMat& r : results) CHECK(max_entry_gap(r, reference) == 0.0);
}
