// Compares the serial reference kernels against the OpenMP paths and reports
// speedups; the max|diff| column must stay at zero (identical reductions).

#include <chrono>
#include <cstdio>
#include <random>

#include "igals/assembly.hpp"
#include "igals/cases.hpp"
#include "igals/error_metrics.hpp"

using igals::Exec;
using igals::TensorSpace;
using igals::Vec;

namespace {

using Clock = std::chrono::steady_clock;

template <typename F>
double best_of(int reps, const F& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = Clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(Clock::now() - t0).count());
  }
  return best;
}

void report(const char* kernel, int ell, double t_serial, double t_parallel, double max_diff) {
  std::printf("%-18s ell=%d  serial %8.2f ms  parallel %8.2f ms  speedup %5.2fx  max|diff| %g\n",
              kernel, ell, 1e3 * t_serial, 1e3 * t_parallel, t_serial / t_parallel, max_diff);
}

}  // namespace

int main() {
  std::printf("threads: %d\n", igals::num_threads());
  const auto mcase = igals::example1_case(1);

  for (int ell : {5, 6, 7}) {
    const TensorSpace space = igals::make_tensor_space(2, ell, 1, false);

    igals::SpMat ls, lp;
    const double t_ls = best_of(3, [&] { ls = igals::laplace_gramian_2d(space, space, Exec::kSerial); });
    const double t_lp = best_of(3, [&] { lp = igals::laplace_gramian_2d(space, space, Exec::kParallel); });
    const double dl = (Eigen::MatrixXd(ls) - Eigen::MatrixXd(lp)).cwiseAbs().maxCoeff();
    report("laplace_gramian", ell, t_ls, t_lp, dl);

    Vec bs, bp;
    const double t_bs = best_of(3, [&] {
      bs = igals::load_vector(space, mcase.f, igals::LoadAction::kNegLaplaceTest, std::nullopt,
                              Exec::kSerial);
    });
    const double t_bp = best_of(3, [&] {
      bp = igals::load_vector(space, mcase.f, igals::LoadAction::kNegLaplaceTest, std::nullopt,
                              Exec::kParallel);
    });
    report("load_vector", ell, t_bs, t_bp, (bs - bp).cwiseAbs().maxCoeff());

    std::mt19937_64 rng(7);
    std::normal_distribution<double> normal(0.0, 1.0);
    Vec coeffs(space.dim());
    for (int i = 0; i < coeffs.size(); ++i) coeffs[i] = normal(rng);
    igals::ErrorReport es, ep;
    const double t_es =
        best_of(3, [&] { es = igals::field_error(coeffs, space, mcase.u, Exec::kSerial); });
    const double t_ep =
        best_of(3, [&] { ep = igals::field_error(coeffs, space, mcase.u, Exec::kParallel); });
    report("field_error", ell, t_es, t_ep, std::abs(es.h2_full - ep.h2_full));
  }
  return 0;
}
