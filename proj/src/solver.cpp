#include "igals/solver.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "embed.hpp"
#include "igals/errors.hpp"

namespace igals {
namespace {

// acc -= coeff * (M x) (or M^T x), accumulated in long double. The coefficient
// stays in extended precision so weight sums like beta2 + gamma2 keep the
// small weight's contribution.
template <typename Matrix>
void subtract_ax(std::vector<long double>& acc, const Matrix& m, const Vec& x, long double coeff,
                 bool transposed) {
  for (int k = 0; k < m.outerSize(); ++k) {
    if (transposed) {
      long double sum = 0.0L;
      for (typename Matrix::InnerIterator it(m, k); it; ++it) {
        sum += static_cast<long double>(it.value()) * static_cast<long double>(x[it.row()]);
      }
      acc[static_cast<size_t>(k)] -= coeff * sum;
    } else {
      const long double cx = coeff * static_cast<long double>(x[k]);
      for (typename Matrix::InnerIterator it(m, k); it; ++it) {
        acc[static_cast<size_t>(it.row())] -= static_cast<long double>(it.value()) * cx;
      }
    }
  }
}

// b - A x with long double accumulation; A given as full symmetric sparse.
Vec residual(const SpMat& full, const Vec& x, const Vec& b) {
  const int n = static_cast<int>(b.size());
  std::vector<long double> acc(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) acc[static_cast<size_t>(i)] = b[i];
  subtract_ax(acc, full, x, 1.0, false);
  Vec r(n);
  for (int i = 0; i < n; ++i) r[i] = static_cast<double>(acc[static_cast<size_t>(i)]);
  return r;
}

// Correction loop shared by the plain and condensed solvers. Termination is
// driven by the correction norms, which track the forward error directly:
// near the representation floor the residual only bounces while the error is
// still contracting, so residual-based stopping would quit early. Among
// iterates at the same residual level the latest one is preferred (the
// iteration is a contraction), but never one whose residual exceeds the
// unrefined solve's (reported residuals are monotone under refinement).
// anorm enters the backward-stable stall criterion tol*(||b|| + ||A|| ||x||).
template <typename ApplyInverse, typename Residual>
std::pair<Vec, SolveReport> refine(const ApplyInverse& apply_inverse, const Residual& residual_of,
                                   const Vec& b, double anorm, const SolveOptions& options) {
  Vec x = apply_inverse(b);
  Vec r = residual_of(x);
  const double initial_rn = r.norm();

  Vec picked_x = x;
  double picked_rn = initial_rn;
  double min_rn = initial_rn;

  SolveReport report;
  double prev_correction = std::numeric_limits<double>::infinity();
  double rn = initial_rn;
  while (rn > 0.0 && report.refinement_steps < options.max_refine) {
    const Vec correction = apply_inverse(r);
    const double cn = correction.norm();
    x += correction;
    ++report.refinement_steps;
    r = residual_of(x);
    rn = r.norm();
    min_rn = std::min(min_rn, rn);
    if (rn <= std::min(initial_rn, 1.5 * min_rn)) {
      picked_x = x;
      picked_rn = rn;
    }
    if (cn <= 4.0 * std::numeric_limits<double>::epsilon() * x.norm()) break;  // at working precision
    if (cn >= 0.7 * prev_correction) break;  // contraction exhausted
    prev_correction = cn;
  }

  const double bn = b.norm();
  report.refinement_stalled = picked_rn > options.tol * (bn + anorm * picked_x.norm());
  report.residual_norm = (bn > 0.0) ? picked_rn / bn : picked_rn;
  return {std::move(picked_x), std::move(report)};
}

Vec residual_from_terms(const ResidualTerms& terms, const Vec& x, const Vec& b,
                        const VecLd& b_ld) {
  const int n = static_cast<int>(b.size());
  std::vector<long double> acc(static_cast<size_t>(n));
  if (b_ld.size() == n) {
    for (int i = 0; i < n; ++i) acc[static_cast<size_t>(i)] = b_ld[i];
  } else {
    for (int i = 0; i < n; ++i) acc[static_cast<size_t>(i)] = b[i];
  }
  for (const auto& [coeff, m] : terms) subtract_ax(acc, m, x, coeff, false);
  Vec r(n);
  for (int i = 0; i < n; ++i) r[i] = static_cast<double>(acc[static_cast<size_t>(i)]);
  return r;
}

template <typename Matrix>
double one_norm(const Matrix& full) {
  double best = 0.0;
  for (int k = 0; k < full.outerSize(); ++k) {
    double s = 0.0;
    for (typename Matrix::InnerIterator it(full, k); it; ++it) {
      s += static_cast<double>(std::abs(static_cast<long double>(it.value())));
    }
    best = std::max(best, s);
  }
  return best;
}

// Hager's estimate of ||A^{-1}||_1 through factorized solves (A symmetric).
template <typename Factor>
double inverse_one_norm_estimate(const Factor& factor, int n) {
  Vec x = Vec::Constant(n, 1.0 / n);
  double est = 0.0;
  for (int iter = 0; iter < 5; ++iter) {
    const Vec y = factor.solve(x);
    est = y.template lpNorm<1>();
    Vec xi(n);
    for (int i = 0; i < n; ++i) xi[i] = (y[i] >= 0.0) ? 1.0 : -1.0;
    const Vec z = factor.solve(xi);
    int j = 0;
    const double zmax = z.cwiseAbs().maxCoeff(&j);
    if (zmax <= z.dot(x) + 1e-15 * zmax) break;
    x.setZero();
    x[j] = 1.0;
  }
  return est;
}

}  // namespace

SparseSymmetricSystem make_system(const SpMat& symmetric, Vec rhs) {
  SparseSymmetricSystem sys;
  sys.n = static_cast<int>(symmetric.rows());
  sys.lower = symmetric.triangularView<Eigen::Lower>();
  sys.rhs = std::move(rhs);
  sys.equilibration = Vec::Ones(sys.n);
  for (int i = 0; i < sys.n; ++i) {
    const double d = symmetric.coeff(i, i);
    if (d > 0.0) sys.equilibration[i] = 1.0 / std::sqrt(d);
  }
  return sys;
}

std::pair<Vec, SolveReport> factor_and_solve(const SparseSymmetricSystem& system,
                                             const SolveOptions& options) {
  const int n = system.n;
  const Vec d = options.equilibrate ? system.equilibration : Vec::Ones(n);

  SpMat scaled_lower = system.lower;
  for (int k = 0; k < scaled_lower.outerSize(); ++k) {
    for (SpMat::InnerIterator it(scaled_lower, k); it; ++it) {
      it.valueRef() *= d[it.row()] * d[it.col()];
    }
  }

  Eigen::SimplicialLDLT<SpMat, Eigen::Lower> ldlt;
  ldlt.compute(scaled_lower);
  if (ldlt.info() != Eigen::Success || (ldlt.vectorD().array() <= 0.0).any()) {
    throw Error(Errc::kNotPositiveDefinite,
                "factor_and_solve: nonpositive pivot encountered");
  }

  const SpMat full = system.lower.selfadjointView<Eigen::Lower>();

  const auto scaled_solve = [&](const Vec& r) -> Vec {
    const Vec rs = d.cwiseProduct(r);
    return d.cwiseProduct(ldlt.solve(rs));
  };
  const auto residual_of = [&](const Vec& x) {
    return system.residual_terms.empty()
               ? residual(full, x, system.rhs)
               : residual_from_terms(system.residual_terms, x, system.rhs, system.rhs_ld);
  };
  double anorm = 0.0;
  if (system.residual_terms.empty()) {
    anorm = one_norm(full);
  } else {
    for (const auto& [coeff, m] : system.residual_terms) {
      anorm += static_cast<double>(std::abs(coeff)) * one_norm(m);
    }
  }

  auto [x, report] = refine(scaled_solve, residual_of, system.rhs, anorm, options);
  if (options.estimate_condition) {
    const SpMat scaled_full = scaled_lower.selfadjointView<Eigen::Lower>();
    report.condition_estimate = one_norm(scaled_full) * inverse_one_norm_estimate(ldlt, n);
  }
  return {std::move(x), report};
}

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<size_t>(n)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int i) {
    while (parent[static_cast<size_t>(i)] != i) {
      parent[static_cast<size_t>(i)] = parent[static_cast<size_t>(parent[static_cast<size_t>(i)])];
      i = parent[static_cast<size_t>(i)];
    }
    return i;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[static_cast<size_t>(std::max(a, b))] = std::min(a, b);
  }
};

}  // namespace

Vec CondensedSystem::recover_control(const Vec& primary) const {
  return (control_mass_inv * (rhs_control - gamma2 * (coupling.transpose() * primary))) /
         (beta2 + gamma2);
}

CondensedSystem block_condense(const SpMat& primary_block, const SpMat& coupling,
                               const SpMat& control_mass, const Vec& rhs_primary,
                               const Vec& rhs_control, double beta2, double gamma2,
                               int max_block_size) {
  const int m = static_cast<int>(control_mass.rows());
  UnionFind uf(m);
  for (int k = 0; k < control_mass.outerSize(); ++k) {
    for (SpMat::InnerIterator it(control_mass, k); it; ++it) {
      uf.unite(static_cast<int>(it.row()), static_cast<int>(it.col()));
    }
  }
  std::vector<std::vector<int>> components(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) components[static_cast<size_t>(uf.find(i))].push_back(i);

  std::vector<Eigen::Triplet<double>> inv_trips;
  for (const auto& comp : components) {
    if (comp.empty()) continue;
    const int s = static_cast<int>(comp.size());
    if (s > max_block_size) {
      throw Error(Errc::kNotBlockDiagonal,
                  "block_condense: control mass has inter-element coupling (block size " +
                      std::to_string(s) + " > " + std::to_string(max_block_size) + ")");
    }
    Eigen::MatrixXd block(s, s);
    for (int a = 0; a < s; ++a) {
      for (int b = 0; b < s; ++b) {
        block(a, b) = control_mass.coeff(comp[static_cast<size_t>(a)], comp[static_cast<size_t>(b)]);
      }
    }
    const Eigen::MatrixXd inv = block.ldlt().solve(Eigen::MatrixXd::Identity(s, s));
    for (int a = 0; a < s; ++a) {
      for (int b = 0; b < s; ++b) {
        inv_trips.emplace_back(comp[static_cast<size_t>(a)], comp[static_cast<size_t>(b)], inv(a, b));
      }
    }
  }

  CondensedSystem out;
  out.coupling = coupling;
  out.primary_block = primary_block;
  out.control_mass = control_mass;
  out.rhs_primary = rhs_primary;
  out.rhs_control = rhs_control;
  out.beta2 = beta2;
  out.gamma2 = gamma2;
  {
    const int nu = static_cast<int>(primary_block.rows());
    const int nf = static_cast<int>(control_mass.rows());
    const int n = nu + nf;
    const SpMatLd mass_embedded = detail::embed_diag<long double>(control_mass, nu, n);
    out.stacked_terms = {{1.0L, detail::embed_diag<long double>(primary_block, 0, n)},
                         {static_cast<long double>(gamma2),
                          detail::embed_coupling<long double>(coupling, nu, n)},
                         {static_cast<long double>(beta2), mass_embedded},
                         {static_cast<long double>(gamma2), mass_embedded}};
  }
  out.control_mass_inv.resize(m, m);
  out.control_mass_inv.setFromTriplets(inv_trips.begin(), inv_trips.end());

  const double g2 = gamma2;
  const double schur_coeff = g2 * g2 / (beta2 + g2);
  const SpMat ct = coupling.transpose();
  const SpMat cmi_ct = out.control_mass_inv * ct;
  const SpMat schur_term = coupling * cmi_ct;
  SpMat reduced_matrix = primary_block - schur_coeff * schur_term;
  reduced_matrix.prune(0.0, 0.0);
  const Vec reduced_rhs =
      rhs_primary - (g2 / (beta2 + g2)) * (coupling * (out.control_mass_inv * rhs_control));
  out.reduced = make_system(reduced_matrix, reduced_rhs);
  return out;
}

std::pair<std::pair<Vec, Vec>, SolveReport> solve_condensed(const CondensedSystem& cs,
                                                            const SolveOptions& options) {
  const int nu = static_cast<int>(cs.primary_block.rows());
  const int nf = static_cast<int>(cs.control_mass.rows());
  const double b2 = cs.beta2, g2 = cs.gamma2;

  const Vec d = options.equilibrate ? cs.reduced.equilibration : Vec::Ones(nu);
  SpMat scaled_lower = cs.reduced.lower;
  for (int k = 0; k < scaled_lower.outerSize(); ++k) {
    for (SpMat::InnerIterator it(scaled_lower, k); it; ++it) {
      it.valueRef() *= d[it.row()] * d[it.col()];
    }
  }
  Eigen::SimplicialLDLT<SpMat, Eigen::Lower> ldlt;
  ldlt.compute(scaled_lower);
  if (ldlt.info() != Eigen::Success || (ldlt.vectorD().array() <= 0.0).any()) {
    throw Error(Errc::kNotPositiveDefinite, "solve_condensed: nonpositive pivot encountered");
  }

  // Block elimination applied to a stacked residual [r_u; r_f].
  const auto apply_inverse = [&](const Vec& r) -> Vec {
    const Vec r_u = r.head(nu);
    const Vec r_f = r.tail(nf);
    const Vec rhs_u = r_u - (g2 / (b2 + g2)) * (cs.coupling * (cs.control_mass_inv * r_f));
    const Vec du = d.cwiseProduct(ldlt.solve(d.cwiseProduct(rhs_u).eval()));
    const Vec df =
        (cs.control_mass_inv * (r_f - g2 * (cs.coupling.transpose() * du))) / (b2 + g2);
    Vec out(nu + nf);
    out.head(nu) = du;
    out.tail(nf) = df;
    return out;
  };

  Vec b(nu + nf);
  b.head(nu) = cs.rhs_primary;
  b.tail(nf) = cs.rhs_control;

  const auto residual_of = [&](const Vec& z) {
    return residual_from_terms(cs.stacked_terms, z, b, cs.stacked_rhs_ld);
  };
  double anorm = 0.0;
  for (const auto& [coeff, m] : cs.stacked_terms) {
    anorm += static_cast<double>(std::abs(coeff)) * one_norm(m);
  }
  auto [z, report] = refine(apply_inverse, residual_of, b, anorm, options);
  if (options.estimate_condition) {
    const SpMat scaled_full = scaled_lower.selfadjointView<Eigen::Lower>();
    report.condition_estimate = one_norm(scaled_full) * inverse_one_norm_estimate(ldlt, nu);
  }
  return {{z.head(nu), z.tail(nf)}, report};
}

}  // namespace igals
