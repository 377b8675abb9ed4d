#include "igals/quadrature.hpp"

#include <cmath>
#include <string>

#include "igals/errors.hpp"

namespace igals {
namespace {

// Legendre P_n and P_n' at x by the three-term recurrence, in extended
// precision so the Newton iteration below bottoms out near 1e-19.
void legendre(int n, long double x, long double& p, long double& dp) {
  long double p0 = 1.0L, p1 = x;
  for (int k = 2; k <= n; ++k) {
    long double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  p = (n == 0) ? p0 : p1;
  dp = (n == 0) ? 0.0L : n * (x * p1 - p0) / (x * x - 1.0L);
}

detail::QuadratureRuleLd build_rule(int n) {
  detail::QuadratureRuleLd rule;
  rule.n = n;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    long double x = std::cos(M_PI * (i + 0.75L) / (n + 0.5L));
    long double p = 0, dp = 1;
    for (int it = 0; it < 100; ++it) {
      legendre(n, x, p, dp);
      long double step = p / dp;
      x -= step;
      if (std::fabs(step) < 1e-19L) break;
    }
    legendre(n, x, p, dp);
    long double w = 2.0L / ((1.0L - x * x) * dp * dp);
    rule.nodes[i] = -x;  // ascending order
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) {
    rule.nodes[n / 2] = 0.0L;
    long double p = 0, dp = 1;
    legendre(n, 0.0L, p, dp);
    rule.weights[n / 2] = 2.0L / (dp * dp);
  }
  return rule;
}

void check_order(int n) {
  if (n < 1 || n > kMaxQuadraturePoints) {
    throw Error(Errc::kUnsupportedOrder,
                "gauss_rule: point count " + std::to_string(n) + " outside [1, 16]");
  }
}

const std::array<detail::QuadratureRuleLd, kMaxQuadraturePoints>& all_rules_ld() {
  static const auto rules = [] {
    std::array<detail::QuadratureRuleLd, kMaxQuadraturePoints> all;
    for (int k = 1; k <= kMaxQuadraturePoints; ++k) all[k - 1] = build_rule(k);
    return all;
  }();
  return rules;
}

}  // namespace

const QuadratureRule& gauss_rule(int n) {
  check_order(n);
  static const auto rules = [] {
    std::array<QuadratureRule, kMaxQuadraturePoints> all;
    for (int k = 1; k <= kMaxQuadraturePoints; ++k) {
      const auto& ld = all_rules_ld()[k - 1];
      all[k - 1].n = k;
      for (int q = 0; q < k; ++q) {
        all[k - 1].nodes[static_cast<size_t>(q)] = static_cast<double>(ld.nodes[static_cast<size_t>(q)]);
        all[k - 1].weights[static_cast<size_t>(q)] =
            static_cast<double>(ld.weights[static_cast<size_t>(q)]);
      }
    }
    return all;
  }();
  return rules[n - 1];
}

namespace detail {

const QuadratureRuleLd& gauss_rule_ld(int n) {
  check_order(n);
  return all_rules_ld()[n - 1];
}

}  // namespace detail

}  // namespace igals
