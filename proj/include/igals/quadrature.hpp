#pragma once

#include <array>
#include <span>

namespace igals {

inline constexpr int kMaxQuadraturePoints = 16;

/// Gauss-Legendre rule on the reference interval [-1, 1].
/// An n-point rule integrates polynomials of degree <= 2n-1 exactly.
struct QuadratureRule {
  int n = 0;
  std::array<double, kMaxQuadraturePoints> nodes{};
  std::array<double, kMaxQuadraturePoints> weights{};

  std::span<const double> node_span() const { return {nodes.data(), static_cast<size_t>(n)}; }
  std::span<const double> weight_span() const { return {weights.data(), static_cast<size_t>(n)}; }
};

/// Returns the n-point Gauss-Legendre rule, 1 <= n <= 16.
/// Throws Errc::kUnsupportedOrder outside that range.
const QuadratureRule& gauss_rule(int n);

namespace detail {

/// Extended-precision twin of the rule above (same Newton iteration, not
/// rounded to double); feeds the high-precision residual assembly.
struct QuadratureRuleLd {
  int n = 0;
  std::array<long double, kMaxQuadraturePoints> nodes{};
  std::array<long double, kMaxQuadraturePoints> weights{};
};

const QuadratureRuleLd& gauss_rule_ld(int n);

}  // namespace detail

}  // namespace igals
