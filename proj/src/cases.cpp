#include "igals/cases.hpp"

#include <cmath>

namespace igals {

ManufacturedCase example1_case(int k) {
  const double w = k * M_PI;
  ScalarField2 u;
  u.value = [w](double x, double y) { return std::cos(w * x) * std::cos(w * y); };
  u.ddx = [w](double x, double y) { return -w * std::sin(w * x) * std::cos(w * y); };
  u.ddy = [w](double x, double y) { return -w * std::cos(w * x) * std::sin(w * y); };
  u.ddxx = [w](double x, double y) { return -w * w * std::cos(w * x) * std::cos(w * y); };
  u.ddxy = [w](double x, double y) { return w * w * std::sin(w * x) * std::sin(w * y); };
  u.ddyy = [w](double x, double y) { return -w * w * std::cos(w * x) * std::cos(w * y); };

  ManufacturedCase c;
  c.name = "example1";
  c.k = k;
  c.f = [w](double x, double y) { return 2.0 * w * w * std::cos(w * x) * std::cos(w * y); };
  c.g = u.value;
  c.u = u;
  return c;
}

ManufacturedCase example2_case(int k) {
  const double w = k * M_PI;
  ScalarField2 ud;
  ud.value = [w](double x, double y) { return std::sin(w * x) * std::sin(w * y); };
  ud.ddx = [w](double x, double y) { return w * std::cos(w * x) * std::sin(w * y); };
  ud.ddy = [w](double x, double y) { return w * std::sin(w * x) * std::cos(w * y); };
  ud.ddxx = [w](double x, double y) { return -w * w * std::sin(w * x) * std::sin(w * y); };
  ud.ddxy = [w](double x, double y) { return w * w * std::cos(w * x) * std::cos(w * y); };
  ud.ddyy = [w](double x, double y) { return -w * w * std::sin(w * x) * std::sin(w * y); };

  ManufacturedCase c;
  c.name = "example2";
  c.k = k;
  c.u = ud;
  c.u_d = ud;
  c.f_p = [w](double x, double y) { return 2.0 * w * w * std::sin(w * x) * std::sin(w * y); };
  c.f = c.f_p;
  c.g = ud.value;  // vanishes on the boundary for integer k
  return c;
}

}  // namespace igals
