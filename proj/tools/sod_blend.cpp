// Sod shock tube with MUSCL-Hancock blending; prints density, alpha and the L1 error.
#include <cmath>
#include <cstdio>

#include "lwfr/cases.hpp"

using namespace lwfr;

int main() {
  const auto c = cases::sod({});
  SolverOptions o;
  c.configure(o);
  o.limiter = LimiterKind::BlendMH;
  Solver1D<4, Euler1D> s(c.eq, c.mesh(100), c.left, c.right, o);
  s.set_initial([&](double x, int e) { return c.initial(x, e, s.mesh()); });
  s.advance_to(c.T);

  double err = 0.0;
  for (int e = 0; e < s.elements(); ++e) {
    const double xm = s.node_x(e, 2);
    const double rho = evaluate(s, e, 0.5, 0);
    err += s.mesh().dx(e) * std::abs(rho - c.exact(xm, s.time())[0]);
    if (e % 10 == 0) std::printf("x %.3f  rho %.5f  alpha %.3f\n", xm, rho, s.alpha(e));
  }
  std::printf("t %.3f  steps %ld  L1(rho) %.3e\n", s.time(), s.stats().steps, err);
}
