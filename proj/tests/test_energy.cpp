#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fcns/energy.hpp"
#include "fcns/errors.hpp"
#include "fcns/experiments.hpp"

using namespace fcns;

namespace {

const EndStates kBase{2.0, 1.0, 0.0, 1.0};

const EpsProfile& profile_1e2()
{
   static const EpsProfile p = build_eps_profile(PressureLaw(1e-2, 1.0), kBase);
   return p;
}

Grid1D test_grid() { return simulation_grid(profile_1e2(), 0.5, 0.01, 1e-10, 2.0); }

GridFunction gauss(const Grid1D& g, double a, double c, double w)
{
   return GridFunction::sample(g, [=](double x) { return a * std::exp(-(x - c) * (x - c) / (w * w)); });
}

GridFunction dgauss(const Grid1D& g, double a, double c, double w)
{
   return GridFunction::sample(g, [=](double x) {
      const double z = (x - c) / w;
      return -2.0 * z / w * a * std::exp(-z * z);
   });
}

} // namespace

TEST_CASE("unperturbed state has zero energy")
{
   const auto& p = profile_1e2();
   const EpsState s = build_initial(p, {}, test_grid());
   const auto rep = energy_report(integrated_vars(s, p), p);
   for (int k = 0; k < 3; ++k) {
      CHECK(std::abs(rep.E[k]) < 1e-20);
      CHECK(std::abs(rep.D[k]) < 1e-20);
   }
}

TEST_CASE("E0 of a pure V dipole matches the Gaussian integral")
{
   const auto& p = profile_1e2();
   const Grid1D g = test_grid();
   const double a = 1e-3, w = 0.25;
   const auto ist = integrate_deviation(0.0, dgauss(g, a, 1.0, w), GridFunction(g));
   const auto rep = energy_report(ist, p);
   // int a^2 exp(-2 z^2) dx = a^2 w sqrt(pi/2)
   CHECK(rep.E[0] == doctest::Approx(a * a * w * std::sqrt(std::numbers::pi / 2)).epsilon(1e-5));
   // E1: int (g')^2 = a^2 sqrt(pi/2) / w
   CHECK(rep.E[1] == doctest::Approx(a * a * std::sqrt(std::numbers::pi / 2) / w).epsilon(1e-3));
}

TEST_CASE("E0 of a pure W dipole matches an independent quadrature")
{
   const auto& p = profile_1e2();
   const Grid1D g = test_grid();
   const double a = 1e-3, w = 0.25, c = 0.5;
   const auto ist = integrate_deviation(0.0, GridFunction(g), dgauss(g, a, c, w));
   const auto rep = energy_report(ist, p);
   // Simpson on a finer mesh with the accurate profile evaluation.
   const int m = 4000;
   const double lo = c - 8 * w, hi = c + 8 * w, hh = (hi - lo) / m;
   double q = 0;
   for (int i = 0; i <= m; ++i) {
      const double x = lo + i * hh;
      const double f = a * a * std::exp(-2 * (x - c) * (x - c) / (w * w)) / -p.law().dp(p.v(x));
      q += f * (i == 0 || i == m ? 1 : (i % 2 ? 4 : 2));
   }
   q *= hh / 3;
   CHECK(rep.E[0] == doctest::Approx(q).epsilon(1e-4));
}

TEST_CASE("energies scale quadratically")
{
   const auto& p = profile_1e2();
   const Grid1D g = test_grid();
   const auto dv = dgauss(g, 1e-3, 1.0, 0.25);
   const auto dw = dgauss(g, 2e-3, 0.8, 0.3);
   const auto r1 = energy_report(integrate_deviation(0.0, dv, dw), p);
   const auto r3 = energy_report(integrate_deviation(0.0, 3.0 * dv, 3.0 * dw), p);
   for (int k = 0; k < 3; ++k) {
      CHECK(r3.E[k] == doctest::Approx(9 * r1.E[k]).epsilon(1e-12));
      CHECK(r3.D[k] == doctest::Approx(9 * r1.D[k]).epsilon(1e-12));
   }
}

TEST_CASE("deviations carrying mass are rejected")
{
   const Grid1D g = test_grid();
   CHECK_THROWS_AS(integrate_deviation(0.0, gauss(g, 1e-3, 1.0, 0.25), GridFunction(g)),
                   ConstraintViolation);
   CHECK_THROWS_AS(integrate_deviation(0.0, GridFunction(g), gauss(g, 1e-3, 1.0, 0.25)),
                   ConstraintViolation);
   CHECK_NOTHROW(integrate_deviation(0.0, dgauss(g, 1e-3, 1.0, 0.25), GridFunction(g)));
}

TEST_CASE("smallness gate tightens as epsilon decreases")
{
   const PerturbationSpec spec{PerturbationShape::dipole, 5e-8, 1.0, 0.25, 0};
   const auto& p2 = profile_1e2();
   const Grid1D g2 = test_grid();
   const auto s2 = smallness_check(integrated_vars(build_initial(p2, spec, g2), p2), p2);
   CHECK(s2.pass);
   CHECK(s2.rhs == doctest::Approx(0.01 * 1e-10));
   const EpsProfile p3 = build_eps_profile(PressureLaw(1e-3, 1.0), kBase);
   const Grid1D g3 = simulation_grid(p3, 0.5, 0.01, 1e-10, 2.0);
   const auto s3 = smallness_check(integrated_vars(build_initial(p3, spec, g3), p3), p3);
   CHECK_FALSE(s3.pass);
   CHECK(s3.lhs > s3.rhs);
}

TEST_CASE("L1 deviation of a dipole is twice its peak")
{
   const auto& p = profile_1e2();
   const double a = 1e-3;
   const PerturbationSpec spec{PerturbationShape::dipole, a, 1.0, 0.25, 0};
   const EpsState s = build_initial(p, spec, test_grid());
   CHECK(l1_diagnostics(s, p).v == doctest::Approx(2 * a).epsilon(1e-4));
   const EpsState base = build_initial(p, {}, test_grid());
   CHECK(l1_diagnostics(s, base, 1.0).v == doctest::Approx(2 * a).epsilon(1e-4));
   CHECK(l1_diagnostics(s, base, 1.0).u < 1e-12);
}

TEST_CASE("linearization residual on manufactured pairs")
{
   const auto& p = profile_1e2();
   const Grid1D g = test_grid();
   const double dt = 1e-3;
   SUBCASE("V = 0: remainders vanish and the residual is the linear part")
   {
      const auto Wa = gauss(g, 1e-3, 1.0, 0.3);
      const auto phi = gauss(g, 2e-3, 0.5, 0.4);
      IntegratedState a{0.0, GridFunction(g), Wa, {}, {}};
      IntegratedState b{dt, GridFunction(g), Wa + dt * phi, {}, {}};
      const auto rv = linearization_residual_v(a, b, p);
      const auto rw = linearization_residual_w(a, b, p);
      const auto dWb = diff1(b.W);
      for (std::size_t i = 0; i < g.size(); i += 7) {
         CHECK(rw[i] == doctest::Approx(phi[i]).epsilon(1e-8).scale(1e-3));
         CHECK(rv[i] == doctest::Approx(-dWb[i]).epsilon(1e-12).scale(1e-6));
      }
   }
   SUBCASE("remainders are quadratic in V")
   {
      auto res = [&](double d) {
         IntegratedState a{0.0, gauss(g, d, 1.0, 0.3), GridFunction(g), {}, {}};
         IntegratedState b = a;
         b.t = dt;
         // W frozen: rw = p'(v_eps) V_x - G, so G is what is left after
         // removing the linear part.
         auto rw = linearization_residual_w(a, b, p);
         const auto Vx = a.dV();
         for (std::size_t i = 0; i < g.size(); ++i)
            rw[i] -= p.law().dp(p.v_interp(g.x(i))) * Vx[i];
         return norm_l2(rw);
      };
      const double r1 = res(1e-3), r2 = res(5e-4);
      CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.02));
   }
}

TEST_CASE("linear energy balance is conserved by the linearized scheme")
{
   const auto& p = profile_1e2();
   const Grid1D g = simulation_grid(p, 0.3, 0.01, 1e-10, 2.0);
   IntegratedState ist = integrate_deviation(0.0, dgauss(g, 1e-3, 1.0, 0.25), GridFunction(g));
   LinearEnergyBalance bal(p);
   const double e_init = bal.add(ist);
   double worst = 0;
   for (int i = 0; i < 300; ++i) {
      ist = linearized_step(ist, 1e-3, p);
      worst = std::max(worst, std::abs(bal.add(ist) - e_init));
   }
   CHECK(bal.initial() == e_init);
   CHECK(worst <= 2e-2 * e_init);
   CHECK(energy_report(ist, p).E[0] < e_init);
}

TEST_CASE("X-norm tracker")
{
   EnergyConstants ec;
   const PressureLaw law(1e-2, 1.0);
   XNormTracker xt(ec, law);
   CHECK(xt.weight(0) == 1.0);
   CHECK(xt.weight(1) == doctest::Approx(0.1 * 1e-4));
   CHECK(xt.weight(2) == doctest::Approx(0.01 * 1e-8));
   EnergyReport r0, r1, r2;
   r0.E = {1.0, 0.0, 0.0};
   r0.D = {2.0, 0.0, 0.0};
   r1.E = {0.5, 0.0, 0.0};
   r1.D = {0.0, 0.0, 0.0};
   r2.E = {0.1, 0.0, 0.0};
   xt.add(0.0, r0);
   xt.add(1.0, r1);
   xt.add(2.0, r2);
   CHECK(r0.x_norm_sq == 1.0);
   CHECK(r1.x_norm_sq == doctest::Approx(1.5)); // 0.5 + trapezoid of D
   CHECK(r2.x_norm_sq == doctest::Approx(1.5)); // running sup
   CHECK(xt.current() == doctest::Approx(1.1));
   CHECK_THROWS(xt.add(2.0, r2));
   EnergyConstants bad;
   bad.c = 0.0;
   CHECK_THROWS(XNormTracker(bad, law));
}
