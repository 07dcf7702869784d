#include <doctest.h>

#include <cmath>

#include "fcns/errors.hpp"
#include "fcns/experiments.hpp"
#include "fcns/profiles.hpp"

using namespace fcns;

namespace {
const EndStates kBase{2.0, 1.0, 0.0, 1.0};
}

TEST_CASE("limit profile closed form")
{
   const LimitProfile lp(kBase);
   CHECK(lp.speed() == doctest::Approx(1.0).epsilon(1e-15));
   CHECK(lp.p_minus() == doctest::Approx(1.0).epsilon(1e-15));
   CHECK(std::abs(lp.v(0.0) - 1.0) <= 1e-12);
   CHECK(std::abs(lp.v(-3.0) - 1.0) <= 1e-12);
   CHECK(lp.v(40.0) == doctest::Approx(2.0).epsilon(1e-12));
   for (double x : {0.0, 0.3, 1.0, 5.0, 20.0}) {
      CHECK(std::abs(lp.w(x)) <= 1e-12);
      CHECK(lp.p(x > 0 ? x : 1e-3) == 0.0);
   }
   for (double x : {-5.0, -1.0, -1e-9}) {
      CHECK(std::abs(lp.w(x) - 1.0) <= 1e-12);
      CHECK(lp.p(x) == 1.0);
      CHECK(lp.u(x) == doctest::Approx(1.0));
   }
   // Mass flux continuity across the interface: u + s v is constant.
   CHECK(lp.u(0.0) + lp.speed() * lp.v(0.0) == doctest::Approx(lp.u(10.0) + lp.speed() * lp.v(10.0)));
   const auto vals = limit_profile_eval(lp, 1.0);
   CHECK(vals.v == doctest::Approx(lp.v(1.0)));
}

TEST_CASE("limit profile solves the logistic equation at second order")
{
   const LimitProfile lp(kBase);
   auto residual = [&](double h) {
      double r = 0;
      for (double x = 0.5; x <= 6.0; x += 0.25) {
         const double d = (lp.v(x + h) - lp.v(x - h)) / (2 * h);
         r = std::max(r, std::abs(d - lp.v(x) * (2.0 - lp.v(x))));
      }
      return r;
   };
   CHECK(std::log2(residual(0.02) / residual(0.01)) >= 1.9);
   CHECK(lp.dv(1.0) == doctest::Approx(lp.v(1.0) * (2.0 - lp.v(1.0))));
}

TEST_CASE("end state validation")
{
   CHECK_THROWS_AS((EndStates{0.5, 1.0, 0.0, 1.0}.validate()), InvalidEndStates);
   CHECK_THROWS_AS((EndStates{2.0, 0.0, 1.0, 1.0}.validate()), InvalidEndStates);
   CHECK_THROWS_AS((EndStates{2.0, 1.0, 0.0, 0.0}.validate()), InvalidEndStates);
   CHECK(limit_speed(EndStates{3.0, 1.0, 0.0, 1.0}) == doctest::Approx(0.5));
}

TEST_CASE("soft-congestion speed")
{
   // s^2 = (1 - eps/(v+ - 1)^gamma) / (v+ - 1 - eps^(1/gamma)); exactly 1 here.
   const PressureLaw law(1e-2, 1.0);
   CHECK(eps_speed(law, kBase) == doctest::Approx(1.0).epsilon(1e-14));
   CHECK(eps_speed_printed(law, kBase) == doctest::Approx(std::sqrt(0.99)).epsilon(1e-14));
   const PressureLaw law2(1e-4, 2.0);
   CHECK(eps_speed(law2, kBase) == doctest::Approx(std::sqrt((1 - 1e-4) / 0.99)).epsilon(1e-14));
   // p(v+) >= 1 cannot be connected.
   CHECK_THROWS_AS(eps_speed(PressureLaw(2.0, 1.0), kBase), InvalidEndStates);
}

TEST_CASE("eps profile")
{
   for (double gamma : {1.0, 2.0}) {
      for (double eps : {1e-2, 1e-4}) {
         CAPTURE(gamma);
         CAPTURE(eps);
         const PressureLaw law(eps, gamma);
         const EpsProfile p = build_eps_profile(law, kBase);
         CHECK(p.v_at_origin() == 1.0 + std::pow(eps, 1.0 / (gamma + 1.0)));
         CHECK(p.v(0.0) == doctest::Approx(p.v_at_origin()).epsilon(1e-10));
         CHECK(p.ode_residual() < 1e-8);
         CHECK(std::abs(p.v_samples().front() - p.v_minus()) < 1e-8);
         CHECK(std::abs(p.v_samples().back() - p.v_plus()) < 1e-8);
         CHECK(p.v_minus() == doctest::Approx(law.v_minus()));
         const auto& th = p.theta_samples();
         for (std::size_t i = 1; i < th.size(); ++i)
            REQUIRE(th[i] > th[i - 1]);
         // Mass invariant and the slope from the ODE right-hand side.
         for (double x : {-0.5, 0.0, 0.7, 3.0}) {
            const double v = p.v(x);
            CHECK(p.u(x) + p.speed() * v == doctest::Approx(kBase.u_minus + p.speed() * p.v_minus()));
            CHECK(p.dv(x) == doctest::Approx(eps_profile_rhs(law, kBase, p.speed(), v)).epsilon(1e-9));
            CHECK(std::abs(p.v_interp(x) - v) <= 1e-5 * (v - p.v_minus()) + 1e-15);
         }
         for (double x : {0.0, 0.7, 3.0})
            CHECK(p.x_of_v(p.v(x)) == doctest::Approx(x).epsilon(1e-6));
         CHECK(p.u_plus() == doctest::Approx(1.0 - p.speed() * (2.0 - p.v_minus())));
      }
   }
}

TEST_CASE("transition corrector")
{
   const auto tc = transition_corrector_solve(1.0, 1.0, 1.0, 5.0);
   CHECK(tc(0.0) == doctest::Approx(2.0).epsilon(1e-10));
   const double h = 1e-4;
   CHECK((tc(h) - tc(-h)) / (2 * h) == doctest::Approx(0.5).epsilon(1e-6));
   CHECK(tc.rhs(2.0) == doctest::Approx(0.5));
   CHECK(tc(-30.0) > 1.0);
   CHECK(tc(-30.0) < 1.0 + 1e-6);
   CHECK_THROWS(tc(6.0));
}

TEST_CASE("log-log slope fit")
{
   std::vector<double> x{1e-2, 1e-3, 1e-4}, y;
   for (double e : x)
      y.push_back(3.0 * std::pow(e, 0.5));
   CHECK(fit_loglog_slope(x, y) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("three-zone free-zone scaling for gamma = 1")
{
   std::vector<double> es{1e-2, 1e-3, 1e-4}, err;
   const LimitProfile lp(kBase, 1.0);
   for (double e : es) {
      const EpsProfile p = build_eps_profile(PressureLaw(e, 1.0), kBase, 4001);
      const ZoneReport z = three_zone_diagnostics(p, lp);
      CHECK(z.x_min < 0.0);
      CHECK(z.transition_err >= 0.0);
      err.push_back(z.sup_err_free);
   }
   CHECK(fit_loglog_slope(es, err) == doctest::Approx(0.5).epsilon(0.2));
}
