#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fcns/grid.hpp"

using namespace fcns;

TEST_CASE("grid construction")
{
   const Grid1D g(-1.0, 1.0, 5);
   CHECK(g.h() == doctest::Approx(0.5));
   CHECK(g.x(4) == doctest::Approx(1.0));
   CHECK_THROWS(Grid1D(0.0, 1.0, 2));
   CHECK_THROWS(Grid1D(1.0, 0.0, 10));
}

TEST_CASE("differences are exact on quadratics")
{
   const Grid1D g(0.0, 2.0, 21);
   const auto f = GridFunction::sample(g, [](double x) { return 3 * x * x - x + 2; });
   const auto d1 = diff1(f);
   const auto d2 = diff2(f);
   for (std::size_t i = 0; i < g.size(); ++i) {
      CHECK(d1[i] == doctest::Approx(6 * g.x(i) - 1).epsilon(1e-11));
      CHECK(d2[i] == doctest::Approx(6.0).epsilon(1e-9));
   }
}

TEST_CASE("differences converge at second order")
{
   auto err = [](std::size_t n, int k) {
      const Grid1D g(0.0, 1.0, n);
      const auto f = GridFunction::sample(g, [](double x) { return std::sin(3 * x); });
      const auto d = k == 1 ? diff1(f) : diff2(f);
      double e = 0;
      for (std::size_t i = 0; i < n; ++i) {
         const double ex = k == 1 ? 3 * std::cos(3 * g.x(i)) : -9 * std::sin(3 * g.x(i));
         e = std::max(e, std::abs(d[i] - ex));
      }
      return e;
   };
   CHECK(std::log2(err(41, 1) / err(81, 1)) >= 1.9);
   CHECK(std::log2(err(41, 2) / err(81, 2)) >= 1.9);
}

TEST_CASE("quadrature")
{
   const Grid1D g(0.0, std::numbers::pi, 201);
   const auto f = GridFunction::sample(g, [](double x) { return std::sin(x); });
   CHECK(integrate(f) == doctest::Approx(2.0).epsilon(1e-4));
   const auto F = cumulative(f);
   CHECK(F.front() == 0.0);
   CHECK(F.back() == doctest::Approx(integrate(f)).epsilon(1e-14));
   for (std::size_t i = 0; i < g.size(); i += 20)
      CHECK(F[i] == doctest::Approx(1 - std::cos(g.x(i))).epsilon(1e-4));
   const auto lin = GridFunction::sample(g, [](double x) { return 2 * x + 1; });
   CHECK(integrate(lin) == doctest::Approx(std::numbers::pi * std::numbers::pi + std::numbers::pi)
                              .epsilon(1e-13));
}

TEST_CASE("norms")
{
   const Grid1D g(0.0, 1.0, 101);
   const GridFunction one(g, -2.0);
   CHECK(norm_l1(one) == doctest::Approx(2.0));
   CHECK(norm_l2(one) == doctest::Approx(2.0));
   CHECK(norm_sup(one) == doctest::Approx(2.0));
   const auto f = GridFunction::sample(g, [](double x) { return x; });
   CHECK(seminorm_h(f, 1) == doctest::Approx(1.0).epsilon(1e-12));
   CHECK(seminorm_h(f, 2) == doctest::Approx(0.0).epsilon(1e-9));
   CHECK(norm_h(f, 1) == doctest::Approx(std::sqrt(norm_l2(f) * norm_l2(f) + 1.0)).epsilon(1e-12));
}

TEST_CASE("linearity and interpolation")
{
   const Grid1D g(0.0, 1.0, 11);
   const auto a = GridFunction::sample(g, [](double x) { return x * x; });
   const auto b = GridFunction::sample(g, [](double x) { return std::exp(x); });
   const auto lhs = diff1(2.0 * a + b);
   const auto rhs = 2.0 * diff1(a) + diff1(b);
   for (std::size_t i = 0; i < g.size(); ++i)
      CHECK(lhs[i] == doctest::Approx(rhs[i]).epsilon(1e-13));
   CHECK(a.interpolate(0.25) == doctest::Approx(0.5 * (0.04 + 0.09)));
   CHECK_THROWS_AS(a.interpolate(1.5), std::out_of_range);
}

TEST_CASE("one-sided traces are fourth order")
{
   auto err = [](std::size_t n) {
      const Grid1D g(0.0, 1.0, n);
      const auto f = GridFunction::sample(g, [](double x) { return std::exp(2 * x); });
      return std::abs(left_trace_d1(f.values(), g.h()) - 2.0);
   };
   CHECK(std::log2(err(21) / err(41)) >= 3.5);
}
