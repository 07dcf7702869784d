#pragma once

#include <utility>

namespace fcns {

// Singular pressure p(v) = epsilon / (v - 1)^gamma on v > 1.
//
// Strictly decreasing and convex on (1, inf). Any other law exposing the same
// three functions (value, first and second derivative) could be substituted.
struct PressureLaw
{
   double epsilon = 1.0e-2;
   double gamma = 1.0;

   PressureLaw() = default;
   PressureLaw(double epsilon, double gamma);

   // Throws DomainError for v <= 1.
   double operator()(double v) const;
   // (p', p'') at v; throws DomainError for v <= 1.
   std::pair<double, double> derivatives(double v) const;
   double dp(double v) const { return derivatives(v).first; }
   double d2p(double v) const { return derivatives(v).second; }

   // Soft-congested left end state 1 + epsilon^(1/gamma), where p = 1.
   double v_minus() const;
   // p''/(p')^2, equal to (gamma + 1) / (gamma p(v)).
   double weight_ratio(double v) const;
};

double p_eval(const PressureLaw& law, double v);
std::pair<double, double> p_derivatives(const PressureLaw& law, double v);

} // namespace fcns
