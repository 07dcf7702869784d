#include "fcns/pressure.hpp"

#include <cmath>
#include <sstream>

#include "fcns/errors.hpp"

namespace fcns {

namespace {

void require_free(double v)
{
   if (!(v > 1.0)) {
      std::ostringstream msg;
      msg << "congested or invalid specific volume v = " << v << " (need v > 1)";
      throw DomainError(msg.str());
   }
}

} // namespace

PressureLaw::PressureLaw(double eps, double gam) : epsilon(eps), gamma(gam)
{
   if (!(epsilon > 0.0) || !std::isfinite(epsilon))
      throw std::invalid_argument("pressure law: epsilon must be > 0");
   if (!(gamma >= 1.0) || !std::isfinite(gamma))
      throw std::invalid_argument("pressure law: gamma must be >= 1");
}

double PressureLaw::operator()(double v) const
{
   require_free(v);
   return epsilon * std::pow(v - 1.0, -gamma);
}

std::pair<double, double> PressureLaw::derivatives(double v) const
{
   require_free(v);
   const double d = v - 1.0;
   const double p = epsilon * std::pow(d, -gamma);
   return {-gamma * p / d, gamma * (gamma + 1.0) * p / (d * d)};
}

double PressureLaw::v_minus() const { return 1.0 + std::pow(epsilon, 1.0 / gamma); }

double PressureLaw::weight_ratio(double v) const
{
   const auto [dp1, dp2] = derivatives(v);
   return dp2 / (dp1 * dp1);
}

double p_eval(const PressureLaw& law, double v) { return law(v); }

std::pair<double, double> p_derivatives(const PressureLaw& law, double v)
{
   return law.derivatives(v);
}

} // namespace fcns
