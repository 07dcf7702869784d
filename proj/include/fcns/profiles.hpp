#pragma once

#include <cstddef>
#include <vector>

#include "fcns/grid.hpp"
#include "fcns/pressure.hpp"

namespace fcns {

// Far-field data: congested on the left (v = 1, u_minus), free on the right.
struct EndStates
{
   double v_plus = 2.0;
   double u_minus = 1.0;
   double u_plus = 0.0;
   double mu = 1.0;

   // Throws InvalidEndStates unless v_plus > 1, u_minus > u_plus, mu > 0.
   void validate() const;
};

// s = (u_minus - u_plus) / (v_plus - 1).
double limit_speed(const EndStates& es);

struct ProfileValues
{
   double v;
   double u;
   double w;
   double p;
};

// Closed-form free/congested front of the constrained system.
//
// Congested (v = 1, u = u_minus, p = p_minus) on x <= 0, logistic on x > 0.
// At x = 0 the effective velocity and the pressure take their one-sided
// values w(0) = u_plus and p(0) = p_minus.
class LimitProfile
{
public:
   explicit LimitProfile(const EndStates& es);
   // Same logistic shape with an explicitly prescribed speed; u is still
   // u_plus + s v_plus - s v.
   LimitProfile(const EndStates& es, double speed);

   const EndStates& end_states() const { return es_; }
   double speed() const { return s_; }
   double p_minus() const { return s_ * s_ * (es_.v_plus - 1.0); }

   double v(double x) const;
   double u(double x) const;
   double w(double x) const;
   double p(double x) const;
   // Analytic derivatives; right-sided at x = 0.
   double dv(double x) const;
   double d2v(double x) const;
   double du(double x) const { return -s_ * dv(x); }
   ProfileValues eval(double x) const { return {v(x), u(x), w(x), p(x)}; }

private:
   EndStates es_;
   double s_;
};

ProfileValues limit_profile_eval(const LimitProfile& profile, double x);

// Speed of the soft-congestion wave with the ODE-consistent denominator
// v_plus - v_minus^eps. Throws InvalidEndStates when p(v_plus) >= 1.
double eps_speed(const PressureLaw& law, const EndStates& es);
// Same with denominator v_plus - 1, kept for comparison.
double eps_speed_printed(const PressureLaw& law, const EndStates& es);

// Right-hand side of v' = v/(mu s) (s^2 (v_plus - v) + p(v_plus) - p(v)),
// evaluated literally.
double eps_profile_rhs(const PressureLaw& law, const EndStates& es, double speed, double v);

struct OdeControls
{
   double rel_tol = 1e-10;
   double abs_tol = 1e-13;
   double initial_step = 1e-4;
};

struct EpsProfileOptions
{
   double x_left = -2.0;
   double x_right = 14.0;
   std::size_t n = 4001;
   double far_field_tol = 1e-8;
   OdeControls ode;
};

// Suggested span so that both tails are within tol of their end states.
std::pair<double, double> recommended_span(const PressureLaw& law, const EndStates& es,
                                           double tol);

// Increasing profile connecting (v_minus^eps, u_minus) to (v_plus, u_plus^eps),
// shifted so that v(0) = 1 + eps^(1/(gamma+1)).
//
// Internally the profile is carried as theta = ln((v - v_-)/(v_+ - v)); the
// map keeps v inside (v_-, v_+) and both exponential tails are linear in theta.
class EpsProfile
{
public:
   const PressureLaw& law() const { return law_; }
   const EndStates& end_states() const { return es_; }
   double speed() const { return s_; }
   double speed_printed() const { return s_printed_; }
   double v_minus() const { return v_minus_; }
   double v_plus() const { return es_.v_plus; }
   // u_minus - s (v_plus - v_minus): the right velocity consistent with mass.
   double u_plus() const { return u_plus_; }
   double v_at_origin() const { return v0_; }
   const Grid1D& grid() const { return v_.grid(); }

   const GridFunction& v_samples() const { return v_; }
   const GridFunction& dv_samples() const { return dv_; }
   const GridFunction& u_samples() const { return u_; }
   const GridFunction& w_samples() const { return w_; }
   const GridFunction& theta_samples() const { return theta_; }

   // Accurate evaluation anywhere (integrates from the nearest stored node).
   double v(double x) const;
   double dv(double x) const { return slope(v(x)); }
   double u(double x) const { return u_of_v(v(x)); }
   double w(double x) const { return w_of_v(v(x)); }
   double p(double x) const { return law_(v(x)); }

   // Fast evaluation: cubic Hermite in theta using the exact theta' at the
   // nodes, linear (exponential in v) extrapolation outside the span.
   double theta_interp(double x) const;
   double v_interp(double x) const;
   double dv_interp(double x) const;
   // (v, u, w, p) from the interpolated theta.
   ProfileValues eval_interp(double x) const;

   double slope(double v) const;
   double u_of_v(double v) const { return es_.u_minus - s_ * (v - v_minus_); }
   double w_of_v(double v) const { return u_of_v(v) - es_.mu * slope(v) / v; }

   // theta' as a function of theta (cancellation-free).
   double theta_rate(double theta) const;
   double v_of_theta(double theta) const;
   double theta_of_v(double v) const;

   // x at which the profile takes the value v (quadrature of dx = dtheta/theta').
   double x_of_v(double v) const;

   // Max over sample intervals of |x_{i+1} - x_i - int dx| * |v'|, where the
   // spacing implied by the ODE is recomputed by adaptive quadrature of
   // dx = dtheta / theta'. Independent of the Runge-Kutta march.
   double ode_residual() const;
   double max_slope() const;

   friend EpsProfile eps_profile_solve(const PressureLaw&, const EndStates&,
                                       const EpsProfileOptions&);

private:
   double integrate_theta(double theta, double x0, double x1) const;

   PressureLaw law_;
   EndStates es_;
   OdeControls ode_;
   double s_ = 0.0;
   double s_printed_ = 0.0;
   double v_minus_ = 0.0;
   double u_plus_ = 0.0;
   double v0_ = 0.0;
   double width_ = 0.0; // v_plus - v_minus
   double p_plus_ = 0.0;
   GridFunction theta_;
   GridFunction v_;
   GridFunction dv_;
   GridFunction u_;
   GridFunction w_;
};

EpsProfile eps_profile_solve(const PressureLaw& law, const EndStates& es,
                             const EpsProfileOptions& opts = {});

// Inner solution v~' = (1/(mu s)) (1 - v~^-gamma), v~(0) = 2, sampled on
// [y_lo, y_hi] and carried as z = ln(v~ - 1).
class TransitionCorrector
{
public:
   double gamma() const { return gamma_; }
   double mu() const { return mu_; }
   double speed() const { return s_; }
   double y_lo() const { return grid_.x_left(); }
   double y_hi() const { return grid_.x_right(); }
   const Grid1D& grid() const { return grid_; }
   const std::vector<double>& values() const { return vt_; }

   // Cubic Hermite in z; exponential tail below y_lo; throws above y_hi.
   double operator()(double y) const;
   double rhs(double vt) const;

   friend TransitionCorrector transition_corrector_solve(double, double, double, double, double,
                                                         double, const OdeControls&);

private:
   double z_rate(double z) const;

   double gamma_ = 1.0;
   double mu_ = 1.0;
   double s_ = 1.0;
   Grid1D grid_;
   std::vector<double> z_;
   std::vector<double> dz_;
   std::vector<double> vt_;
};

TransitionCorrector transition_corrector_solve(double gamma, double mu, double s, double y_hi,
                                               double y_lo = -40.0, double dy = 0.05,
                                               const OdeControls& ode = {});

struct ZoneParams
{
   double K = 2.0;            // congested-zone threshold v >= 1 + K eps^(1/gamma)
   double C0 = 10.0;          // x* window [-C0 eps^(1/(gamma+1)), 0]
   std::size_t n_xstar = 200; // scan points in the x* window
   std::size_t n_zone = 400;  // sample intervals across [x_min, 0]
   bool refine_xstar = true;  // Brent refinement around the best scan point
};

struct ZoneReport
{
   double epsilon = 0.0;
   double gamma = 0.0;
   double x_min = 0.0;        // leftmost x with v >= 1 + K eps^(1/gamma) (negative)
   double sup_err_free = 0.0; // sup_{x >= 0} |v_eps - v_bar|
   double x_star = 0.0;
   double transition_err = 0.0;
   bool degenerate = false;
};

// Requires the limit profile speed to match 1/sqrt(v_plus - 1), the speed of
// the front whose congested pressure equals p(v_minus^eps) = 1.
ZoneReport three_zone_diagnostics(const EpsProfile& eps_profile, const LimitProfile& limit,
                                  const ZoneParams& params = {});

// Least-squares slope of log(y) against log(x).
double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

} // namespace fcns
