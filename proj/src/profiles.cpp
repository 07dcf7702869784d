#include "fcns/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/numeric/odeint.hpp>

#include "fcns/errors.hpp"

namespace fcns {

namespace odeint = boost::numeric::odeint;

namespace {

using ScalarStepper =
   odeint::runge_kutta_dopri5<double, double, double, double, odeint::vector_space_algebra>;

template <class Rhs>
double integrate_scalar(Rhs rhs, double y, double x0, double x1, const OdeControls& ode)
{
   if (x0 == x1)
      return y;
   auto stepper = odeint::make_controlled(ode.abs_tol, ode.rel_tol, ScalarStepper());
   const double span = std::abs(x1 - x0);
   const double dx = std::copysign(std::min(ode.initial_step, span), x1 - x0);
   auto system = [&rhs](const double& state, double& dstate, double) { dstate = rhs(state); };
   odeint::integrate_adaptive(stepper, system, y, x0, x1, dx);
   return y;
}

double sigmoid(double t)
{
   if (t >= 0.0)
      return 1.0 / (1.0 + std::exp(-t));
   const double e = std::exp(t);
   return e / (1.0 + e);
}

// (1 - (1 + x)^-gamma) / x without cancellation.
double one_minus_pow_over(double x, double gamma)
{
   if (std::abs(x) < 1e-8)
      return gamma * (1.0 - 0.5 * (gamma + 1.0) * x);
   return -std::expm1(-gamma * std::log1p(x)) / x;
}

// Fixed-order Gauss-Legendre on sub-intervals of width <= 0.25 in theta.
template <class F>
double composite_gauss(F f, double a, double b)
{
   const auto m = static_cast<std::size_t>(std::min(4096.0, std::ceil(std::abs(b - a) / 0.25))) + 1;
   const double w = (b - a) / static_cast<double>(m);
   double q = 0.0;
   for (std::size_t k = 0; k < m; ++k) {
      const double lo = a + static_cast<double>(k) * w;
      q += boost::math::quadrature::gauss<double, 15>::integrate(f, lo, lo + w);
   }
   return q;
}

} // namespace

void EndStates::validate() const
{
   std::ostringstream msg;
   if (!(v_plus > 1.0))
      msg << "v_plus must exceed 1 (got " << v_plus << ")";
   else if (!(u_minus > u_plus))
      msg << "entropy condition u_minus > u_plus violated (u_minus = " << u_minus
          << ", u_plus = " << u_plus << ")";
   else if (!(mu > 0.0))
      msg << "viscosity mu must be positive (got " << mu << ")";
   else if (!std::isfinite(v_plus) || !std::isfinite(u_minus) || !std::isfinite(u_plus)
            || !std::isfinite(mu))
      msg << "end states must be finite";
   const auto text = msg.str();
   if (!text.empty())
      throw InvalidEndStates("invalid end states: " + text);
}

double limit_speed(const EndStates& es)
{
   es.validate();
   return (es.u_minus - es.u_plus) / (es.v_plus - 1.0);
}

// ---------------------------------------------------------------- limit profile

LimitProfile::LimitProfile(const EndStates& es) : es_(es), s_(limit_speed(es)) {}

LimitProfile::LimitProfile(const EndStates& es, double speed) : es_(es), s_(speed)
{
   es.validate();
   if (!(speed > 0.0))
      throw InvalidEndStates("limit profile speed must be positive");
}

double LimitProfile::v(double x) const
{
   if (x <= 0.0)
      return 1.0;
   const double vp = es_.v_plus;
   return vp / (1.0 + (vp - 1.0) * std::exp(-s_ * vp * x / es_.mu));
}

double LimitProfile::u(double x) const { return es_.u_plus + s_ * es_.v_plus - s_ * v(x); }

double LimitProfile::w(double x) const
{
   if (x < 0.0)
      return es_.u_minus;
   // d/dx ln v = (s/mu)(v_plus - v) on the free side.
   const double vx = v(x);
   return u(x) - s_ * (es_.v_plus - vx);
}

double LimitProfile::p(double x) const { return x <= 0.0 ? p_minus() : 0.0; }

double LimitProfile::dv(double x) const
{
   if (x < 0.0)
      return 0.0;
   const double vx = v(x);
   return s_ / es_.mu * vx * (es_.v_plus - vx);
}

double LimitProfile::d2v(double x) const
{
   if (x < 0.0)
      return 0.0;
   const double vx = v(x);
   return s_ / es_.mu * (es_.v_plus - 2.0 * vx) * dv(x);
}

ProfileValues limit_profile_eval(const LimitProfile& profile, double x) { return profile.eval(x); }

// ------------------------------------------------------------------ eps speed

double eps_speed(const PressureLaw& law, const EndStates& es)
{
   es.validate();
   const double pp = law(es.v_plus);
   const double vm = law.v_minus();
   if (!(pp < 1.0) || !(es.v_plus > vm))
      throw InvalidEndStates("end states not connectable: need p(v_plus) < 1 and v_plus > v_minus^eps");
   return std::sqrt((1.0 - pp) / (es.v_plus - vm));
}

double eps_speed_printed(const PressureLaw& law, const EndStates& es)
{
   es.validate();
   const double pp = law(es.v_plus);
   if (!(pp < 1.0))
      throw InvalidEndStates("end states not connectable: need p(v_plus) < 1");
   return std::sqrt((1.0 - pp) / (es.v_plus - 1.0));
}

double eps_profile_rhs(const PressureLaw& law, const EndStates& es, double speed, double v)
{
   return v / (es.mu * speed) * (speed * speed * (es.v_plus - v) + law(es.v_plus) - law(v));
}

std::pair<double, double> recommended_span(const PressureLaw& law, const EndStates& es,
                                           double tol)
{
   const double s = eps_speed(law, es);
   const double vm = law.v_minus();
   const double vp = es.v_plus;
   // Linear rates at the two equilibria.
   const double lam_minus = vm / (es.mu * s) * (-s * s - law.dp(vm));
   const double lam_plus = vp / (es.mu * s) * (s * s + law.dp(vp));
   const double v0 = 1.0 + std::pow(law.epsilon, 1.0 / (law.gamma + 1.0));
   const double left = -(1.5 * std::log((v0 - vm) / tol) / lam_minus
                         + 4.0 * std::pow(law.epsilon, 1.0 / (law.gamma + 1.0)) + 0.5);
   const double right = 1.3 * std::log((vp - v0) / tol) / lam_plus + 1.0;
   return {left, right};
}

// ----------------------------------------------------------------- EpsProfile

double EpsProfile::v_of_theta(double theta) const
{
   const double d = width_ * sigmoid(theta);
   const double e = width_ * sigmoid(-theta);
   return d <= e ? v_minus_ + d : es_.v_plus - e;
}

double EpsProfile::theta_of_v(double v) const
{
   if (!(v > v_minus_) || !(v < es_.v_plus))
      throw DomainError("theta_of_v: v outside (v_minus^eps, v_plus)");
   return std::log((v - v_minus_) / (es_.v_plus - v));
}

double EpsProfile::theta_rate(double theta) const
{
   const double d = width_ * sigmoid(theta);
   const double e = width_ * sigmoid(-theta);
   const double delta = v_minus_ - 1.0;
   const double coef = 1.0 / (es_.mu * s_);
   if (d <= e) {
      // Uses s^2 (v_plus - v_minus) = 1 - p(v_plus) and p(v_minus) = 1.
      const double g_over_d = one_minus_pow_over(d / delta, law_.gamma) / delta - s_ * s_;
      return coef * (v_minus_ + d) * g_over_d * width_ / e;
   }
   const double a = es_.v_plus - 1.0;
   const double g_over_e = s_ * s_ - p_plus_ * one_minus_pow_over(-e / a, law_.gamma) / a;
   return coef * (es_.v_plus - e) * g_over_e * width_ / d;
}

double EpsProfile::slope(double v) const
{
   if (!(v > v_minus_) || !(v < es_.v_plus))
      return 0.0;
   const double d = v - v_minus_;
   const double e = es_.v_plus - v;
   return theta_rate(theta_of_v(v)) * d * e / width_;
}

double EpsProfile::integrate_theta(double theta, double x0, double x1) const
{
   return integrate_scalar([this](double th) { return theta_rate(th); }, theta, x0, x1, ode_);
}

double EpsProfile::v(double x) const
{
   const Grid1D& g = grid();
   const double pos = std::clamp((x - g.x_left()) / g.h(), 0.0, static_cast<double>(g.size() - 1));
   const auto j = static_cast<std::size_t>(std::lround(pos));
   return v_of_theta(integrate_theta(theta_[j], g.x(j), x));
}

double EpsProfile::theta_interp(double x) const
{
   const Grid1D& g = grid();
   const std::size_t n = g.size();
   if (x <= g.x_left())
      return theta_[0] + theta_rate(theta_[0]) * (x - g.x_left());
   if (x >= g.x_right())
      return theta_[n - 1] + theta_rate(theta_[n - 1]) * (x - g.x_right());
   const auto j = std::min(static_cast<std::size_t>((x - g.x_left()) / g.h()), n - 2);
   const double h = g.h();
   const double t = (x - g.x(j)) / h;
   const double a = theta_[j];
   const double b = theta_[j + 1];
   const double da = theta_rate(a) * h;
   const double db = theta_rate(b) * h;
   const double t2 = t * t;
   const double t3 = t2 * t;
   return (2 * t3 - 3 * t2 + 1) * a + (t3 - 2 * t2 + t) * da + (-2 * t3 + 3 * t2) * b
          + (t3 - t2) * db;
}

double EpsProfile::v_interp(double x) const { return v_of_theta(theta_interp(x)); }

ProfileValues EpsProfile::eval_interp(double x) const
{
   const double th = theta_interp(x);
   const double v = v_of_theta(th);
   const double d = width_ * sigmoid(th);
   const double e = width_ * sigmoid(-th);
   const double dv = theta_rate(th) * d * e / width_;
   const double u = u_of_v(v);
   return {v, u, u - es_.mu * dv / v, law_(v)};
}

double EpsProfile::dv_interp(double x) const
{
   const double th = theta_interp(x);
   const double d = width_ * sigmoid(th);
   const double e = width_ * sigmoid(-th);
   return theta_rate(th) * d * e / width_;
}

double EpsProfile::x_of_v(double v) const
{
   const double th0 = theta_of_v(v0_);
   const double th1 = theta_of_v(v);
   if (th0 == th1)
      return 0.0;
   auto integrand = [this](double th) { return 1.0 / theta_rate(th); };
   const double a = std::min(th0, th1);
   const double b = std::max(th0, th1);
   const double q =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, a, b, 15, 1e-13);
   return th1 > th0 ? q : -q;
}

double EpsProfile::ode_residual() const
{
   const Grid1D& g = grid();
   double worst = 0.0;
   auto integrand = [this](double th) { return 1.0 / theta_rate(th); };
   for (std::size_t i = 0; i + 1 < g.size(); ++i) {
      const double a = theta_[i];
      const double b = theta_[i + 1];
      const double q = composite_gauss(integrand, a, b);
      const double mismatch = std::abs(g.h() - q);
      const double scale = std::max(std::abs(dv_[i]), std::abs(dv_[i + 1]));
      worst = std::max(worst, mismatch * scale);
   }
   return worst;
}

double EpsProfile::max_slope() const { return dv_.max(); }

EpsProfile eps_profile_solve(const PressureLaw& law, const EndStates& es,
                             const EpsProfileOptions& opts)
{
   EpsProfile prof;
   prof.law_ = law;
   prof.es_ = es;
   prof.ode_ = opts.ode;
   prof.s_ = eps_speed(law, es);
   prof.s_printed_ = eps_speed_printed(law, es);
   prof.v_minus_ = law.v_minus();
   prof.u_plus_ = es.u_minus - prof.s_ * (es.v_plus - prof.v_minus_);
   prof.v0_ = 1.0 + std::pow(law.epsilon, 1.0 / (law.gamma + 1.0));
   prof.width_ = es.v_plus - prof.v_minus_;
   prof.p_plus_ = law(es.v_plus);
   if (!(prof.v0_ > prof.v_minus_ && prof.v0_ < es.v_plus))
      throw InvalidEndStates("shift normalization 1 + eps^(1/(gamma+1)) lies outside (v_minus^eps, v_plus)");

   const Grid1D grid(opts.x_left, opts.x_right, opts.n);
   if (!(grid.x_left() < 0.0 && grid.x_right() > 0.0))
      throw std::invalid_argument("eps profile span must contain x = 0");

   GridFunction theta(grid);
   const double th0 = prof.theta_of_v(prof.v0_);
   std::size_t first_right = 0;
   while (first_right < grid.size() && grid.x(first_right) < 0.0)
      ++first_right;

   double th = th0;
   double x = 0.0;
   for (std::size_t i = first_right; i < grid.size(); ++i) {
      th = prof.integrate_theta(th, x, grid.x(i));
      x = grid.x(i);
      theta[i] = th;
   }
   th = th0;
   x = 0.0;
   for (std::size_t i = first_right; i-- > 0;) {
      th = prof.integrate_theta(th, x, grid.x(i));
      x = grid.x(i);
      theta[i] = th;
   }
   if (!theta.all_finite())
      throw SolverError("profile escaped invariant interval (non-finite state)");

   prof.theta_ = theta;
   prof.v_ = GridFunction(grid);
   prof.dv_ = GridFunction(grid);
   prof.u_ = GridFunction(grid);
   prof.w_ = GridFunction(grid);
   for (std::size_t i = 0; i < grid.size(); ++i) {
      const double vi = prof.v_of_theta(theta[i]);
      const double d = prof.width_ * sigmoid(theta[i]);
      const double e = prof.width_ * sigmoid(-theta[i]);
      prof.v_[i] = vi;
      prof.dv_[i] = prof.theta_rate(theta[i]) * d * e / prof.width_;
      prof.u_[i] = prof.u_of_v(vi);
      prof.w_[i] = prof.u_[i] - es.mu * prof.dv_[i] / vi;
   }
   for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      if (!(prof.v_[i + 1] >= prof.v_[i]))
         throw SolverError("profile escaped invariant interval (lost monotonicity)");
   }

   const double left_gap = prof.v_[0] - prof.v_minus_;
   const double right_gap = es.v_plus - prof.v_.back();
   if (left_gap > opts.far_field_tol || right_gap > opts.far_field_tol) {
      std::ostringstream msg;
      msg << "profile span too small: end-state gaps " << left_gap << " (left), " << right_gap
          << " (right) exceed far-field tolerance " << opts.far_field_tol;
      throw SolverError(msg.str());
   }
   return prof;
}

// --------------------------------------------------------- transition corrector

double TransitionCorrector::z_rate(double z) const
{
   const double q = std::exp(z);
   return one_minus_pow_over(q, gamma_) / (mu_ * s_);
}

double TransitionCorrector::rhs(double vt) const
{
   return (1.0 - std::pow(vt, -gamma_)) / (mu_ * s_);
}

double TransitionCorrector::operator()(double y) const
{
   if (y < grid_.x_left())
      return 1.0 + std::exp(z_.front() + dz_.front() * (y - grid_.x_left()));
   if (y > grid_.x_right()) {
      std::ostringstream msg;
      msg << "transition corrector evaluated at y = " << y << " beyond y_hi = " << grid_.x_right();
      throw std::out_of_range(msg.str());
   }
   const double h = grid_.h();
   auto i = static_cast<std::size_t>(std::floor((y - grid_.x_left()) / h));
   i = std::min(i, grid_.size() - 2);
   const double t = (y - grid_.x(i)) / h;
   const double t2 = t * t;
   const double t3 = t2 * t;
   const double z = (2 * t3 - 3 * t2 + 1) * z_[i] + (t3 - 2 * t2 + t) * h * dz_[i]
                    + (-2 * t3 + 3 * t2) * z_[i + 1] + (t3 - t2) * h * dz_[i + 1];
   return 1.0 + std::exp(z);
}

TransitionCorrector transition_corrector_solve(double gamma, double mu, double s, double y_hi,
                                               double y_lo, double dy, const OdeControls& ode)
{
   if (!(s > 0.0) || !(gamma >= 1.0) || !(mu > 0.0))
      throw std::invalid_argument("transition corrector: need s > 0, gamma >= 1, mu > 0");
   if (!(y_lo < 0.0 && y_hi > 0.0 && dy > 0.0))
      throw std::invalid_argument("transition corrector: need y_lo < 0 < y_hi and dy > 0");

   TransitionCorrector tc;
   tc.gamma_ = gamma;
   tc.mu_ = mu;
   tc.s_ = s;
   const auto n_lo = static_cast<std::size_t>(std::ceil(-y_lo / dy));
   const auto n_hi = static_cast<std::size_t>(std::ceil(y_hi / dy));
   tc.grid_ = Grid1D(-static_cast<double>(n_lo) * dy, static_cast<double>(n_hi) * dy,
                     n_lo + n_hi + 1);
   const std::size_t n = tc.grid_.size();
   tc.z_.assign(n, 0.0);
   auto rate = [&tc](double z) { return tc.z_rate(z); };

   // v~(0) = 2, i.e. z(0) = 0.
   double z = 0.0;
   for (std::size_t i = n_lo + 1; i < n; ++i) {
      z = integrate_scalar(rate, z, tc.grid_.x(i - 1), tc.grid_.x(i), ode);
      tc.z_[i] = z;
   }
   z = 0.0;
   for (std::size_t i = n_lo; i-- > 0;) {
      z = integrate_scalar(rate, z, tc.grid_.x(i + 1), tc.grid_.x(i), ode);
      tc.z_[i] = z;
   }
   tc.dz_.resize(n);
   tc.vt_.resize(n);
   for (std::size_t i = 0; i < n; ++i) {
      tc.dz_[i] = tc.z_rate(tc.z_[i]);
      tc.vt_[i] = 1.0 + std::exp(tc.z_[i]);
   }
   return tc;
}

// ------------------------------------------------------------ three zones

ZoneReport three_zone_diagnostics(const EpsProfile& eps, const LimitProfile& limit,
                                  const ZoneParams& params)
{
   const double vp = eps.v_plus();
   const double s0 = 1.0 / std::sqrt(vp - 1.0);
   const EndStates& les = limit.end_states();
   if (std::abs(les.v_plus - vp) > 1e-14 * vp || std::abs(les.mu - eps.end_states().mu) > 0.0)
      throw InvalidEndStates("three-zone diagnostics: profiles do not share end states");
   if (std::abs(limit.speed() - s0) > 1e-9 * s0) {
      std::ostringstream msg;
      msg << "three-zone diagnostics: limit speed " << limit.speed()
          << " differs from the unit-pressure front speed " << s0
          << " (need (u_minus - u_plus)^2 = v_plus - 1)";
      throw InvalidEndStates(msg.str());
   }

   const double eps_val = eps.law().epsilon;
   const double gam = eps.law().gamma;
   const double delta = std::pow(eps_val, 1.0 / gam);
   const double eta = std::pow(eps_val, 1.0 / (gam + 1.0));

   ZoneReport rep;
   rep.epsilon = eps_val;
   rep.gamma = gam;

   // Free zone: nodes with x >= 0 plus the origin itself.
   rep.sup_err_free = std::abs(eps.v_at_origin() - limit.v(0.0));
   const Grid1D& g = eps.grid();
   for (std::size_t i = 0; i < g.size(); ++i) {
      if (g.x(i) >= 0.0)
         rep.sup_err_free = std::max(rep.sup_err_free, std::abs(eps.v_samples()[i] - limit.v(g.x(i))));
   }

   const double target = 1.0 + params.K * delta;
   if (!(target > eps.v_minus()) || !(target < eps.v_at_origin())) {
      rep.degenerate = true;
      rep.x_min = std::numeric_limits<double>::quiet_NaN();
      rep.x_star = std::numeric_limits<double>::quiet_NaN();
      rep.transition_err = std::numeric_limits<double>::quiet_NaN();
      return rep;
   }
   rep.x_min = eps.x_of_v(target);

   const std::size_t nz = params.n_zone;
   const double hz = -rep.x_min / static_cast<double>(nz);
   std::vector<double> xs(nz + 1), excess(nz + 1);
   for (std::size_t j = 0; j <= nz; ++j) {
      xs[j] = rep.x_min + static_cast<double>(j) * hz;
      excess[j] = eps.v(xs[j]) - limit.v(xs[j]);
   }
   excess[nz] = eps.v_at_origin() - 1.0;

   const double window = params.C0 * eta;
   const double y_hi = (window - rep.x_min) / delta + 1.0;
   const double y_lo = -40.0;
   const double dy = std::max(0.02, (y_hi - y_lo) / 2.0e5);
   const auto corr = transition_corrector_solve(gam, les.mu, limit.speed(), y_hi, y_lo, dy);

   auto objective = [&](double xstar) {
      double m = 0.0;
      for (std::size_t j = 0; j <= nz; ++j) {
         const double r = excess[j] - delta * corr((xs[j] - xstar) / delta);
         m = std::max(m, std::abs(r) / std::max(std::abs(xs[j]), hz));
      }
      return m;
   };

   const std::size_t ns = std::max<std::size_t>(params.n_xstar, 2);
   std::size_t best = 0;
   double best_val = std::numeric_limits<double>::infinity();
   std::vector<double> cand(ns);
   for (std::size_t k = 0; k < ns; ++k) {
      cand[k] = -window + window * static_cast<double>(k) / static_cast<double>(ns - 1);
      const double val = objective(cand[k]);
      if (val < best_val) {
         best_val = val;
         best = k;
      }
   }
   double xstar = cand[best];
   if (params.refine_xstar) {
      const double a = cand[best == 0 ? 0 : best - 1];
      const double b = cand[std::min(best + 1, ns - 1)];
      // Brent's absolute tolerance floor is O(1e-8) in its argument, so search
      // in units of eps^(1/gamma).
      auto scaled = [&](double t) { return objective(t * delta); };
      std::uintmax_t max_iter = 200;
      const auto [tr, fr] =
         boost::math::tools::brent_find_minima(scaled, a / delta, b / delta, 40, max_iter);
      if (fr < best_val) {
         xstar = tr * delta;
         best_val = fr;
      }
   }
   rep.x_star = xstar;
   rep.transition_err = best_val;
   return rep;
}

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y)
{
   if (x.size() != y.size() || x.size() < 2)
      throw std::invalid_argument("fit_loglog_slope: need two equally sized samples");
   const auto n = static_cast<double>(x.size());
   double sx = 0, sy = 0, sxx = 0, sxy = 0;
   for (std::size_t i = 0; i < x.size(); ++i) {
      const double lx = std::log(x[i]);
      const double ly = std::log(y[i]);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
   }
   return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace fcns
