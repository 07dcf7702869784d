#include "fcns/energy.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "fcns/errors.hpp"
#include "fcns/tridiag.hpp"

namespace fcns {

namespace {

struct ShiftedProfile
{
   GridFunction v;
   GridFunction dv;
   GridFunction u;
   GridFunction w;
};

ShiftedProfile shifted(const EpsProfile& profile, const Grid1D& g, double t)
{
   const double shift = profile.speed() * t;
   ShiftedProfile sp{GridFunction(g), GridFunction(g), GridFunction(g), GridFunction(g)};
   for (std::size_t i = 0; i < g.size(); ++i) {
      const double x = g.x(i) - shift;
      const ProfileValues pv = profile.eval_interp(x);
      sp.v[i] = pv.v;
      sp.dv[i] = profile.dv_interp(x);
      sp.u[i] = pv.u;
      sp.w[i] = pv.w;
   }
   return sp;
}

// `offset` is a known quadrature defect removed from the residual mass.
void check_mass(const char* name, const GridFunction& dev, const GridFunction& integral,
                double mass_tol, double field_l1, double offset)
{
   const double mass = integral.back() - offset;
   const double scale = norm_l1(dev);
   const double floor = 64.0 * std::numeric_limits<double>::epsilon() * field_l1;
   if (std::abs(mass) > mass_tol * scale + floor) {
      std::ostringstream msg;
      msg << "zero-mass check failed for " << name << ": residual mass " << mass
          << " (L1 norm " << scale << ")";
      throw ConstraintViolation(msg.str());
   }
}

GridFunction squared(const GridFunction& f) { return hadamard(f, f); }

} // namespace

GridFunction IntegratedState::dV() const { return Vx.size() == V.size() ? Vx : diff1(V); }
GridFunction IntegratedState::dW() const { return Wx.size() == W.size() ? Wx : diff1(W); }

void EnergyConstants::validate() const
{
   if (!(delta0 > 0.0))
      throw std::invalid_argument("delta0 must be positive");
   if (!(c > 0.0) || c > 1.0)
      throw std::invalid_argument("c must lie in (0, 1]");
   if (!(mass_tol > 0.0))
      throw std::invalid_argument("mass_tol must be positive");
}

IntegratedState integrate_deviation(double t, const GridFunction& dv, const GridFunction& dw,
                                    const EnergyConstants& constants, double v_l1, double w_l1,
                                    double v_offset, double w_offset)
{
   IntegratedState ist{t, cumulative(dv), cumulative(dw), dv, dw};
   check_mass("v", dv, ist.V, constants.mass_tol, v_l1, v_offset);
   check_mass("w", dw, ist.W, constants.mass_tol, w_l1, w_offset);
   return ist;
}

IntegratedState integrated_vars(const EpsState& state, const EpsProfile& profile,
                                const EnergyConstants& constants)
{
   const Grid1D& g = state.grid();
   const ShiftedProfile sp = shifted(profile, g, state.t);
   const ShiftedProfile sp0 = shifted(profile, g, 0.0);
   // The trapezoid sum of the sampled profile is not invariant under
   // sub-cell shifts; its exact change over [x_left, x_right] is s t times
   // the jump between the end states.
   const double st = profile.speed() * state.t;
   const double w_minus = profile.end_states().u_minus;
   const double v_defect = integrate(sp.v) - integrate(sp0.v)
                           - st * (profile.v_minus() - profile.v_plus());
   const double w_defect = integrate(sp.w) - integrate(sp0.w) - st * (w_minus - profile.u_plus());
   return integrate_deviation(state.t, state.v - sp.v, state.w - sp.w, constants,
                              norm_l1(state.v), norm_l1(state.w), -v_defect, -w_defect);
}

IntegratedState integrated_vars(const EpsState& state, const EpsState& reference,
                                const EnergyConstants& constants)
{
   if (!(state.grid() == reference.grid()))
      throw std::invalid_argument("integrated_vars: reference lives on another grid");
   return integrate_deviation(state.t, state.v - reference.v, state.w - reference.w, constants,
                              norm_l1(state.v), norm_l1(state.w));
}

EnergyReport energy_report(const IntegratedState& ist, const EpsProfile& profile,
                           const EnergyConstants&)
{
   const Grid1D& g = ist.V.grid();
   const ShiftedProfile sp = shifted(profile, g, ist.t);
   const PressureLaw& law = profile.law();
   const GridFunction inv_weight = map(sp.v, [&law](double v) { return -1.0 / law.dp(v); });

   const GridFunction V1 = ist.dV();
   const GridFunction V2 = diff1(V1);
   const GridFunction W1 = ist.dW();
   const GridFunction* Vd[4] = {&ist.V, &V1, &V2, nullptr};
   const GridFunction V3 = diff1(V2);
   Vd[3] = &V3;
   const GridFunction W2 = diff1(W1);
   const GridFunction* Wd[3] = {&ist.W, &W1, &W2};

   EnergyReport rep;
   for (std::size_t k = 0; k < 3; ++k) {
      const GridFunction Wsq = squared(*Wd[k]);
      rep.E[k] = integrate(hadamard(Wsq, inv_weight) + squared(*Vd[k]));
      rep.D[k] = integrate(hadamard(Wsq, sp.dv) + squared(*Vd[k + 1]));
   }
   return rep;
}

XNormTracker::XNormTracker(const EnergyConstants& constants, const PressureLaw& law)
{
   constants.validate();
   for (int k = 0; k < 3; ++k)
      weights_[k] = std::pow(constants.c, k) * std::pow(law.epsilon, 2.0 * k / law.gamma);
}

void XNormTracker::add(double t, EnergyReport& report)
{
   if (started_) {
      if (!(t > last_t_))
         throw std::invalid_argument("XNormTracker: times must increase");
      for (std::size_t k = 0; k < 3; ++k)
         int_d_[k] += 0.5 * (t - last_t_) * (last_d_[k] + report.D[k]);
   }
   started_ = true;
   last_t_ = t;
   last_d_ = report.D;
   current_ = 0.0;
   for (std::size_t k = 0; k < 3; ++k)
      current_ += weights_[k] * (report.E[k] + int_d_[k]);
   sup_ = std::max(sup_, current_);
   report.x_norm_sq = sup_;
}

std::string SmallnessResult::to_json() const
{
   nlohmann::ordered_json j;
   j["pass"] = pass;
   j["lhs"] = lhs;
   j["rhs"] = rhs;
   j["delta0"] = delta0;
   j["c"] = c;
   j["epsilon"] = epsilon;
   j["gamma"] = gamma;
   return j.dump();
}

SmallnessResult smallness_check(const IntegratedState& ist0, const EpsProfile& profile,
                                const EnergyConstants& constants)
{
   constants.validate();
   const double eps = profile.law().epsilon;
   const double gam = profile.law().gamma;
   const EnergyReport rep = energy_report(ist0, profile, constants);
   SmallnessResult r;
   for (int k = 0; k < 3; ++k)
      r.lhs += std::pow(eps, 2.0 * k / gam) * rep.E[k];
   r.rhs = constants.delta0 * constants.delta0 * std::pow(eps, 5.0 / gam);
   r.pass = r.lhs <= r.rhs;
   r.delta0 = constants.delta0;
   r.c = constants.c;
   r.epsilon = eps;
   r.gamma = gam;
   return r;
}

GridFunction linearization_residual_v(const IntegratedState& a, const IntegratedState& b,
                                      const EpsProfile& profile)
{
   const double dt = b.t - a.t;
   if (!(dt > 0.0))
      throw std::invalid_argument("linearization residual: records must be increasing in time");
   const Grid1D& g = b.V.grid();
   const double mu = profile.end_states().mu;
   const ShiftedProfile sp = shifted(profile, g, b.t);
   const GridFunction q = hadamard(b.dV(), map(sp.v, [](double v) { return 1.0 / v; }));
   GridFunction rem(g);
   for (std::size_t i = 0; i < g.size(); ++i) {
      if (!(1.0 + q[i] > 0.0)) {
         std::ostringstream msg;
         msg << "1 + d_x V / v_eps = " << 1.0 + q[i] << " <= 0 at x = " << g.x(i);
         throw DomainError(msg.str());
      }
      rem[i] = std::log1p(q[i]) - q[i];
   }
   const GridFunction lin = (-1.0) * b.dW() - mu * diff1(q);
   const GridFunction F = mu * diff1(rem);
   return (1.0 / dt) * (b.V - a.V) + lin - F;
}

GridFunction linearization_residual_w(const IntegratedState& a, const IntegratedState& b,
                                      const EpsProfile& profile)
{
   const double dt = b.t - a.t;
   if (!(dt > 0.0))
      throw std::invalid_argument("linearization residual: records must be increasing in time");
   const Grid1D& g = a.V.grid();
   const PressureLaw& law = profile.law();
   const ShiftedProfile sp = shifted(profile, g, a.t);
   const GridFunction Vx = a.dV();
   GridFunction lin(g), G(g);
   for (std::size_t i = 0; i < g.size(); ++i) {
      const double vb = sp.v[i];
      const double dp = law.dp(vb);
      if (!(vb + Vx[i] > 1.0)) {
         std::ostringstream msg;
         msg << "v_eps + d_x V = " << vb + Vx[i] << " <= 1 at x = " << g.x(i);
         throw DomainError(msg.str());
      }
      lin[i] = dp * Vx[i];
      G[i] = -(law(vb + Vx[i]) - law(vb) - dp * Vx[i]);
   }
   return (1.0 / dt) * (b.W - a.W) + lin - G;
}

LinearizationResidual linearization_residual(const IntegratedState& a, const IntegratedState& b,
                                             const EpsProfile& profile)
{
   return {norm_l2(linearization_residual_v(a, b, profile)),
           norm_l2(linearization_residual_w(a, b, profile))};
}

L1Deviation l1_diagnostics(const EpsState& state, const EpsProfile& profile)
{
   const ShiftedProfile sp = shifted(profile, state.grid(), state.t);
   const double mu = profile.end_states().mu;
   return {norm_l1(state.v - sp.v), norm_l1(state.u(mu) - sp.u), norm_l1(state.w - sp.w)};
}

L1Deviation l1_diagnostics(const EpsState& state, const EpsState& reference, double mu)
{
   return {norm_l1(state.v - reference.v), norm_l1(state.u(mu) - reference.u(mu)),
           norm_l1(state.w - reference.w)};
}

IntegratedState linearized_step(const IntegratedState& ist, double dt, const EpsProfile& profile)
{
   const Grid1D& g = ist.V.grid();
   const std::size_t n = g.size();
   const double h = g.h();
   const double mu = profile.end_states().mu;
   const PressureLaw& law = profile.law();
   const double s = profile.speed();

   IntegratedState next{ist.t + dt, GridFunction(g), GridFunction(g), {}, {}};
   for (std::size_t i = 1; i + 1 < n; ++i) {
      const double dp = law.dp(profile.v_interp(g.x(i) - s * ist.t));
      next.W[i] = ist.W[i] - dt * dp * (ist.V[i + 1] - ist.V[i - 1]) / (2.0 * h);
   }

   // Inverse profile at the cell midpoints at the new time.
   std::vector<double> inv_mid(n - 1);
   for (std::size_t i = 0; i + 1 < n; ++i)
      inv_mid[i] = 1.0 / profile.v_interp(g.x(i) + 0.5 * h - s * next.t);

   const double k = dt * mu / (h * h);
   std::vector<double> a(n, 0.0), b(n, 1.0), c(n, 0.0), d(n, 0.0);
   for (std::size_t i = 1; i + 1 < n; ++i) {
      a[i] = -k * inv_mid[i - 1];
      c[i] = -k * inv_mid[i];
      b[i] = 1.0 + k * (inv_mid[i - 1] + inv_mid[i]);
      d[i] = ist.V[i] + dt * (next.W[i + 1] - next.W[i - 1]) / (2.0 * h);
   }
   a[1] = 0.0;
   c[n - 2] = 0.0;
   if (!solve_tridiagonal(a, b, c, d))
      throw SolverError("linearized step: singular matrix");
   next.V.data() = d;
   next.V[0] = next.V[n - 1] = 0.0;
   return next;
}

double LinearEnergyBalance::dissipation_rate(const IntegratedState& ist) const
{
   const Grid1D& g = ist.V.grid();
   const ShiftedProfile sp = shifted(*profile_, g, ist.t);
   const PressureLaw& law = profile_->law();
   const double mu = profile_->end_states().mu;
   const double s = profile_->speed();
   const GridFunction Vx = ist.dV();
   GridFunction integrand(g);
   for (std::size_t i = 0; i < g.size(); ++i) {
      integrand[i] = 2.0 * mu * Vx[i] * Vx[i] / sp.v[i]
                     + s * law.weight_ratio(sp.v[i]) * sp.dv[i] * ist.W[i] * ist.W[i];
   }
   return integrate(integrand);
}

double LinearEnergyBalance::add(const IntegratedState& ist)
{
   const double e0 = energy_report(ist, *profile_).E[0];
   const double rate = dissipation_rate(ist);
   if (!started_) {
      started_ = true;
      e0_initial_ = e0;
   } else {
      acc_ += 0.5 * (ist.t - last_t_) * (rate + last_rate_);
   }
   last_t_ = ist.t;
   last_rate_ = rate;
   return e0 + acc_;
}

} // namespace fcns
