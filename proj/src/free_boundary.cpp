#include "fcns/free_boundary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "fcns/errors.hpp"
#include "fcns/tridiag.hpp"

namespace fcns {

namespace {

std::size_t level_count(double T, double dt)
{
   return static_cast<std::size_t>(std::llround(T / dt)) + 1;
}

// Coefficients of (c0 y^{m+1} + c1 y^m + c2 y^{m-1}) / dt.
struct Bdf
{
   double c0, c1, c2;
};

Bdf bdf(int order, std::size_t m)
{
   if (order == 1 || m == 0)
      return {1.0, -1.0, 0.0};
   return {1.5, -2.0, 0.5};
}

double lerp_levels(const std::vector<double>& t, const std::vector<double>& y, double s)
{
   if (s <= t.front())
      return y.front();
   if (s >= t.back())
      return y.back();
   const double dt = t[1] - t[0];
   auto j = static_cast<std::size_t>((s - t.front()) / dt);
   j = std::min(j, t.size() - 2);
   const double a = (s - t[j]) / dt;
   return (1.0 - a) * y[j] + a * y[j + 1];
}

double bump(double x, double center, double radius)
{
   const double r = (x - center) / radius;
   if (std::abs(r) >= 1.0)
      return 0.0;
   return std::exp(1.0 - 1.0 / (1.0 - r * r));
}

std::vector<GridFunction> solve_v(const InterfacePath& y, const HalfLineData& data,
                                  const EffectiveVelocity* w0, const FBConfig& cfg)
{
   const Grid1D& g = data.grid;
   const std::size_t n = g.size();
   const double h = g.h();
   const double mu = data.mu();
   const std::size_t M = y.size();
   std::vector<GridFunction> out;
   out.reserve(M);
   out.push_back(data.v0);

   std::vector<double> lnv(n), F(n), a(n), b(n), c(n), src(n, 0.0);
   for (std::size_t m = 0; m + 1 < M; ++m) {
      const double dt = y.times[m + 1] - y.times[m];
      const Bdf k = bdf(cfg.time_order, m);
      const double yp = y.x_tilde_prime[m + 1];
      const double shift = y.x_tilde[m + 1];
      const GridFunction& vm = out[m];
      const GridFunction* vmm = m > 0 ? &out[m - 1] : nullptr;
      if (w0)
         for (std::size_t i = 1; i + 1 < n; ++i)
            src[i] = w0->dx(g.x(i) + shift);

      GridFunction next = vm;
      auto& v = next.data();
      v.front() = 1.0;
      v.back() = data.end_states.v_plus;
      auto residual = [&]() {
         for (std::size_t i = 0; i < n; ++i)
            lnv[i] = std::log(v[i]);
         double r = 0.0;
         for (std::size_t i = 1; i + 1 < n; ++i) {
            double hist = k.c1 * vm[i];
            if (vmm)
               hist += k.c2 * (*vmm)[i];
            F[i] = (k.c0 * v[i] + hist) / dt - yp * (v[i + 1] - v[i - 1]) / (2.0 * h)
                   - mu * (lnv[i + 1] - 2.0 * lnv[i] + lnv[i - 1]) / (h * h) - src[i];
            r = std::max(r, std::abs(F[i]) * dt);
         }
         return r;
      };
      double r = residual();
      int it = 0;
      while (r >= cfg.newton_tol) {
         if (it == cfg.newton_max) {
            std::ostringstream msg;
            msg << "v_step: Newton did not converge at t = " << y.times[m + 1]
                << " (residual " << r << ")";
            throw SolverError(msg.str());
         }
         a[0] = c[0] = a[n - 1] = c[n - 1] = 0.0;
         b[0] = b[n - 1] = 1.0;
         F[0] = F[n - 1] = 0.0;
         for (std::size_t i = 1; i + 1 < n; ++i) {
            a[i] = i > 1 ? yp / (2.0 * h) - mu / (h * h * v[i - 1]) : 0.0;
            c[i] = i + 2 < n ? -yp / (2.0 * h) - mu / (h * h * v[i + 1]) : 0.0;
            b[i] = k.c0 / dt + 2.0 * mu / (h * h * v[i]);
            F[i] = -F[i];
         }
         if (!solve_tridiagonal(a, b, c, F))
            throw SolverError("v_step: singular Newton matrix");
         double lambda = 1.0;
         for (int halving = 0; halving <= 8; ++halving) {
            bool okay = true;
            for (std::size_t i = 1; i + 1 < n; ++i)
               if (!(v[i] + lambda * F[i] > 1.0)) {
                  okay = false;
                  break;
               }
            if (okay)
               break;
            if (halving == 8) {
               std::ostringstream msg;
               msg << "v_step: v <= 1 in the interior at t = " << y.times[m + 1];
               throw ConstraintViolation(msg.str());
            }
            lambda *= 0.5;
         }
         for (std::size_t i = 1; i + 1 < n; ++i)
            v[i] += lambda * F[i];
         r = residual();
         ++it;
         if (!std::isfinite(r))
            throw SolverError("v_step: non-finite residual");
      }
      out.push_back(std::move(next));
   }
   return out;
}

} // namespace

HalfLineData traveling_wave_data(const EndStates& es, double X, std::size_t n)
{
   es.validate();
   const LimitProfile prof(es);
   HalfLineData d;
   d.grid = Grid1D(0.0, X, n);
   d.end_states = es;
   d.v0 = GridFunction::sample(d.grid, [&](double x) { return x == 0.0 ? 1.0 : prof.v(x); });
   d.u0 = GridFunction::sample(d.grid, [&](double x) { return prof.u(x); });
   return d;
}

HalfLineData perturb_data(HalfLineData data, double amp_v, double amp_u, double center,
                          double radius)
{
   for (std::size_t i = 0; i < data.grid.size(); ++i) {
      const double b = bump(data.grid.x(i), center, radius);
      data.v0[i] += amp_v * b;
      data.u0[i] += amp_u * b;
   }
   return data;
}

HypothesisReport validate_hypotheses(const HalfLineData& data, const HypothesisTolerances& tol)
{
   const EndStates& es = data.end_states;
   const double h = data.grid.h();
   const double mu = data.mu();
   HypothesisReport r;
   r.v_trace = data.v0.front();
   r.u_trace = data.u0.front();
   r.h1_ok = std::abs(r.v_trace - 1.0) <= tol.trace_tol
             && std::abs(r.u_trace - es.u_minus) <= tol.trace_tol;

   const GridFunction dv = map(data.v0, [&es](double v) { return v - es.v_plus; });
   const GridFunction du = map(data.u0, [&es](double u) { return u - es.u_plus; });
   r.h2_norm_v = norm_h(dv, 3);
   r.h2_norm_u = norm_h(du, 3);
   r.h2_ok = std::isfinite(r.h2_norm_v) && std::isfinite(r.h2_norm_u);

   r.dv0 = left_trace_d1(data.v0.values(), h);
   r.du0 = left_trace_d1(data.u0.values(), h);
   const double d2v = left_trace_d2(data.v0.values(), h);
   if (r.dv0 == 0.0)
      throw DomainError("degenerate data: d_x v0(0+) = 0");
   const double t1 = -r.du0 * r.du0 / r.dv0;
   const double t2 = -mu * r.dv0 * r.du0;
   const double t3 = mu * d2v;
   r.h3_residual = t1 + t2 + t3;
   r.h3_scale = std::max({1.0, std::abs(t1), std::abs(t2), std::abs(t3)});
   r.h3_ok = std::abs(r.h3_residual) <= tol.h3_tol * r.h3_scale;

   r.min_v_interior = std::numeric_limits<double>::infinity();
   for (std::size_t i = 1; i < data.grid.size(); ++i)
      r.min_v_interior = std::min(r.min_v_interior, data.v0[i]);
   r.h4_ok = r.dv0 > 0.0 && r.du0 < 0.0 && r.min_v_interior > 1.0;
   return r;
}

EffectiveVelocity::EffectiveVelocity(const HalfLineData& data, double far_field_tol)
{
   const Grid1D& g = data.grid;
   const double mu = data.mu();
   const GridFunction lnv = map(data.v0, [](double v) { return std::log(v); });
   w_ = data.u0 - mu * diff1(lnv);
   const double dv0 = left_trace_d1(data.v0.values(), g.h());
   left_ = data.end_states.u_minus - mu * dv0;
   w_[0] = data.u0.front() - mu * left_trace_d1(lnv.values(), g.h());
   dw_ = diff1(w_);
   far_ = data.end_states.u_plus;
   // Beyond X only usable when the data has settled.
   if (std::abs(w_.back() - far_) > far_field_tol)
      far_ = std::numeric_limits<double>::quiet_NaN();
}

double EffectiveVelocity::operator()(double x) const
{
   if (x < 0.0) {
      if (strict)
         throw MonotonicityViolation("w0 evaluated at x < 0: the interface moved backwards");
      return left_;
   }
   if (x > w_.grid().x_right()) {
      if (std::isnan(far_))
         throw std::out_of_range("w0 evaluated beyond X but the data is not at its far field");
      return far_;
   }
   return w_.interpolate(x);
}

double EffectiveVelocity::dx(double x) const
{
   if (x < 0.0) {
      if (strict)
         throw MonotonicityViolation("w0 evaluated at x < 0: the interface moved backwards");
      return 0.0;
   }
   if (x > w_.grid().x_right()) {
      if (std::isnan(far_))
         throw std::out_of_range("w0 evaluated beyond X but the data is not at its far field");
      return 0.0;
   }
   return dw_.interpolate(x);
}

EffectiveVelocity w0_build(const HalfLineData& data, double far_field_tol)
{
   return EffectiveVelocity(data, far_field_tol);
}

void FBConfig::validate() const
{
   if (!(T > 0.0) || !(dt > 0.0) || dt > T)
      throw std::invalid_argument("free boundary: need 0 < dt <= T");
   if (!(T_min > 0.0))
      throw std::invalid_argument("free boundary: T_min must be positive");
   if (!(picard_tol > 0.0) || picard_max < 1)
      throw std::invalid_argument("free boundary: bad Picard controls");
   if (time_order != 1 && time_order != 2)
      throw std::invalid_argument("free boundary: time_order must be 1 or 2");
   if (!(damping_fallback > 0.0) || damping_fallback > 1.0)
      throw std::invalid_argument("free boundary: damping_fallback must lie in (0, 1]");
}

double InterfacePath::at(double t) const { return lerp_levels(times, x_tilde, t); }
double InterfacePath::prime_at(double t) const { return lerp_levels(times, x_tilde_prime, t); }

double InterfacePath::h2_norm() const
{
   const std::size_t M = times.size();
   if (M < 3)
      return 0.0;
   const Grid1D tg(times.front(), times.back(), M);
   const GridFunction x(tg, x_tilde);
   const GridFunction xp(tg, x_tilde_prime);
   const GridFunction xpp = diff1(xp);
   return std::sqrt(integrate(hadamard(x, x)) + integrate(hadamard(xp, xp))
                    + integrate(hadamard(xpp, xpp)));
}

InterfacePath linear_path(double slope, double T, double dt)
{
   const std::size_t M = level_count(T, dt);
   InterfacePath p;
   p.times.resize(M);
   p.x_tilde.resize(M);
   p.x_tilde_prime.assign(M, slope);
   for (std::size_t m = 0; m < M; ++m) {
      p.times[m] = static_cast<double>(m) * dt;
      p.x_tilde[m] = slope * p.times[m];
   }
   return p;
}

std::vector<GridFunction> v_step(const InterfacePath& y, const HalfLineData& data,
                                 const EffectiveVelocity& w0, const FBConfig& cfg)
{
   return solve_v(y, data, &w0, cfg);
}

std::vector<GridFunction> v_step_unforced(const InterfacePath& y, const HalfLineData& data,
                                          const FBConfig& cfg)
{
   return solve_v(y, data, nullptr, cfg);
}

std::vector<GridFunction> u_step(const InterfacePath& y, const std::vector<GridFunction>& v,
                                 const HalfLineData& data, const FBConfig& cfg)
{
   const Grid1D& g = data.grid;
   const std::size_t n = g.size();
   const double h = g.h();
   const double mu = data.mu();
   const std::size_t M = y.size();
   if (v.size() != M)
      throw std::invalid_argument("u_step: v and path have different level counts");
   std::vector<GridFunction> out;
   out.reserve(M);
   out.push_back(data.u0);
   std::vector<double> a(n), b(n), c(n), d(n), inv_mid(n - 1);
   for (std::size_t m = 0; m + 1 < M; ++m) {
      const double dt = y.times[m + 1] - y.times[m];
      const Bdf k = bdf(cfg.time_order, m);
      const double yp = y.x_tilde_prime[m + 1];
      const GridFunction& vn = v[m + 1];
      for (std::size_t i = 0; i + 1 < n; ++i)
         inv_mid[i] = 0.5 * (1.0 / vn[i] + 1.0 / vn[i + 1]);
      a[0] = c[0] = a[n - 1] = c[n - 1] = 0.0;
      b[0] = b[n - 1] = 1.0;
      d[0] = data.end_states.u_minus;
      d[n - 1] = data.end_states.u_plus;
      const double q = mu / (h * h);
      for (std::size_t i = 1; i + 1 < n; ++i) {
         a[i] = yp / (2.0 * h) - q * inv_mid[i - 1];
         c[i] = -yp / (2.0 * h) - q * inv_mid[i];
         b[i] = k.c0 / dt + q * (inv_mid[i - 1] + inv_mid[i]);
         double hist = k.c1 * out[m][i];
         if (m > 0)
            hist += k.c2 * out[m - 1][i];
         d[i] = -hist / dt;
      }
      if (!solve_tridiagonal(a, b, c, d))
         throw SolverError("u_step: singular matrix");
      out.emplace_back(g, d);
   }
   return out;
}

InterfacePath interface_update(const std::vector<GridFunction>& u, const InterfacePath& y,
                               const EffectiveVelocity& w0, const HalfLineData& data,
                               const FBConfig& cfg)
{
   const std::size_t M = y.size();
   const double mu = data.mu();
   const double um = data.end_states.u_minus;
   const double floor = cfg.denom_floor_rel * std::abs(um - data.end_states.u_plus);
   const double h = data.grid.h();
   InterfacePath z;
   z.times = y.times;
   z.x_tilde.assign(M, 0.0);
   z.x_tilde_prime.assign(M, 0.0);
   for (std::size_t m = 0; m < M; ++m) {
      const double denom = um - w0(y.x_tilde[m]);
      if (std::abs(denom) < floor) {
         std::ostringstream msg;
         msg << "near-singular denominator u_minus - w0(y) = " << denom << " at t = "
             << y.times[m] << " (d_x v_s(0+) -> 0)";
         throw SolverError(msg.str());
      }
      z.x_tilde_prime[m] = -mu * left_trace_d1(u[m].values(), h) / denom;
      if (m > 0)
         z.x_tilde[m] = z.x_tilde[m - 1]
                        + 0.5 * (y.times[m] - y.times[m - 1])
                             * (z.x_tilde_prime[m] + z.x_tilde_prime[m - 1]);
   }
   return z;
}

std::string to_string(FBStatus status)
{
   switch (status) {
   case FBStatus::converged:
      return "converged";
   case FBStatus::converged_reduced_T:
      return "converged_reduced_T";
   case FBStatus::failed_monotonicity:
      return "failed_monotonicity";
   case FBStatus::failed_contraction:
      return "failed_contraction";
   }
   return "unknown";
}

namespace {

double path_distance(const InterfacePath& a, const InterfacePath& b)
{
   double dx = 0.0, dp = 0.0;
   for (std::size_t m = 0; m < a.size(); ++m) {
      dx = std::max(dx, std::abs(a.x_tilde[m] - b.x_tilde[m]));
      dp = std::max(dp, std::abs(a.x_tilde_prime[m] - b.x_tilde_prime[m]));
   }
   return dx + dp;
}

struct MapResult
{
   InterfacePath z;
   std::vector<GridFunction> v;
   std::vector<GridFunction> u;
};

MapResult apply_map(const InterfacePath& y, const HalfLineData& data,
                    const EffectiveVelocity& w0, const FBConfig& cfg)
{
   MapResult r;
   r.v = v_step(y, data, w0, cfg);
   r.u = u_step(y, r.v, data, cfg);
   r.z = interface_update(r.u, y, w0, data, cfg);
   return r;
}

} // namespace

FBSolution picard_solve(const HalfLineData& data, const FBConfig& cfg)
{
   cfg.validate();
   data.end_states.validate();
   FBSolution sol;
   sol.data = data;
   sol.cfg = cfg;
   sol.w0 = w0_build(data, cfg.far_field_tol);

   const HypothesisReport hyp = validate_hypotheses(data);
   if (!(hyp.dv0 > 0.0))
      throw DomainError("free boundary: d_x v0(0+) must be positive");
   const double slope0 = -hyp.du0 / hyp.dv0;
   auto monotonicity_failure = [&](const std::string& what, double T, int k) {
      sol.status = FBStatus::failed_monotonicity;
      sol.message = what + "; the construction needs x~'(t) > 0";
      sol.T = T;
      sol.iterations = k;
      return sol;
   };
   if (!(slope0 > 0.0)) {
      std::ostringstream msg;
      msg << "initial interface speed -u0'(0+)/v0'(0+) = " << slope0 << " <= 0";
      return monotonicity_failure(msg.str(), cfg.T, 0);
   }

   double T = cfg.T;
   bool reduced = false;
   while (true) {
      InterfacePath y = linear_path(slope0, T, cfg.dt);
      sol.increments.clear();
      double theta = 1.0;
      bool converged = false;
      MapResult last;
      for (int k = 1; k <= cfg.picard_max; ++k) {
         try {
            last = apply_map(y, data, sol.w0, cfg);
         } catch (const MonotonicityViolation& e) {
            return monotonicity_failure(e.what(), T, k);
         }
         for (std::size_t m = 0; m < last.z.size(); ++m) {
            if (!(last.z.x_tilde_prime[m] > 0.0)) {
               std::ostringstream msg;
               msg << "interface speed " << last.z.x_tilde_prime[m] << " <= 0 at t = "
                   << last.z.times[m];
               return monotonicity_failure(msg.str(), T, k);
            }
         }
         const double inc = path_distance(last.z, y);
         sol.increments.push_back(inc);
         sol.iterations = k;
         if (inc < cfg.picard_tol) {
            converged = true;
            break;
         }
         if (sol.increments.size() >= 2 && inc >= sol.increments[sol.increments.size() - 2])
            theta = cfg.damping_fallback;
         for (std::size_t m = 0; m < y.size(); ++m) {
            y.x_tilde[m] = (1.0 - theta) * y.x_tilde[m] + theta * last.z.x_tilde[m];
            y.x_tilde_prime[m] = (1.0 - theta) * y.x_tilde_prime[m] + theta * last.z.x_tilde_prime[m];
         }
      }
      if (converged) {
         sol.status = reduced ? FBStatus::converged_reduced_T : FBStatus::converged;
         sol.T = T;
         sol.path = y;
         const double mu = data.mu();
         const double h = data.grid.h();
         sol.states.reserve(y.size());
         for (std::size_t m = 0; m < y.size(); ++m) {
            FBState st;
            st.t = y.times[m];
            st.v_s = last.v[m];
            st.u_s = last.u[m];
            const GridFunction lnv = map(st.v_s, [](double v) { return std::log(v); });
            st.w_s = st.u_s - mu * diff1(lnv);
            st.w_s[0] = st.u_s.front() - mu * left_trace_d1(lnv.values(), h);
            st.p_s = y.x_tilde_prime[m] * (data.end_states.u_minus - sol.w0(y.x_tilde[m]));
            sol.states.push_back(std::move(st));
         }
         return sol;
      }
      if (T / 2.0 < cfg.T_min || T / 2.0 < 2.0 * cfg.dt) {
         std::ostringstream msg;
         msg << "no contraction within " << cfg.picard_max << " iterations down to T = " << T
             << "; increments:";
         for (double q : sol.increments)
            msg << ' ' << q;
         sol.status = FBStatus::failed_contraction;
         sol.message = msg.str();
         sol.T = T;
         return sol;
      }
      T /= 2.0;
      reduced = true;
   }
}

IdentityReport identity_checks(const FBSolution& sol)
{
   if (!sol.ok())
      throw std::invalid_argument("identity_checks: solution did not converge");
   IdentityReport r;
   const Grid1D& g = sol.data.grid;
   const double h = g.h();
   const double mu = sol.data.mu();
   const double um = sol.data.end_states.u_minus;
   const EffectiveVelocity& w0 = sol.w0;
   r.min_p_s = std::numeric_limits<double>::infinity();
   r.min_v_interior = std::numeric_limits<double>::infinity();
   for (std::size_t m = 0; m < sol.states.size(); ++m) {
      const FBState& st = sol.states[m];
      const double xt = sol.path.x_tilde[m];
      const double xp = sol.path.x_tilde_prime[m];
      double tr = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i)
         tr = std::max(tr, std::abs(st.w_s[i] - w0(g.x(i) + xt)));
      const GridFunction lnv = map(st.v_s, [](double v) { return std::log(v); });
      const double dv = left_trace_d1(st.v_s.values(), h);
      const double du = left_trace_d1(st.u_s.values(), h);
      const double d2lnv = left_trace_d2(lnv.values(), h);
      const double ws0 = um - mu * left_trace_d1(lnv.values(), h);
      const double dws0 = du - mu * d2lnv;
      r.times.push_back(st.t);
      r.res_transport.push_back(tr);
      r.res_edo1.push_back(std::abs(um - mu * dv - w0(xt)));
      r.res_bcw.push_back(std::abs(mu * dws0 + xp * ws0 - xp * w0(xt) - mu * w0.dx(xt)));
      r.res_edo2.push_back(std::abs(xp * dv + du));
      r.p_s.push_back(st.p_s);
      r.p_s_trace.push_back(-mu * du);
      r.max_transport = std::max(r.max_transport, tr);
      r.max_edo1 = std::max(r.max_edo1, r.res_edo1.back());
      r.max_bcw = std::max(r.max_bcw, r.res_bcw.back());
      r.max_edo2 = std::max(r.max_edo2, r.res_edo2.back());
      r.max_p_s_mismatch = std::max(r.max_p_s_mismatch, std::abs(st.p_s + mu * du));
      r.min_p_s = std::min(r.min_p_s, st.p_s);
      for (std::size_t i = 1; i + 1 < g.size(); ++i)
         r.min_v_interior = std::min(r.min_v_interior, st.v_s[i]);
   }
   r.complementarity_ok = r.min_p_s >= 0.0 && r.min_v_interior > 1.0;
   return r;
}

double fixed_point_residual(const FBSolution& sol)
{
   if (!sol.ok())
      throw std::invalid_argument("fixed_point_residual: solution did not converge");
   const MapResult r = apply_map(sol.path, sol.data, sol.w0, sol.cfg);
   return path_distance(r.z, sol.path);
}

FullLineValues unshift(const FBSolution& sol, double t, double x)
{
   if (!sol.ok())
      throw std::invalid_argument("unshift: solution did not converge");
   const auto& times = sol.path.times;
   if (t < times.front() || t > times.back() + 1e-12)
      throw std::out_of_range("unshift: t outside the solved interval");
   const double dt = times[1] - times[0];
   auto j = static_cast<std::size_t>(std::floor((t - times.front()) / dt));
   j = std::min(j, times.size() - 1);
   const std::size_t j1 = std::min(j + 1, times.size() - 1);
   const double a = j1 == j ? 0.0 : (t - times[j]) / dt;
   const double xt = (1.0 - a) * sol.path.x_tilde[j] + a * sol.path.x_tilde[j1];
   const double ps = (1.0 - a) * sol.states[j].p_s + a * sol.states[j1].p_s;
   const EndStates& es = sol.data.end_states;
   if (x < xt)
      return {1.0, es.u_minus, ps};
   const double y = x - xt;
   if (y > sol.data.grid.x_right())
      return {es.v_plus, es.u_plus, 0.0};
   auto field = [&](const GridFunction& f0, const GridFunction& f1) {
      return (1.0 - a) * f0.interpolate(y) + a * f1.interpolate(y);
   };
   return {field(sol.states[j].v_s, sol.states[j1].v_s),
           field(sol.states[j].u_s, sol.states[j1].u_s), 0.0};
}

} // namespace fcns
