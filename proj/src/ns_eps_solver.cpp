#include "fcns/ns_eps_solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "fcns/errors.hpp"
#include "fcns/tridiag.hpp"

namespace fcns {

GridFunction EpsState::u(double mu) const
{
   GridFunction lnv = map(v, [](double x) { return std::log(x); });
   return w + mu * diff1(lnv);
}

double effective_amplitude(const PerturbationSpec& spec)
{
   if (spec.seed == 0)
      return spec.amplitude;
   std::mt19937_64 rng(spec.seed);
   return (rng() & 1U) ? -spec.amplitude : spec.amplitude;
}

double perturbation_dv(const PerturbationSpec& spec, double x)
{
   const double sigma = spec.width;
   const double z = (x - spec.center) / sigma;
   if (std::abs(z) > kPerturbationCutoff)
      return 0.0;
   const double a = effective_amplitude(spec);
   const double g = a * std::exp(-z * z);
   if (spec.shape == PerturbationShape::dipole)
      return -2.0 * z / sigma * g;
   // -(sigma^2 / 2) g''
   return (1.0 - 2.0 * z * z) * g;
}

Grid1D simulation_grid(const EpsProfile& profile, double T, double h, double far_field_tol,
                       double left_margin)
{
   if (!(h > 0.0) || !(T >= 0.0))
      throw std::invalid_argument("simulation grid: need h > 0 and T >= 0");
   auto [l, r] = recommended_span(profile.law(), profile.end_states(), far_field_tol);
   r += profile.speed() * T;
   if (left_margin < 0.0)
      left_margin = 1.5 * std::sqrt(std::abs(profile.law().dp(profile.v_minus()))) * T
                    + 10.0 * std::sqrt(profile.end_states().mu * T);
   l -= left_margin;
   const auto n = static_cast<std::size_t>(std::ceil((r - l) / h)) + 1;
   return Grid1D(l, l + static_cast<double>(n - 1) * h, n);
}

EpsState build_initial(const EpsProfile& profile, const PerturbationSpec& spec, const Grid1D& grid)
{
   if (!(spec.width > 0.0))
      throw std::invalid_argument("perturbation width must be positive");
   if (spec.amplitude != 0.0
       && (spec.center - kPerturbationCutoff * spec.width <= grid.x_left()
           || spec.center + kPerturbationCutoff * spec.width >= grid.x_right()))
      throw std::invalid_argument("perturbation support leaves the grid interior");

   const double mu = profile.end_states().mu;
   EpsState st;
   st.law = profile.law();
   st.v = GridFunction(grid);
   st.w = GridFunction(grid);
   GridFunction ln_ratio(grid);
   for (std::size_t i = 0; i < grid.size(); ++i) {
      const double x = grid.x(i);
      const double vb = profile.v_interp(x);
      const double v0 = vb + perturbation_dv(spec, x);
      if (!(v0 > 1.0)) {
         std::ostringstream msg;
         msg << "perturbation too large: v0 = " << v0 << " <= 1 at node " << i << " (x = " << x
             << ")";
         throw DomainError(msg.str());
      }
      st.v[i] = v0;
      st.w[i] = profile.eval_interp(x).w;
      ln_ratio[i] = std::log(v0 / vb);
   }
   if (spec.amplitude != 0.0)
      st.w -= mu * diff1(ln_ratio);
   return st;
}

double dt_guard_limit(const PressureLaw& law, const GridFunction& v)
{
   const double h = v.grid().h();
   // |p'| is largest where v is smallest.
   const double pmax = std::abs(law.dp(v.min()));
   return 0.4 * h / std::max(pmax * h, std::sqrt(pmax));
}

EpsState step(const EpsState& state, double dt, const SolverConfig& cfg, double mu,
              StepStats* stats)
{
   const Grid1D& g = state.grid();
   const std::size_t n = g.size();
   const double h = g.h();
   const auto& vn = state.v;

   EpsState next = state;
   next.t = state.t + dt;

   std::vector<double> p(n);
   for (std::size_t i = 0; i < n; ++i)
      p[i] = state.law(vn[i]);
   for (std::size_t i = 1; i + 1 < n; ++i)
      next.w[i] = state.w[i] - dt * (p[i + 1] - p[i - 1]) / (2.0 * h);

   std::vector<double> rhs(n);
   for (std::size_t i = 1; i + 1 < n; ++i)
      rhs[i] = vn[i] + dt * (next.w[i + 1] - next.w[i - 1]) / (2.0 * h);

   const double k = dt * mu / (h * h);
   auto& v = next.v.data();
   std::vector<double> lnv(n), F(n), a(n), b(n), c(n);
   auto residual = [&]() {
      for (std::size_t i = 0; i < n; ++i)
         lnv[i] = std::log(v[i]);
      double r = 0.0;
      F[0] = F[n - 1] = 0.0;
      for (std::size_t i = 1; i + 1 < n; ++i) {
         F[i] = v[i] - k * (lnv[i + 1] - 2.0 * lnv[i] + lnv[i - 1]) - rhs[i];
         r = std::max(r, std::abs(F[i]));
      }
      return r;
   };

   std::vector<double> trace;
   double r = residual();
   trace.push_back(r);
   int it = 0;
   while (r >= cfg.newton_tol) {
      if (it == cfg.newton_max) {
         std::ostringstream msg;
         msg << "Newton did not converge in " << cfg.newton_max << " iterations at t = "
             << next.t << "; residual trace:";
         for (double q : trace)
            msg << ' ' << q;
         throw SolverError(msg.str());
      }
      a[0] = c[0] = a[n - 1] = c[n - 1] = 0.0;
      b[0] = b[n - 1] = 1.0;
      for (std::size_t i = 1; i + 1 < n; ++i) {
         a[i] = i > 1 ? -k / v[i - 1] : 0.0;
         b[i] = 1.0 + 2.0 * k / v[i];
         c[i] = i + 2 < n ? -k / v[i + 1] : 0.0;
         F[i] = -F[i];
      }
      if (!solve_tridiagonal(a, b, c, F))
         throw SolverError("singular Newton matrix in ns_eps step");
      double lambda = 1.0;
      auto admissible = [&](double lam) {
         for (std::size_t i = 1; i + 1 < n; ++i)
            if (!(v[i] + lam * F[i] > cfg.v_floor))
               return false;
         return true;
      };
      int halvings = 0;
      while (!admissible(lambda) && halvings < 8) {
         lambda *= 0.5;
         ++halvings;
      }
      if (!admissible(lambda)) {
         std::ostringstream msg;
         msg << "v fell below the floor " << cfg.v_floor << " at t = " << next.t;
         throw ConstraintViolation(msg.str());
      }
      for (std::size_t i = 1; i + 1 < n; ++i)
         v[i] += lambda * F[i];
      ++it;
      r = residual();
      trace.push_back(r);
      if (!std::isfinite(r))
         throw SolverError("Newton produced a non-finite residual at t = "
                           + std::to_string(next.t));
   }
   for (std::size_t i = 0; i < n; ++i) {
      if (!(v[i] > cfg.v_floor)) {
         std::ostringstream msg;
         msg << "v = " << v[i] << " <= floor at node " << i << ", t = " << next.t;
         throw ConstraintViolation(msg.str());
      }
   }
   if (stats) {
      stats->newton_iterations = it;
      stats->residual = r;
   }
   return next;
}

Trajectory simulate(const EpsState& init, double T, const SolverConfig& cfg, double mu,
                    const Observer& observer, std::size_t stride)
{
   if (!(T > 0.0))
      throw std::invalid_argument("simulate: T must be positive");
   if (!(cfg.dt > 0.0) || !(cfg.newton_tol > 0.0))
      throw std::invalid_argument("simulate: dt and newton_tol must be positive");
   stride = std::max<std::size_t>(stride, 1);
   Trajectory tr;
   tr.final_state = init;
   tr.min_v = init.v.min();
   if (observer)
      observer(init);
   EpsState& st = tr.final_state;
   const double t_end = init.t + T;
   while (st.t < t_end - 1e-12 * T) {
      double dt = cfg.dt;
      if (cfg.dt_guard)
         dt = std::min(dt, dt_guard_limit(st.law, st.v));
      dt = std::min(dt, t_end - st.t);
      StepStats stats;
      try {
         st = step(st, dt, cfg, mu, &stats);
      } catch (const ConstraintViolation& e) {
         throw ConstraintViolation(std::string("simulate: ") + e.what());
      } catch (const SolverError& e) {
         std::ostringstream msg;
         msg << "simulate: step from t = " << st.t << " failed: " << e.what();
         throw SolverError(msg.str());
      }
      ++tr.steps;
      tr.min_v = std::min(tr.min_v, st.v.min());
      tr.max_newton = std::max(tr.max_newton, stats.newton_iterations);
      if (!st.v.all_finite() || !st.w.all_finite())
         throw SolverError("simulate: non-finite state at t = " + std::to_string(st.t));
      const bool last = !(st.t < t_end - 1e-12 * T);
      if (observer && (tr.steps % stride == 0 || last))
         observer(st);
   }
   return tr;
}

double sup_dev_v(const EpsState& state, const EpsProfile& profile)
{
   const Grid1D& g = state.grid();
   const double shift = profile.speed() * state.t;
   double m = 0.0;
   for (std::size_t i = 0; i < g.size(); ++i)
      m = std::max(m, std::abs(state.v[i] - profile.v_interp(g.x(i) - shift)));
   return m;
}

double sup_dev_u(const EpsState& state, const EpsProfile& profile)
{
   const Grid1D& g = state.grid();
   const double shift = profile.speed() * state.t;
   const GridFunction u = state.u(profile.end_states().mu);
   double m = 0.0;
   for (std::size_t i = 0; i < g.size(); ++i)
      m = std::max(m, std::abs(u[i] - profile.eval_interp(g.x(i) - shift).u));
   return m;
}

} // namespace fcns
