#include "fcns/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fcns {

EpsProfile build_eps_profile(const PressureLaw& law, const EndStates& es, std::size_t n, double tol)
{
   auto [l, r] = recommended_span(law, es, tol);
   EpsProfileOptions o;
   o.x_left = l;
   o.x_right = r;
   o.n = n;
   return eps_profile_solve(law, es, o);
}

// ----------------------------------------------------------------- stability

StabilityResult stability_experiment(const EpsProfile& profile, const StabilityParams& prm)
{
   prm.constants.validate();
   if (!(prm.h > 0.0) || !(prm.T > 0.0) || !(prm.record_dt > 0.0) || !(prm.gate_fraction > 0.0))
      throw std::invalid_argument("stability: h, T, record_dt and gate_fraction must be positive");
   const double mu = profile.end_states().mu;
   const EnergyConstants& ec = prm.constants;
   const Grid1D grid = simulation_grid(profile, prm.T, prm.h, prm.far_field_tol, prm.left_margin);
   const EpsState base = build_initial(profile, {}, grid);

   StabilityResult res;
   PerturbationSpec spec = prm.perturbation;
   if (spec.amplitude == 0.0) {
      PerturbationSpec probe = spec;
      probe.amplitude = 1e-3;
      const auto sm = smallness_check(integrated_vars(build_initial(profile, probe, grid), base, ec),
                                      profile, ec);
      spec.amplitude = probe.amplitude * std::sqrt(prm.gate_fraction * sm.rhs / sm.lhs);
   }
   res.amplitude = spec.amplitude;
   EpsState st = build_initial(profile, spec, grid);
   res.gate = smallness_check(integrated_vars(st, base, ec), profile, ec);

   SolverConfig cfg;
   cfg.dt = prm.dt > 0.0 ? prm.dt : prm.h * prm.h;
   cfg.newton_tol = prm.newton_tol;
   cfg.far_field_tol = prm.far_field_tol;
   cfg.dt_guard = prm.dt_guard;

   EpsState ref = base;
   XNormTracker xt(ec, profile.law());
   res.min_v = st.v.min();
   auto record = [&]() {
      StabilityRecord r;
      r.t = st.t;
      r.energy = energy_report(integrated_vars(st, ref, ec), profile, ec);
      xt.add(st.t, r.energy);
      r.l1 = l1_diagnostics(st, ref, mu);
      r.sup_dev_v = norm_sup(st.v - ref.v);
      r.sup_dev_u = norm_sup(st.u(mu) - ref.u(mu));
      r.min_v = st.v.min();
      res.records.push_back(r);
   };
   record();

   // Both runs advance in lockstep with the same step sizes, landing on the
   // record times exactly.
   const double tiny = 1e-12 * prm.T;
   std::size_t k = 1;
   auto next_record = [&]() { return std::min(prm.T, static_cast<double>(k) * prm.record_dt); };
   while (st.t < prm.T - tiny) {
      double dt = cfg.dt;
      if (cfg.dt_guard)
         dt = std::min({dt, dt_guard_limit(st.law, st.v), dt_guard_limit(ref.law, ref.v)});
      const double target = next_record();
      dt = std::min(dt, target - st.t);
      st = step(st, dt, cfg, mu);
      ref = step(ref, dt, cfg, mu);
      ++res.steps;
      res.min_v = std::min(res.min_v, st.v.min());
      if (st.t >= target - tiny) {
         st.t = ref.t = target;
         record();
         ++k;
      }
   }

   const auto& recs = res.records;
   const double first = recs.front().sup_dev_v;
   res.decay = recs.back().sup_dev_v / first;
   res.decay_ok = res.decay <= prm.decay_ratio;
   res.transient = prm.transient >= 0.0
                      ? prm.transient
                      : std::max(0.0, (spec.center + 2.0 * spec.width) / profile.speed());
   res.monotone_ok = true;
   for (std::size_t i = 1; i < recs.size(); ++i) {
      if (recs[i - 1].t >= res.transient - 1e-12 && recs[i].sup_dev_v > recs[i - 1].sup_dev_v)
         res.monotone_ok = false;
   }
   res.min_v_ok = res.min_v > 1.0;
   bool nondecreasing = true;
   for (std::size_t i = 1; i < recs.size(); ++i)
      nondecreasing = nondecreasing && recs[i].energy.x_norm_sq >= recs[i - 1].energy.x_norm_sq;
   res.x_norm_ratio = recs.back().energy.x_norm_sq / recs.front().energy.x_norm_sq;
   res.x_norm_ok = nondecreasing && res.x_norm_ratio <= prm.x_norm_factor;
   return res;
}

// ------------------------------------------------------------- linearization

std::vector<LinearizationLevel> linearization_study(const EpsProfile& profile,
                                                    const LinearizationParams& prm)
{
   if (prm.levels < 1 || prm.samples < 1)
      throw std::invalid_argument("linearization study: need levels >= 1 and samples >= 1");
   const double mu = profile.end_states().mu;
   // The check below is about the equations, not about mass leaving through
   // the truncated boundaries.
   EnergyConstants ec;
   ec.mass_tol = 1e-6;
   std::vector<LinearizationLevel> out;
   for (int lev = 0; lev < prm.levels; ++lev) {
      LinearizationLevel L;
      L.h = prm.h0 / static_cast<double>(1 << lev);
      L.dt = prm.dt0 / static_cast<double>(1 << lev);
      const Grid1D grid = simulation_grid(profile, prm.T, L.h, 1e-10, prm.left_margin);
      const EpsState s0 = build_initial(profile, prm.perturbation, grid);
      SolverConfig cfg;
      cfg.dt = L.dt;
      cfg.newton_tol = prm.newton_tol;
      const auto nsteps = static_cast<std::size_t>(std::lround(prm.T / L.dt));
      const std::size_t every = std::max<std::size_t>(nsteps / static_cast<std::size_t>(prm.samples), 1);
      std::size_t idx = 0;
      bool have = false;
      EpsState prev;
      simulate(s0, prm.T, cfg, mu, [&](const EpsState& s) {
         if (have) {
            const auto r = linearization_residual(integrated_vars(prev, profile, ec),
                                                  integrated_vars(s, profile, ec), profile);
            L.r_v = std::max(L.r_v, r.r_v);
            L.r_w = std::max(L.r_w, r.r_w);
         }
         have = idx % every == every - 1;
         ++idx;
         if (have)
            prev = s;
      });
      out.push_back(L);
   }
   return out;
}

// ------------------------------------------------------------- free boundary

std::vector<FBOracleLevel> fb_oracle_study(const EndStates& es, double X, double h0, double dt0,
                                           int levels, const FBConfig& base)
{
   const LimitProfile lp(es);
   std::vector<FBOracleLevel> out;
   for (int lev = 0; lev < levels; ++lev) {
      FBOracleLevel L;
      L.h = h0 / static_cast<double>(1 << lev);
      L.dt = dt0 / static_cast<double>(1 << lev);
      const auto n = static_cast<std::size_t>(std::lround(X / L.h)) + 1;
      FBConfig cfg = base;
      cfg.dt = L.dt;
      const FBSolution sol = picard_solve(traveling_wave_data(es, X, n), cfg);
      L.status = sol.status;
      L.iterations = sol.iterations;
      L.T = sol.T;
      if (sol.ok()) {
         for (std::size_t m = 0; m < sol.path.size(); ++m) {
            L.x_err = std::max(L.x_err, std::abs(sol.path.x_tilde[m] - lp.speed() * sol.path.times[m]));
            L.p_err = std::max(L.p_err, std::abs(sol.states[m].p_s - lp.p_minus()));
         }
         L.identities = identity_checks(sol);
         L.min_v_interior = L.identities.min_v_interior;
      } else {
         L.x_err = L.p_err = std::numeric_limits<double>::infinity();
      }
      out.push_back(L);
   }
   return out;
}

} // namespace fcns
