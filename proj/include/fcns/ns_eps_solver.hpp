#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fcns/grid.hpp"
#include "fcns/pressure.hpp"
#include "fcns/profiles.hpp"

namespace fcns {

// Soft-congestion state in (v, w) form; u = w + mu d_x ln v is derived.
struct EpsState
{
   double t = 0.0;
   GridFunction v;
   GridFunction w;
   PressureLaw law;

   const Grid1D& grid() const { return v.grid(); }
   GridFunction u(double mu) const;
};

struct SolverConfig
{
   double dt = 1e-3;
   double newton_tol = 1e-10;
   int newton_max = 30;
   double v_floor = 1.0 + 1e-12;
   double far_field_tol = 1e-10;
   // Cap dt at 0.4 h / max(|p'| h, sqrt|p'|) in simulate().
   bool dt_guard = true;
};

enum class PerturbationShape
{
   bump,
   dipole
};

struct PerturbationSpec
{
   PerturbationShape shape = PerturbationShape::dipole;
   double amplitude = 0.0;
   double center = 3.0;
   double width = 0.5;
   std::uint64_t seed = 0; // nonzero: pseudo-random sign of the amplitude
};

// Support half-width of the truncated Gaussian building blocks, in widths.
inline constexpr double kPerturbationCutoff = 8.0;

// Zero-mass perturbation of v: dipole g' or Mexican hat -(sigma^2/2) g''
// with g = a exp(-(x-c)^2/sigma^2). Zero outside the cutoff.
double perturbation_dv(const PerturbationSpec& spec, double x);
// Signed amplitude after applying the seed.
double effective_amplitude(const PerturbationSpec& spec);

// Grid on which the shifted profile stays within far_field_tol of its end
// states up to time T. The congested side is extended by left_margin; a
// negative value selects 1.5 sqrt|p'(v_minus)| T + 10 sqrt(mu T), the
// distance covered by sound waves in the congested zone plus a viscous
// spreading length.
Grid1D simulation_grid(const EpsProfile& profile, double T, double h, double far_field_tol,
                       double left_margin = -1.0);

// v0 = v_eps + dv and u0 = u_eps, hence w0 = w_eps - mu d_x (ln v0 - ln v_eps).
// Throws DomainError naming the node when v0 <= 1.
EpsState build_initial(const EpsProfile& profile, const PerturbationSpec& spec, const Grid1D& grid);

// Largest dt allowed by the guard for the given v.
double dt_guard_limit(const PressureLaw& law, const GridFunction& v);

struct StepStats
{
   int newton_iterations = 0;
   double residual = 0.0;
};

// One step: explicit w update from p(v^n), then Newton on
// v - dt mu d_xx ln v = v^n + dt d_x w^{n+1}. End values stay frozen.
EpsState step(const EpsState& state, double dt, const SolverConfig& cfg, double mu,
              StepStats* stats = nullptr);

struct Trajectory
{
   EpsState final_state;
   std::size_t steps = 0;
   double min_v = 0.0;
   int max_newton = 0;
};

using Observer = std::function<void(const EpsState&)>;

// Steps up to T (last step clipped), calling the observer at t = 0, every
// `stride` steps and at T. Step failures are rethrown with the time stamp.
Trajectory simulate(const EpsState& init, double T, const SolverConfig& cfg, double mu,
                    const Observer& observer = {}, std::size_t stride = 1);

// max_i |v_i - v_eps(x_i - s t)| and the same for u.
double sup_dev_v(const EpsState& state, const EpsProfile& profile);
double sup_dev_u(const EpsState& state, const EpsProfile& profile);

} // namespace fcns
