#pragma once

#include <cstddef>
#include <vector>

#include "fcns/energy.hpp"
#include "fcns/free_boundary.hpp"
#include "fcns/ns_eps_solver.hpp"
#include "fcns/profiles.hpp"

namespace fcns {

// Profile on recommended_span(law, es, tol) with n samples.
EpsProfile build_eps_profile(const PressureLaw& law, const EndStates& es, std::size_t n = 8001,
                             double tol = 1e-12);

// ----------------------------------------------------------------- stability

struct StabilityParams
{
   // amplitude == 0 selects the amplitude for which the smallness lhs equals
   // gate_fraction times the rhs.
   PerturbationSpec perturbation{PerturbationShape::dipole, 0.0, 1.0, 0.25, 0};
   double gate_fraction = 0.25;
   double h = 0.02;
   double dt = 0.0; // 0: h^2
   double T = 3.0;
   double record_dt = 0.1;
   double newton_tol = 1e-13;
   double far_field_tol = 1e-10;
   double left_margin = -1.0; // negative: acoustic default of simulation_grid
   bool dt_guard = true;
   EnergyConstants constants;
   // Acceptance thresholds.
   // Negative: time for the front (speed s_eps, at x = 0 when t = 0) to pass
   // center + 2 width. Ahead of the front the perturbation barely evolves.
   double transient = -1.0;
   double decay_ratio = 0.2;
   double x_norm_factor = 4.0;
};

struct StabilityRecord
{
   double t = 0.0;
   EnergyReport energy;
   L1Deviation l1;
   double sup_dev_v = 0.0;
   double sup_dev_u = 0.0;
   double min_v = 0.0;
};

struct StabilityResult
{
   double amplitude = 0.0;
   SmallnessResult gate;
   std::vector<StabilityRecord> records;
   std::size_t steps = 0;
   double min_v = 0.0; // over every node and step
   double decay = 0.0; // final / initial sup deviation of v
   double x_norm_ratio = 0.0;
   double transient = 0.0; // resolved
   bool monotone_ok = false;
   bool decay_ok = false;
   bool min_v_ok = false;
   bool x_norm_ok = false;

   bool pass() const { return gate.pass && monotone_ok && decay_ok && min_v_ok && x_norm_ok; }
};

// Perturbed run against an unperturbed run on the same grid; deviations,
// energies and the X-norm are measured between the two.
StabilityResult stability_experiment(const EpsProfile& profile, const StabilityParams& params);

// ------------------------------------------------------------- linearization

struct LinearizationParams
{
   PerturbationSpec perturbation{PerturbationShape::dipole, 1e-3, 1.0, 0.25, 0};
   double T = 0.5;
   double h0 = 0.02;
   double dt0 = 5e-5;
   int levels = 2; // h and dt halved per level
   double left_margin = 10.0;
   double newton_tol = 1e-12;
   int samples = 10; // consecutive-step pairs per run
};

struct LinearizationLevel
{
   double h = 0.0;
   double dt = 0.0;
   double r_v = 0.0; // max over sampled pairs
   double r_w = 0.0;
};

std::vector<LinearizationLevel> linearization_study(const EpsProfile& profile,
                                                    const LinearizationParams& params);

// ------------------------------------------------------------- free boundary

struct FBOracleLevel
{
   double h = 0.0;
   double dt = 0.0;
   FBStatus status = FBStatus::failed_contraction;
   int iterations = 0;
   double T = 0.0;
   double x_err = 0.0; // max |x~(t) - s t|
   double p_err = 0.0; // max |p_s(t) - p_minus|
   double min_v_interior = 0.0;
   IdentityReport identities;
};

// Traveling-wave data on [0, X] solved at (h0, dt0), (h0/2, dt0/2), ...
std::vector<FBOracleLevel> fb_oracle_study(const EndStates& es, double X, double h0, double dt0,
                                           int levels, const FBConfig& base = {});

} // namespace fcns
