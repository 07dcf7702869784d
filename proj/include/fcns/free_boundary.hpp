#pragma once

#include <string>
#include <vector>

#include "fcns/grid.hpp"
#include "fcns/profiles.hpp"

namespace fcns {

// Initial data on the free side [0, X] of a partially congested state.
struct HalfLineData
{
   Grid1D grid;
   GridFunction v0;
   GridFunction u0;
   EndStates end_states;

   double mu() const { return end_states.mu; }
};

// Limit traveling wave sampled on [0, X] with n nodes.
HalfLineData traveling_wave_data(const EndStates& es, double X, std::size_t n);

// Adds a C-infinity compactly supported bump a_v b(x), a_u b(x) with
// b(x) = exp(1 - 1/(1 - r^2)), r = (x - center)/radius; traces at 0 untouched
// when center - radius > 0.
HalfLineData perturb_data(HalfLineData data, double amp_v, double amp_u, double center,
                          double radius);

struct HypothesisTolerances
{
   double trace_tol = 1e-10;
   // |h3| <= h3_tol * scale, scale = max(1, largest term of the bracket).
   double h3_tol = 1e-6;
};

struct HypothesisReport
{
   bool h1_ok = false;
   double v_trace = 0.0;
   double u_trace = 0.0;
   bool h2_ok = false;
   double h2_norm_v = 0.0; // discrete H^3 norm of v0 - v_plus
   double h2_norm_u = 0.0; // discrete H^3 norm of u0 - u_plus
   double h3_residual = 0.0;
   double h3_scale = 0.0;
   bool h3_ok = false;
   bool h4_ok = false;
   double dv0 = 0.0; // d_x v0(0+)
   double du0 = 0.0; // d_x u0(0+)
   double min_v_interior = 0.0;

   bool all_ok() const { return h1_ok && h2_ok && h3_ok && h4_ok; }
};

// Traces by fourth-order one-sided stencils. h3_residual is the bracket
// -(u')^2/v' - mu v' u' + mu v'' at 0+. H4 asks v' > 0, u' < 0 (so that the
// interface speed -u'/v' is positive) and v0 > 1 on x > 0.
// Throws DomainError when d_x v0(0+) = 0.
HypothesisReport validate_hypotheses(const HalfLineData& data, const HypothesisTolerances& tol = {});

// w0 = u0 - mu d_x ln v0 on [0, X]; frozen at u_minus - mu d_x v0(0+) for x < 0
// and at u_plus beyond X (if the data reached it within far_field_tol).
class EffectiveVelocity
{
public:
   EffectiveVelocity() = default;
   EffectiveVelocity(const HalfLineData& data, double far_field_tol);

   double operator()(double x) const;
   double dx(double x) const;
   double left_value() const { return left_; }
   const GridFunction& samples() const { return w_; }
   // Evaluation at x < 0 throws MonotonicityViolation when strict is set.
   bool strict = true;

private:
   GridFunction w_;
   GridFunction dw_;
   double left_ = 0.0;
   double far_ = 0.0;
};

EffectiveVelocity w0_build(const HalfLineData& data, double far_field_tol = 1e-6);

struct FBConfig
{
   double T = 0.5;
   double dt = 1e-3;
   double T_min = 0.5 / 16.0;
   double picard_tol = 1e-8;
   int picard_max = 10;
   int time_order = 2; // 1: backward Euler, 2: BDF2 with a backward Euler start
   double newton_tol = 1e-12;
   int newton_max = 30;
   double denom_floor_rel = 1e-6; // times |u_minus - u_plus|
   double far_field_tol = 1e-6;
   double damping_fallback = 0.5;

   void validate() const;
};

struct InterfacePath
{
   std::vector<double> times;
   std::vector<double> x_tilde;
   std::vector<double> x_tilde_prime;

   std::size_t size() const { return times.size(); }
   double at(double t) const;
   double prime_at(double t) const;
   // sqrt(int x^2 + x'^2 + x''^2) with x'' by differencing x'.
   double h2_norm() const;
};

// Straight path y(t) = slope t on the uniform time grid of cfg.
InterfacePath linear_path(double slope, double T, double dt);

// v on every time level, solving
// d_t v - y' d_x v - mu d_xx ln v = d_x w0(x + y(t)), v(t,0) = 1, v(t,X) = v_plus.
std::vector<GridFunction> v_step(const InterfacePath& y, const HalfLineData& data,
                                 const EffectiveVelocity& w0, const FBConfig& cfg);
// Same with the source switched off.
std::vector<GridFunction> v_step_unforced(const InterfacePath& y, const HalfLineData& data,
                                          const FBConfig& cfg);
// u on every time level: d_t u - y' d_x u - mu d_x(d_x u / v) = 0,
// u(t,0) = u_minus, u(t,X) = u_plus.
std::vector<GridFunction> u_step(const InterfacePath& y, const std::vector<GridFunction>& v,
                                 const HalfLineData& data, const FBConfig& cfg);
// z(t) = -mu int_0^t d_x u(tau,0) / (u_minus - w0(y(tau))) dtau by trapezoid;
// z' is the integrand. Throws SolverError on a near-singular denominator.
InterfacePath interface_update(const std::vector<GridFunction>& u, const InterfacePath& y,
                               const EffectiveVelocity& w0, const HalfLineData& data,
                               const FBConfig& cfg);

struct FBState
{
   double t = 0.0;
   GridFunction v_s;
   GridFunction u_s;
   GridFunction w_s;
   double p_s = 0.0;
};

enum class FBStatus
{
   converged,
   converged_reduced_T,
   failed_monotonicity,
   failed_contraction
};

std::string to_string(FBStatus status);

struct FBSolution
{
   FBStatus status = FBStatus::failed_contraction;
   std::string message;
   double T = 0.0;
   int iterations = 0;
   std::vector<double> increments; // Picard metric per iteration (last attempt)
   InterfacePath path;
   std::vector<FBState> states;
   HalfLineData data;
   EffectiveVelocity w0;
   FBConfig cfg;

   bool ok() const { return status == FBStatus::converged || status == FBStatus::converged_reduced_T; }
};

// Picard iteration on y -> interface_update(u_step(v_step(y))), starting from
// y(t) = x'(0) t. Stops when max|dy| + max|dy'| < picard_tol; halves T after
// picard_max iterations down to T_min.
FBSolution picard_solve(const HalfLineData& data, const FBConfig& cfg);

struct IdentityReport
{
   std::vector<double> times;
   std::vector<double> res_transport; // sup_x |w_s - w0(x + x~)|
   std::vector<double> res_edo1;      // |u_minus - mu d_x v_s(0+) - w0(x~)|
   std::vector<double> res_bcw;
   std::vector<double> res_edo2;      // |x~' d_x v_s(0+) + d_x u_s(0+)|
   std::vector<double> p_s;
   std::vector<double> p_s_trace;     // -mu d_x u_s(0+)

   double max_transport = 0.0;
   double max_edo1 = 0.0;
   double max_bcw = 0.0;
   double max_edo2 = 0.0;
   double max_p_s_mismatch = 0.0;
   double min_p_s = 0.0;
   double min_v_interior = 0.0;
   bool complementarity_ok = false;
};

IdentityReport identity_checks(const FBSolution& sol);

// Applies the map once more to the converged path; returns max|dy| + max|dy'|.
double fixed_point_residual(const FBSolution& sol);

struct FullLineValues
{
   double v;
   double u;
   double p;
};

// Fields in the original frame, congested for x < x~(t); linear in time
// between solver levels.
FullLineValues unshift(const FBSolution& sol, double t, double x);

} // namespace fcns
