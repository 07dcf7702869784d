#pragma once

#include <array>
#include <string>

#include "fcns/grid.hpp"
#include "fcns/ns_eps_solver.hpp"
#include "fcns/profiles.hpp"

namespace fcns {

struct EnergyConstants
{
   double delta0 = 0.1;
   double c = 0.1;
   // Zero-mass tolerance relative to the L1 norm of the deviation. A round-off
   // floor of 64 machine epsilons times the L1 norm of the field is added.
   double mass_tol = 1e-8;

   void validate() const;
};

// Antiderivatives of v - v_ref and w - w_ref from x_left. Vx and Wx keep the
// nodal deviations themselves when known; otherwise they are empty and
// derivatives are taken by diff1.
struct IntegratedState
{
   double t = 0.0;
   GridFunction V;
   GridFunction W;
   GridFunction Vx;
   GridFunction Wx;

   GridFunction dV() const;
   GridFunction dW() const;
};

// Reference is the profile shifted by s t. Throws ConstraintViolation naming
// the field when a deviation carries mass above tolerance, after removing the
// quadrature defect of the sampled reference.
IntegratedState integrated_vars(const EpsState& state, const EpsProfile& profile,
                                const EnergyConstants& constants = {});
// Reference is another solver state on the same grid (e.g. an unperturbed run).
IntegratedState integrated_vars(const EpsState& state, const EpsState& reference,
                                const EnergyConstants& constants = {});
// Direct construction from deviations; v_l1, w_l1 set the round-off floor and
// the offsets are subtracted from the residual masses before the check.
IntegratedState integrate_deviation(double t, const GridFunction& dv, const GridFunction& dw,
                                    const EnergyConstants& constants = {}, double v_l1 = 0.0,
                                    double w_l1 = 0.0, double v_offset = 0.0,
                                    double w_offset = 0.0);

struct EnergyReport
{
   std::array<double, 3> E{};
   std::array<double, 3> D{};
   double x_norm_sq = 0.0;
};

// E_k and D_k with weights -p'(v_eps) and v_eps' taken at x - s t.
// x_norm_sq is left at zero; see XNormTracker.
EnergyReport energy_report(const IntegratedState& ist, const EpsProfile& profile,
                           const EnergyConstants& constants = {});

// Running sup over recorded times of sum_k c^k eps^(2k/gamma) (E_k + int_0^t D_k),
// with the time integral by trapezoid over the recorded samples.
class XNormTracker
{
public:
   XNormTracker(const EnergyConstants& constants, const PressureLaw& law);

   // Records a report at time t (increasing) and fills its x_norm_sq.
   void add(double t, EnergyReport& report);
   double value() const { return sup_; }
   // sum_k c^k eps^(2k/gamma) (E_k + int D_k) at the last recorded time.
   double current() const { return current_; }
   const std::array<double, 3>& integrated_dissipation() const { return int_d_; }
   double weight(int k) const { return weights_[static_cast<std::size_t>(k)]; }

private:
   std::array<double, 3> weights_{};
   std::array<double, 3> int_d_{};
   std::array<double, 3> last_d_{};
   double last_t_ = 0.0;
   bool started_ = false;
   double sup_ = 0.0;
   double current_ = 0.0;
};

struct SmallnessResult
{
   bool pass = false;
   double lhs = 0.0;
   double rhs = 0.0;
   double delta0 = 0.0;
   double c = 0.0;
   double epsilon = 0.0;
   double gamma = 0.0;

   std::string to_json() const;
};

// lhs = sum_{k<=2} eps^(2k/gamma) E_k(0), rhs = delta0^2 eps^(5/gamma).
SmallnessResult smallness_check(const IntegratedState& ist0, const EpsProfile& profile,
                                const EnergyConstants& constants = {});

struct LinearizationResidual
{
   double r_v = 0.0; // L2 norm of the V component
   double r_w = 0.0; // L2 norm of the W component
};

// Residual of the linearized integrated system between two consecutive
// records a -> b, with dt/V by forward difference. The V component is taken at
// level b and the W component at level a. Throws DomainError when
// 1 + d_x V / v_eps <= 0.
LinearizationResidual linearization_residual(const IntegratedState& a, const IntegratedState& b,
                                             const EpsProfile& profile);
// Same with V, W supplied explicitly (used with manufactured pairs).
GridFunction linearization_residual_v(const IntegratedState& a, const IntegratedState& b,
                                      const EpsProfile& profile);
GridFunction linearization_residual_w(const IntegratedState& a, const IntegratedState& b,
                                      const EpsProfile& profile);

struct L1Deviation
{
   double v = 0.0;
   double u = 0.0;
   double w = 0.0;
};

L1Deviation l1_diagnostics(const EpsState& state, const EpsProfile& profile);
L1Deviation l1_diagnostics(const EpsState& state, const EpsState& reference, double mu);

// Linear part of the integrated system with the quadratic remainders dropped:
// V_t = W_x + mu (V_x / v_eps)_x, W_t = -p'(v_eps) V_x, zero Dirichlet data.
// Same splitting as the nonlinear solver (explicit W, implicit V).
IntegratedState linearized_step(const IntegratedState& ist, double dt,
                                const EpsProfile& profile);

// Discrete analogue of the k = 0 energy balance:
// E0(t) + 2 mu int int V_x^2 / v_eps + s int int (p''/p'^2) v_eps' W^2.
class LinearEnergyBalance
{
public:
   explicit LinearEnergyBalance(const EpsProfile& profile) : profile_(&profile) {}
   // Records a state; returns the balance left-hand side at this time.
   double add(const IntegratedState& ist);
   double initial() const { return e0_initial_; }

private:
   double dissipation_rate(const IntegratedState& ist) const;

   const EpsProfile* profile_;
   bool started_ = false;
   double e0_initial_ = 0.0;
   double acc_ = 0.0;
   double last_t_ = 0.0;
   double last_rate_ = 0.0;
};

} // namespace fcns
