#pragma once

#include <optional>
#include <vector>

#include "defba/static_rates.hpp"
#include "defba/trajectory.hpp"

namespace defba {

/// Integral of the balanced biomass curve B_init*e^(mu*t) from 0 to t,
/// i.e. B_init*(e^(mu*t)-1)/mu, with the mu=0 limit B_init*t.
double integral_balanced(double t, double mu_bal, double b_init);

/// Integral of the linear biomass curve B_init*(1+lambda_r*t) from 0 to t.
double integral_linear(double t, double lambda_r, double b_init);

/// Prediction horizon: the unique positive time at which the balanced-growth
/// integral catches up with the best linear one. Returns nullopt when
/// lambda_r <= mu_bal (no linear incentive; the horizon may be chosen
/// freely). b_init cancels and must not affect the result. Throws
/// BracketFailure if no sign change is found below 1e6 h.
std::optional<double> prediction_horizon(double lambda_r, double mu_bal, double b_init = 1.0,
                                         double eps_root = 1e-10);

/// Iteration time: safety_factor times the strict bound
/// t_p - 2*(1/mu_bal - 1/lambda_r). Requires lambda_r > mu_bal > 0 and
/// safety_factor in (0,1); throws NonpositiveBound when the bound interval
/// is empty.
double iteration_time(double t_p, double lambda_r, double mu_bal, double safety_factor = 0.9);

/// Piecewise biomass curve switching between a linear and a balanced phase
/// at t_s, with closed-form integral. Both kinds are continuous at t_s.
struct GrowthCurve {
  enum class Kind { linear_then_exponential, exponential_then_linear };
  Kind kind = Kind::linear_then_exponential;
  double t_s = 0.0;
  double b_init = 1.0;
  double lambda_r = 0.0;
  double mu_bal = 0.0;

  double value(double t) const;
  double integral(double t_end) const;
};

/// Maximizes the integral of the linear-then-exponential curve over a
/// uniform t_s grid on [0, t_p]; the maximizer is expected at t_p.
double verify_theorem1(double lambda_r, double mu_bal, double t_p, int grid_n);

/// Same for the exponential-then-linear curve; the maximizer is expected at
/// t_p - 2*(1/mu_bal - 1/lambda_r) when that is positive.
double verify_theorem2(double lambda_r, double mu_bal, double t_p, int grid_n);

enum class GrowthLabel { linear, exponential, stagnant };

struct GrowthWindow {
  double t_begin = 0.0;
  double t_end = 0.0;
  GrowthLabel label = GrowthLabel::stagnant;
};

/// Splits the trajectory into windows of the given width and labels each by
/// whether an affine or an exponential fit of B_o explains it better
/// (relative variation below 1e-6 means stagnant). Throws TooFewPoints if a
/// window holds fewer than 3 grid points.
std::vector<GrowthWindow> classify_growth(const Trajectory& traj, double window);

/// Everything the receding-horizon loop needs to pick its window: the two
/// static rates at the given state, the horizon t_p (root of the integral
/// comparison, or the fallback when there is no linear incentive) and the
/// iteration time t_c.
struct HorizonDiagnostics {
  double lambda_s = 0.0;
  double lambda_r = 0.0;
  double mu_bal = 0.0;
  double b_init = 0.0;
  std::optional<double> t_p_root;  // empty = no linear incentive
  double t_p = 0.0;                // horizon actually used
  double t_c = 0.0;
  double safety_factor = 0.9;
};

/// Runs max_linear_rate (at the state's b-weighted biomass) and
/// max_balanced_rate, then derives t_p and t_c. fallback_tp <= 0 selects the
/// default fallback 3/mu_bal for the no-linear-incentive case.
HorizonDiagnostics compute_horizon(const MetabolicModel& model, const SystemState& state,
                                   double safety_factor = 0.9, double fallback_tp = 0.0,
                                   const SolverBackend& solver = default_solver());

} // namespace defba
