#pragma once

#include <Eigen/Dense>

#include "defba/lp.hpp"
#include "defba/model.hpp"

namespace defba {

/// Strict upper bound on linear growth at a given biomass amount, together
/// with the optimizing flux/composition and the regularized rate
/// lambda_r = lambda_s / B_init.
struct LinearBound {
  double lambda_s = 0.0;  // g/h
  double lambda_r = 0.0;  // 1/h
  Eigen::VectorXd v_lin;  // net fluxes, mol/h
  Eigen::VectorXd C_lin;  // mol
  Eigen::VectorXd P_lin;  // mol
};

/// Best balanced (exponential) growth rate achievable at a fixed composition.
struct BalancedRate {
  double mu_bal = 0.0;    // 1/h
  Eigen::VectorXd v_bal;  // net fluxes, mol/h
};

/// Maximizes the linear biomass production rate over fluxes and composition
/// with the w-weighted biomass fixed to B_init. Nutrients are treated as
/// limitless: external species enter no constraint rows here.
/// Throws Infeasible or Unbounded on the corresponding solver outcome.
LinearBound max_linear_rate(const MetabolicModel& model, double b_init,
                            const SolverBackend& solver = default_solver());

/// Maximizes mu subject to mu*(C0;P0) = (S_C;S_P) v at the state's fixed
/// composition. Throws InfeasibleComposition if the state violates the
/// biomass composition constraint.
BalancedRate max_balanced_rate(const MetabolicModel& model, const SystemState& state0,
                               const SolverBackend& solver = default_solver());

} // namespace defba
