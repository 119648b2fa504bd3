#pragma once

#include "defba/collocation.hpp"

namespace defba {

/// Full-horizon solve: maximizes the integrated objective biomass over
/// [state0.time, state0.time + t_end] with step d and returns the optimal
/// trajectory. Throws Infeasible/Unbounded on the corresponding LP outcome.
Trajectory solve_defba(const MetabolicModel& model, const SystemState& state0, double t_end,
                       double d, const SolverBackend& solver = default_solver());

} // namespace defba
