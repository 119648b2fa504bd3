#include "defba/defba.hpp"

#include <cstdio>
#include <stdexcept>

namespace defba {

Trajectory solve_defba(const MetabolicModel& model, const SystemState& state0, double t_end,
                       double d, const SolverBackend& solver) {
  if (!(t_end > 0.0)) throw std::invalid_argument("solve_defba: t_end must be > 0");
  if (!(d > 0.0 && d <= t_end))
    throw std::invalid_argument("solve_defba: d must lie in (0, t_end]");

  const DiscretizationGrid grid =
      DiscretizationGrid::uniform(state0.time, state0.time + t_end, d);
  const DynamicLP dlp = discretize(model, state0, grid);
  const LpSolution sol = solver.solve(dlp.lp);
  if (sol.status == LpStatus::infeasible)
    throw Infeasible("solve_defba: problem infeasible from the given initial state");
  if (sol.status == LpStatus::unbounded)
    throw Unbounded("solve_defba: unbounded objective (growth without enzyme cost)");

  Trajectory traj = extract_trajectory(dlp, sol);
  const double lo = traj.B_o.minCoeff(), hi = traj.B_o.maxCoeff();
  if (lo > 0.0 && hi / lo > 1e4)
    std::fprintf(stderr,
                 "note: objective biomass spans %.1f orders of magnitude over the horizon; "
                 "consider receding-horizon slicing for better conditioning\n",
                 std::log10(hi / lo));
  return traj;
}

} // namespace defba
