#pragma once

#include "defba/lp.hpp"
#include "defba/model.hpp"
#include "defba/trajectory.hpp"

namespace defba {

/// Uniform time grid over [t0, tf]. The step count is ceil((tf-t0)/d) with
/// the last step shortened so the final point lands on tf exactly.
struct DiscretizationGrid {
  double t0 = 0.0;
  double tf = 0.0;
  double d = 0.0;
  std::vector<double> times;  // N+1 strictly increasing points

  static DiscretizationGrid uniform(double t0, double tf, double d);

  int num_intervals() const { return static_cast<int>(times.size()) - 1; }
  double step(int k) const { return times[k + 1] - times[k]; }
};

/// The transcribed dynamic problem: one LP plus the bidirectional map
/// between LP columns and (species, grid point) / (reaction, interval)
/// coordinates. States are ordered [Y | C | P] within each grid point;
/// metabolites carry no state columns (quasi-steady-state eliminates them).
struct DynamicLP {
  LinearProgram lp;
  DiscretizationGrid grid;
  MetabolicModel model;
  int n_dyn = 0;  // n_y + n_c + n_p

  DynamicLP(MetabolicModel m, DiscretizationGrid g)
      : grid(std::move(g)), model(std::move(m)),
        n_dyn(model.n_y() + model.n_c() + model.n_p()) {}

  int state_col(int k, int dyn_index) const { return k * n_dyn + dyn_index; }
  int y_col(int k, int local) const { return state_col(k, local); }
  int c_col(int k, int local) const { return state_col(k, model.n_y() + local); }
  int p_col(int k, int local) const { return state_col(k, model.n_y() + model.n_c() + local); }
  int flux_plus_col(int k, int j) const { return flux_base() + k * 2 * model.m() + j; }
  int flux_minus_col(int k, int j) const {
    return flux_base() + k * 2 * model.m() + model.m() + j;
  }

private:
  int flux_base() const { return (grid.num_intervals() + 1) * n_dyn; }
};

/// Transcribes the dynamic optimization over the grid into a single LP:
/// exact state recursion for piecewise-constant fluxes, quasi-steady-state
/// and capacity rows per interval (capacity against the interval's left
/// state), composition rows at every grid point, and the trapezoidal
/// integral of B_o as objective. Initial conditions enter as fixed bounds.
DynamicLP discretize(const MetabolicModel& model, const SystemState& state0,
                     const DiscretizationGrid& grid);

/// Maps an optimal solution back to named states and fluxes and recomputes
/// the biomass curves. Throws StatusNotOptimal unless sol is optimal.
Trajectory extract_trajectory(const DynamicLP& dlp, const LpSolution& sol);

} // namespace defba
