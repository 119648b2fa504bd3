#include "defba/sdefba.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace defba {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void validate_config(const MetabolicModel& model, const SdefbaConfig& cfg) {
  if (!(cfg.t_end > 0.0) || !(cfg.d > 0.0))
    throw std::invalid_argument("sdefba: t_end and d must be > 0");
  const double steps = cfg.t_end / cfg.d;
  if (std::abs(steps - std::round(steps)) > 1e-9)
    throw std::invalid_argument("sdefba: t_end must be an integer multiple of d");
  if (!(cfg.safety_factor > 0.0 && cfg.safety_factor < 1.0))
    throw std::invalid_argument("sdefba: safety_factor must lie in (0,1)");
  if (!cfg.auto_horizon && !(cfg.fixed_tc > 0.0 && cfg.fixed_tc < cfg.fixed_tp))
    throw std::invalid_argument("sdefba: fixed mode requires 0 < t_c < t_p");
  for (const auto& [id, thr] : cfg.depletion_thresholds) {
    const int i = model.species_index(id);  // throws UnknownSpeciesRef
    if (model.species()[i].cls != SpeciesClass::external)
      throw ValidationError("sdefba: depletion threshold on non-external species '" + id + "'");
    if (thr < 0.0)
      throw std::invalid_argument("sdefba: depletion threshold for '" + id + "' must be >= 0");
  }
}
} // namespace

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::reached_t_end: return "reached_t_end";
    case StopReason::depletion: return "depletion";
    case StopReason::infeasible: return "infeasible";
  }
  return "?";
}

SdefbaRun run_sdefba(const MetabolicModel& model, const SystemState& state0,
                     const SdefbaConfig& cfg, const SolverBackend& solver) {
  validate_config(model, cfg);

  SdefbaRun run;
  SystemState state = state0;
  const int total_steps = static_cast<int>(std::round(cfg.t_end / cfg.d));
  int steps_done = 0;

  // stitched trajectory, grown slice by slice
  Trajectory& st = run.trajectory;
  st.times = {state0.time};
  st.Y.resize(1, model.n_y());
  st.C.resize(1, model.n_c());
  st.P.resize(1, model.n_p());
  st.Y.row(0) = state0.Y.transpose();
  st.C.row(0) = state0.C.transpose();
  st.P.row(0) = state0.P.transpose();
  st.fluxes.resize(0, model.m());

  HorizonDiagnostics frozen;
  bool have_frozen = false;

  while (true) {
    double t_p, t_c, lambda_r = kNaN, mu_bal = kNaN;
    if (cfg.auto_horizon) {
      if (cfg.recalc_each_iteration || !have_frozen) {
        try {
          frozen = compute_horizon(model, state, cfg.safety_factor, cfg.fallback_tp, solver);
        } catch (const NonpositiveBound& e) {
          throw NonpositiveBound(std::string(e.what()) + " [at t_k=" + std::to_string(state.time) +
                                 "; enlarge fallback_tp or switch to fixed horizons]");
        }
        have_frozen = true;
      }
      t_p = frozen.t_p;
      t_c = frozen.t_c;
      lambda_r = frozen.lambda_r;
      mu_bal = frozen.mu_bal;
    } else {
      t_p = cfg.fixed_tp;
      t_c = cfg.fixed_tc;
    }

    if (t_p < cfg.d)
      throw std::invalid_argument("sdefba: horizon t_p=" + std::to_string(t_p) +
                                  " is shorter than the step d=" + std::to_string(cfg.d) +
                                  "; reduce d");

    // kept length is rounded down to the grid, at least one step; t_c < t_p
    // keeps every kept interval at full length d
    const DiscretizationGrid grid = DiscretizationGrid::uniform(state.time, state.time + t_p, cfg.d);
    int keep = std::max(1, static_cast<int>(std::floor(t_c / cfg.d + 1e-9)));
    keep = std::min(keep, total_steps - steps_done);
    keep = std::min(keep, grid.num_intervals());

    const DynamicLP dlp = discretize(model, state, grid);
    const LpSolution sol = solver.solve(dlp.lp);
    if (sol.status == LpStatus::unbounded)
      throw Unbounded("sdefba: unbounded horizon problem (growth without enzyme cost)");
    if (sol.status == LpStatus::infeasible) {
      run.stop_reason = StopReason::infeasible;
      run.diagnostic = "iteration starting at t_k=" + std::to_string(state.time) + " is infeasible";
      break;
    }
    const Trajectory slice = extract_trajectory(dlp, sol);

    run.iterations.push_back(
        IterationRecord{state.time, t_p, keep * cfg.d, lambda_r, mu_bal, sol.objective_value});

    // append the kept part; the junction point is shared
    const int base = st.num_points();
    st.times.resize(base + keep);
    st.Y.conservativeResize(base + keep, Eigen::NoChange);
    st.C.conservativeResize(base + keep, Eigen::NoChange);
    st.P.conservativeResize(base + keep, Eigen::NoChange);
    st.fluxes.conservativeResize(st.fluxes.rows() + keep, Eigen::NoChange);
    for (int i = 1; i <= keep; ++i) {
      st.times[base + i - 1] = slice.times[i];
      st.Y.row(base + i - 1) = slice.Y.row(i);
      st.C.row(base + i - 1) = slice.C.row(i);
      st.P.row(base + i - 1) = slice.P.row(i);
    }
    for (int i = 0; i < keep; ++i)
      st.fluxes.row(st.fluxes.rows() - keep + i) = slice.fluxes.row(i);

    state = slice.state_at(keep);  // exact copy re-anchors the next iteration
    steps_done += keep;

    bool depleted = false;
    for (const auto& [id, thr] : cfg.depletion_thresholds) {
      const int local = model.local_index(model.species_index(id));
      if (state.Y[local] <= thr + 1e-9) { depleted = true; break; }
    }
    if (depleted) {
      run.stop_reason = StopReason::depletion;
      break;
    }
    if (steps_done >= total_steps) {
      run.stop_reason = StopReason::reached_t_end;
      break;
    }
  }

  // biomass curves and the stitched objective
  const int np = st.num_points();
  st.B.resize(np);
  st.B_o.resize(np);
  for (int k = 0; k < np; ++k) {
    st.B[k] = model.w_c().dot(st.C.row(k)) + model.w_p().dot(st.P.row(k));
    st.B_o[k] = model.b_c().dot(st.C.row(k)) + model.b_p().dot(st.P.row(k));
  }
  double obj = 0.0;
  for (int k = 0; k + 1 < np; ++k)
    obj += 0.5 * (st.times[k + 1] - st.times[k]) * (st.B_o[k] + st.B_o[k + 1]);
  st.objective_value = obj;
  return run;
}

} // namespace defba
