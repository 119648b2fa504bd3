#pragma once

#include <map>
#include <string>
#include <vector>

#include "defba/defba.hpp"
#include "defba/horizon.hpp"

namespace defba {

/// Settings for the receding-horizon loop. In auto mode the horizon t_p and
/// iteration time t_c are derived from the current state each iteration
/// (set recalc_each_iteration=false to freeze the initial values for
/// ablation); in fixed mode they are supplied directly and must satisfy
/// 0 < t_c < t_p. t_end must be an integer multiple of d so kept slices
/// land on grid points.
struct SdefbaConfig {
  double t_end = 0.0;  // h
  double d = 0.0;      // h
  bool auto_horizon = true;
  double fixed_tp = 0.0;  // h, fixed mode only
  double fixed_tc = 0.0;  // h, fixed mode only
  double safety_factor = 0.9;
  bool recalc_each_iteration = true;
  std::map<std::string, double> depletion_thresholds;  // external species id -> mol
  double fallback_tp = 0.0;  // h; <= 0 selects 3/mu_bal when no linear incentive
};

enum class StopReason { reached_t_end, depletion, infeasible };

const char* to_string(StopReason r);

struct IterationRecord {
  double t_k = 0.0;              // slice start, h
  double t_p = 0.0;              // horizon used, h
  double t_c = 0.0;              // kept length, h (grid-aligned)
  double lambda_r = 0.0;         // NaN in fixed mode
  double mu_bal = 0.0;           // NaN in fixed mode
  double slice_objective = 0.0;  // optimum of this iteration's horizon problem
};

struct SdefbaRun {
  Trajectory trajectory;  // stitched over [start, t_stop]
  std::vector<IterationRecord> iterations;
  StopReason stop_reason = StopReason::reached_t_end;
  std::string diagnostic;  // set when stop_reason = infeasible
};

/// Iteratively solves the horizon problem on [t_k, t_k + t_p], keeps the
/// slice [t_k, t_k + t_c], re-anchors the next iteration on the kept
/// endpoint, and stops at t_end or when a watched external species falls to
/// its depletion threshold.
SdefbaRun run_sdefba(const MetabolicModel& model, const SystemState& state0,
                     const SdefbaConfig& config, const SolverBackend& solver = default_solver());

} // namespace defba
