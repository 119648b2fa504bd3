#include "defba/horizon.hpp"

#include <cmath>
#include <stdexcept>

namespace defba {

double integral_balanced(double t, double mu_bal, double b_init) {
  if (mu_bal == 0.0) return b_init * t;
  return b_init * std::expm1(mu_bal * t) / mu_bal;
}

double integral_linear(double t, double lambda_r, double b_init) {
  return 0.5 * lambda_r * b_init * t * t + b_init * t;
}

std::optional<double> prediction_horizon(double lambda_r, double mu_bal, double b_init,
                                         double eps_root) {
  (void)b_init;  // cancels out of the root equation
  if (lambda_r < 0.0 || mu_bal < 0.0)
    throw std::invalid_argument("prediction_horizon: rates must be nonnegative");
  if (lambda_r <= mu_bal) return std::nullopt;

  const auto gap = [&](double t) {
    return integral_linear(t, lambda_r, 1.0) - integral_balanced(t, mu_bal, 1.0);
  };
  // gap > 0 on (0, t_p), < 0 beyond; expand the upper bracket geometrically
  double hi = 1.0;
  while (gap(hi) > 0.0) {
    hi *= 2.0;
    if (hi > 1e6)
      throw BracketFailure("prediction_horizon: no sign change below 1e6 h (rates "
                           "lambda_r=" + std::to_string(lambda_r) +
                           ", mu_bal=" + std::to_string(mu_bal) + ")");
  }
  double lo = 0.0;
  while (hi - lo > eps_root) {
    const double mid = 0.5 * (lo + hi);
    if (gap(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double iteration_time(double t_p, double lambda_r, double mu_bal, double safety_factor) {
  if (!(safety_factor > 0.0 && safety_factor < 1.0))
    throw std::invalid_argument("iteration_time: safety_factor must lie in (0,1)");
  if (!(lambda_r > mu_bal) || !(mu_bal > 0.0))
    throw std::invalid_argument("iteration_time: requires lambda_r > mu_bal > 0");
  if (!(t_p > 0.0)) throw std::invalid_argument("iteration_time: t_p must be > 0");
  const double bound = t_p - 2.0 * (1.0 / mu_bal - 1.0 / lambda_r);
  if (bound <= 0.0)
    throw NonpositiveBound("iteration_time: t_p=" + std::to_string(t_p) +
                           " leaves no room for an exponential-only slice (bound=" +
                           std::to_string(bound) + ")");
  return safety_factor * bound;
}

double GrowthCurve::value(double t) const {
  if (kind == Kind::linear_then_exponential) {
    if (t <= t_s) return b_init * (lambda_r * t + 1.0);
    return b_init * (lambda_r * t_s + std::exp(mu_bal * (t - t_s)));
  }
  if (t <= t_s) return b_init * std::exp(mu_bal * t);
  return b_init * std::exp(mu_bal * t_s) * (lambda_r * (t - t_s) + 1.0);
}

double GrowthCurve::integral(double t_end) const {
  const auto exp_part = [&](double span) {
    return mu_bal == 0.0 ? span : std::expm1(mu_bal * span) / mu_bal;
  };
  if (kind == Kind::linear_then_exponential) {
    if (t_end <= t_s) return integral_linear(t_end, lambda_r, b_init);
    return integral_linear(t_s, lambda_r, b_init) +
           b_init * (lambda_r * t_s * (t_end - t_s) + exp_part(t_end - t_s));
  }
  if (t_end <= t_s) return b_init * exp_part(t_end);
  const double at_switch = b_init * std::exp(mu_bal * t_s);
  return b_init * exp_part(t_s) +
         at_switch * (0.5 * lambda_r * (t_end - t_s) * (t_end - t_s) + (t_end - t_s));
}

namespace {

double grid_argmax(GrowthCurve::Kind kind, double lambda_r, double mu_bal, double t_p,
                   int grid_n) {
  if (!(lambda_r > mu_bal))
    throw std::invalid_argument("theorem check requires lambda_r > mu_bal");
  if (!(t_p > 0.0) || grid_n < 2)
    throw std::invalid_argument("theorem check requires t_p > 0 and grid_n >= 2");
  double best = -kInf, arg = 0.0;
  for (int i = 0; i < grid_n; ++i) {
    const double ts = t_p * static_cast<double>(i) / (grid_n - 1);
    GrowthCurve curve{kind, ts, 1.0, lambda_r, mu_bal};
    const double j = curve.integral(t_p);
    if (j > best) {
      best = j;
      arg = ts;
    }
  }
  return arg;
}

} // namespace

double verify_theorem1(double lambda_r, double mu_bal, double t_p, int grid_n) {
  return grid_argmax(GrowthCurve::Kind::linear_then_exponential, lambda_r, mu_bal, t_p, grid_n);
}

double verify_theorem2(double lambda_r, double mu_bal, double t_p, int grid_n) {
  return grid_argmax(GrowthCurve::Kind::exponential_then_linear, lambda_r, mu_bal, t_p, grid_n);
}

std::vector<GrowthWindow> classify_growth(const Trajectory& traj, double window) {
  if (window <= 0.0) throw std::invalid_argument("classify_growth: window must be > 0");
  if (traj.num_points() < 3) throw TooFewPoints("classify_growth: need at least 3 grid points");

  const double t0 = traj.times.front(), tN = traj.times.back();
  const int n_windows = std::max(1, static_cast<int>(std::ceil((tN - t0) / window - 1e-9)));

  std::vector<GrowthWindow> out;
  for (int wi = 0; wi < n_windows; ++wi) {
    const double begin = t0 + wi * window;
    const double end = std::min(t0 + (wi + 1) * window, tN);
    std::vector<int> idx;
    for (int k = 0; k < traj.num_points(); ++k)
      if (traj.times[k] >= begin - 1e-9 && traj.times[k] <= end + 1e-9) idx.push_back(k);
    if (idx.size() < 3)
      throw TooFewPoints("classify_growth: window [" + std::to_string(begin) + ", " +
                         std::to_string(end) + "] holds fewer than 3 grid points");

    const int k = static_cast<int>(idx.size());
    Eigen::VectorXd t(k), bo(k);
    for (int i = 0; i < k; ++i) {
      t[i] = traj.times[idx[i]];
      bo[i] = traj.B_o[idx[i]];
    }

    GrowthWindow gw{begin, end, GrowthLabel::stagnant};
    const double lo = bo.minCoeff(), hi = bo.maxCoeff();
    if ((hi - lo) <= 1e-6 * std::max(std::abs(hi), 1e-300)) {
      out.push_back(gw);
      continue;
    }

    // affine fit on B_o and log-linear fit on log B_o; both judged by their
    // relative RMS error in the original space
    Eigen::MatrixXd design(k, 2);
    design.col(0).setOnes();
    design.col(1) = t.array() - t.mean();
    const Eigen::Vector2d ab = design.colPivHouseholderQr().solve(bo);
    const double rms_lin = (design * ab - bo).norm() / std::sqrt(double(k));

    double rms_exp = kInf;
    if (bo.minCoeff() > 0.0) {
      const Eigen::VectorXd logb = bo.array().log();
      const Eigen::Vector2d ce = design.colPivHouseholderQr().solve(logb);
      const Eigen::VectorXd fit = (design * ce).array().exp();
      rms_exp = (fit - bo).norm() / std::sqrt(double(k));
    }

    gw.label = rms_exp < rms_lin ? GrowthLabel::exponential : GrowthLabel::linear;
    out.push_back(gw);
  }
  return out;
}

HorizonDiagnostics compute_horizon(const MetabolicModel& model, const SystemState& state,
                                   double safety_factor, double fallback_tp,
                                   const SolverBackend& solver) {
  HorizonDiagnostics d;
  d.safety_factor = safety_factor;
  d.b_init = objective_biomass(model, state);
  const LinearBound lin = max_linear_rate(model, d.b_init, solver);
  const BalancedRate bal = max_balanced_rate(model, state, solver);
  d.lambda_s = lin.lambda_s;
  d.lambda_r = lin.lambda_r;
  d.mu_bal = bal.mu_bal;
  d.t_p_root = prediction_horizon(d.lambda_r, d.mu_bal);
  if (d.t_p_root) {
    d.t_p = *d.t_p_root;
    d.t_c = iteration_time(d.t_p, d.lambda_r, d.mu_bal, safety_factor);
  } else {
    // no linear incentive: any horizon works; default to about one tripling
    d.t_p = fallback_tp > 0.0 ? fallback_tp : (d.mu_bal > 0.0 ? 3.0 / d.mu_bal : 1.0);
    d.t_c = safety_factor * d.t_p;
  }
  return d;
}

} // namespace defba
