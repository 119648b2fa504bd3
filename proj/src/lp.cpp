#include "defba/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace defba {

int LinearProgram::add_variable(double lo, double hi, double obj, std::string name) {
  const int n = num_vars();
  objective.conservativeResize(n + 1);
  lower.conservativeResize(n + 1);
  upper.conservativeResize(n + 1);
  objective[n] = obj;
  lower[n] = lo;
  upper[n] = hi;
  if (!name.empty() || !var_names.empty()) {
    var_names.resize(n + 1);
    var_names[n] = std::move(name);
  }
  return n;
}

void LinearProgram::add_row(Eigen::VectorXd coeffs, Relation rel, double rhs, std::string name) {
  rows.push_back(Row{std::move(coeffs), rel, rhs, std::move(name)});
}

void LinearProgram::set_bounds(int var, double lo, double hi) {
  lower[var] = lo;
  upper[var] = hi;
}

void LinearProgram::validate() const {
  const int n = num_vars();
  if (lower.size() != n || upper.size() != n)
    throw ValidationError("lp: bound vectors do not match variable count");
  for (int j = 0; j < n; ++j) {
    if (std::isnan(lower[j]) || std::isnan(upper[j]) || !std::isfinite(objective[j]))
      throw ValidationError("lp: non-finite objective or NaN bound");
  }
  for (size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].coeffs.size() != n)
      throw ValidationError("lp: row " + std::to_string(r) + " has wrong coefficient count");
    if (!rows[r].coeffs.allFinite() || !std::isfinite(rows[r].rhs))
      throw ValidationError("lp: row " + std::to_string(r) + " has non-finite data");
  }
}

namespace {

enum VarStat : int8_t { kAtLower = 0, kAtUpper = 1, kFreeAtZero = 2, kBasic = 3 };

struct Work {
  int n = 0;   // structural columns
  int ms = 0;  // rows
  int nt = 0;  // n + slacks + artificials
  Eigen::MatrixXd A;  // ms x nt, scaled
  Eigen::VectorXd b;  // scaled
  Eigen::VectorXd cost;
  Eigen::VectorXd lo, hi;
  Eigen::VectorXd val;  // nonbasic values (exact bounds / 0)
  std::vector<int8_t> stat;
  std::vector<int> basis;
  Eigen::MatrixXd Binv;
  Eigen::VectorXd xB;
  int pivots_since_refactor = 0;
};

void refactor(Work& w) {
  if (w.ms == 0) return;
  Eigen::MatrixXd B(w.ms, w.ms);
  for (int i = 0; i < w.ms; ++i) B.col(i) = w.A.col(w.basis[i]);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
  if (!lu.isInvertible()) throw NumericalFailure("simplex: singular basis during refactorization");
  w.Binv = lu.inverse();
  Eigen::VectorXd rhs = w.b;
  for (int j = 0; j < w.nt; ++j)
    if (w.stat[j] != kBasic && w.val[j] != 0.0) rhs -= w.A.col(j) * w.val[j];
  w.xB = w.Binv * rhs;
  w.pivots_since_refactor = 0;
}

enum class RunResult { optimal, unbounded };

RunResult run_simplex(Work& w, const SolverOptions& opts, bool phase1, int& iters,
                      int max_iters, int bland_after) {
  const double cost_scale = w.cost.size() ? std::max(1.0, w.cost.cwiseAbs().maxCoeff()) : 1.0;
  const double otol = opts.opt_tol * cost_scale;
  const double piv_tol = 1e-11;

  Eigen::VectorXd cB(w.ms), y, d, delta;
  while (true) {
    if (iters >= max_iters)
      throw NumericalFailure("simplex: iteration cap reached (" + std::to_string(max_iters) + ")");
    const bool bland = iters >= bland_after;

    for (int i = 0; i < w.ms; ++i) cB[i] = w.cost[w.basis[i]];
    y = w.Binv.transpose() * cB;
    d = w.cost - w.A.transpose() * y;

    // pricing: Dantzig by default, Bland after the anti-cycling threshold
    int q = -1, sig = 0;
    double best = 0.0;
    for (int j = 0; j < w.nt; ++j) {
      if (w.stat[j] == kBasic || w.lo[j] == w.hi[j]) continue;
      int s = 0;
      if (w.stat[j] == kAtLower) {
        if (d[j] < -otol) s = +1;
      } else if (w.stat[j] == kAtUpper) {
        if (d[j] > otol) s = -1;
      } else {  // free at zero
        if (d[j] < -otol) s = +1;
        else if (d[j] > otol) s = -1;
      }
      if (s == 0) continue;
      if (bland) { q = j; sig = s; break; }
      if (std::abs(d[j]) > best) { best = std::abs(d[j]); q = j; sig = s; }
    }
    if (q < 0) return RunResult::optimal;

    delta = w.Binv * w.A.col(q);

    // ratio test over basic variables
    double t_basic = kInf, best_piv = 0.0;
    int r = -1;
    for (int i = 0; i < w.ms; ++i) {
      const double g = -sig * delta[i];  // rate of change of xB[i]
      double cap, ti;
      if (g > piv_tol) {
        cap = w.hi[w.basis[i]];
        if (!std::isfinite(cap)) continue;
        ti = (cap - w.xB[i]) / g;
      } else if (g < -piv_tol) {
        cap = w.lo[w.basis[i]];
        if (!std::isfinite(cap)) continue;
        ti = (cap - w.xB[i]) / g;
      } else {
        continue;
      }
      if (ti < 0.0) ti = 0.0;
      bool take;
      if (r < 0 || ti < t_basic - 1e-10 * (1.0 + t_basic)) {
        take = ti < t_basic;
      } else if (ti <= t_basic + 1e-10 * (1.0 + t_basic)) {
        take = bland ? w.basis[i] < w.basis[r] : std::abs(delta[i]) > best_piv;
      } else {
        take = false;
      }
      if (take) { t_basic = ti; r = i; best_piv = std::abs(delta[i]); }
    }

    const double t_own = w.hi[q] - w.lo[q];
    const double t = std::min(t_own, t_basic);
    if (!std::isfinite(t)) {
      if (phase1) throw NumericalFailure("simplex: unbounded phase-1 subproblem");
      return RunResult::unbounded;
    }

    ++iters;
    if (t_own <= t_basic) {
      // bound flip, no basis change
      if (t != 0.0) w.xB -= (sig * t) * delta;
      w.stat[q] = sig > 0 ? kAtUpper : kAtLower;
      w.val[q] = sig > 0 ? w.hi[q] : w.lo[q];
      continue;
    }

    const double entering_val = w.val[q] + sig * t;
    if (t != 0.0) w.xB -= (sig * t) * delta;
    const int leave = w.basis[r];
    const double g_r = -sig * delta[r];
    w.stat[leave] = g_r < 0 ? kAtLower : kAtUpper;
    w.val[leave] = g_r < 0 ? w.lo[leave] : w.hi[leave];
    if (phase1 && leave >= w.n + w.ms) {
      // artificial leaves: never let it back in
      w.lo[leave] = w.hi[leave] = 0.0;
      w.val[leave] = 0.0;
      w.stat[leave] = kAtLower;
    }
    w.basis[r] = q;
    w.stat[q] = kBasic;
    w.xB[r] = entering_val;

    const double piv = delta[r];
    w.Binv.row(r) /= piv;
    for (int i = 0; i < w.ms; ++i)
      if (i != r && delta[i] != 0.0) w.Binv.row(i) -= delta[i] * w.Binv.row(r);
    if (++w.pivots_since_refactor >= opts.refactor_every) refactor(w);
  }
}

} // namespace

LpSolution SimplexSolver::solve(const LinearProgram& lp) const {
  lp.validate();
  const int n = lp.num_vars();
  const int ms = lp.num_rows();

  for (int j = 0; j < n; ++j)
    if (lp.lower[j] > lp.upper[j]) return LpSolution{LpStatus::infeasible, 0.0, {}, 0};

  // scaled structural matrix
  Eigen::MatrixXd As(ms, n);
  for (int i = 0; i < ms; ++i) As.row(i) = lp.rows[i].coeffs.transpose();
  Eigen::VectorXd rscale = Eigen::VectorXd::Ones(ms);
  Eigen::VectorXd cscale = Eigen::VectorXd::Ones(n);
  if (opts_.equilibrate && ms > 0 && n > 0) {
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i < ms; ++i) {
        double mx = As.row(i).cwiseAbs().maxCoeff();
        if (mx > 0) {
          double s = std::exp2(-std::round(std::log2(mx)));
          As.row(i) *= s;
          rscale[i] *= s;
        }
      }
      for (int j = 0; j < n; ++j) {
        double mx = As.col(j).cwiseAbs().maxCoeff();
        if (mx > 0) {
          double s = std::exp2(-std::round(std::log2(mx)));
          As.col(j) *= s;
          cscale[j] *= s;
        }
      }
    }
  }

  Work w;
  w.n = n;
  w.ms = ms;
  w.nt = n + 2 * ms;
  w.A = Eigen::MatrixXd::Zero(ms, w.nt);
  w.A.leftCols(n) = As;
  w.b.resize(ms);
  for (int i = 0; i < ms; ++i) w.b[i] = rscale[i] * lp.rows[i].rhs;

  w.cost = Eigen::VectorXd::Zero(w.nt);
  w.lo = Eigen::VectorXd::Zero(w.nt);
  w.hi = Eigen::VectorXd::Zero(w.nt);
  w.val = Eigen::VectorXd::Zero(w.nt);
  w.stat.assign(w.nt, kAtLower);

  for (int j = 0; j < n; ++j) {
    w.lo[j] = lp.lower[j] / cscale[j];
    w.hi[j] = lp.upper[j] / cscale[j];
    if (std::isfinite(w.lo[j])) {
      w.stat[j] = kAtLower;
      w.val[j] = w.lo[j];
    } else if (std::isfinite(w.hi[j])) {
      w.stat[j] = kAtUpper;
      w.val[j] = w.hi[j];
    } else {
      w.stat[j] = kFreeAtZero;
      w.val[j] = 0.0;
    }
  }
  for (int i = 0; i < ms; ++i) {
    const int sj = n + i;
    w.A(i, sj) = 1.0;
    switch (lp.rows[i].rel) {
      case Relation::le: w.lo[sj] = 0.0; w.hi[sj] = kInf; break;
      case Relation::ge: w.lo[sj] = -kInf; w.hi[sj] = 0.0; break;
      case Relation::eq: w.lo[sj] = 0.0; w.hi[sj] = 0.0; break;
    }
    w.stat[sj] = kAtLower;
    w.val[sj] = std::isfinite(w.lo[sj]) ? w.lo[sj] : 0.0;
    if (!std::isfinite(w.lo[sj])) w.stat[sj] = kAtUpper, w.val[sj] = w.hi[sj];
  }

  // residuals with nonbasic columns at their start values
  Eigen::VectorXd resid = w.b;
  for (int j = 0; j < n + ms; ++j)
    if (w.val[j] != 0.0) resid -= w.A.col(j) * w.val[j];

  // crash basis: slack where it can absorb the residual, artificial otherwise
  w.basis.resize(ms);
  w.Binv = Eigen::MatrixXd::Zero(ms, ms);
  w.xB.resize(ms);
  double art_total = 0.0;
  for (int i = 0; i < ms; ++i) {
    const int sj = n + i, aj = n + ms + i;
    const bool slack_ok = (lp.rows[i].rel == Relation::le && resid[i] >= 0.0) ||
                          (lp.rows[i].rel == Relation::ge && resid[i] <= 0.0);
    if (slack_ok) {
      w.basis[i] = sj;
      w.stat[sj] = kBasic;
      w.xB[i] = resid[i];
      w.A(i, aj) = 1.0;
      w.lo[aj] = w.hi[aj] = 0.0;  // unused artificial stays pinned
      w.Binv(i, i) = 1.0;
    } else {
      const double sign = resid[i] >= 0.0 ? 1.0 : -1.0;
      w.A(i, aj) = sign;
      w.lo[aj] = 0.0;
      w.hi[aj] = kInf;
      w.basis[i] = aj;
      w.stat[aj] = kBasic;
      w.xB[i] = std::abs(resid[i]);
      w.Binv(i, i) = sign;
      art_total += std::abs(resid[i]);
    }
  }

  const int auto_max = opts_.max_iterations > 0 ? opts_.max_iterations : 20000 + 50 * (ms + n);
  const int auto_bland = opts_.bland_threshold > 0 ? opts_.bland_threshold : 2000 + 10 * (ms + n);
  const double b_mag = ms > 0 ? 1.0 + w.b.cwiseAbs().maxCoeff() : 1.0;
  const double eps_inf = 100.0 * opts_.feas_tol * b_mag;

  int iters = 0;
  if (art_total > eps_inf) {
    Eigen::VectorXd phase2_cost;  // phase 1 minimizes the artificial sum
    w.cost.setZero();
    for (int i = 0; i < ms; ++i) w.cost[n + ms + i] = 1.0;
    run_simplex(w, opts_, /*phase1=*/true, iters, auto_max, auto_bland);
    double infeas = 0.0;
    for (int i = 0; i < ms; ++i)
      if (w.basis[i] >= n + ms) infeas += std::max(0.0, w.xB[i]);
    if (infeas > eps_inf) return LpSolution{LpStatus::infeasible, 0.0, {}, iters};
  }
  for (int i = 0; i < ms; ++i) {
    const int aj = n + ms + i;
    w.lo[aj] = w.hi[aj] = 0.0;
    if (w.stat[aj] != kBasic) { w.val[aj] = 0.0; w.stat[aj] = kAtLower; }
  }

  // phase 2 with the real objective (internal minimization)
  w.cost.setZero();
  const double flip = lp.sense == Sense::maximize ? -1.0 : 1.0;
  for (int j = 0; j < n; ++j) w.cost[j] = flip * lp.objective[j] * cscale[j];
  const RunResult res = run_simplex(w, opts_, /*phase1=*/false, iters, auto_max, auto_bland);
  if (res == RunResult::unbounded) return LpSolution{LpStatus::unbounded, 0.0, {}, iters};

  refactor(w);  // clean final basis solve before extraction

  LpSolution sol;
  sol.status = LpStatus::optimal;
  sol.iterations = iters;
  sol.primal.resize(n);
  for (int j = 0; j < n; ++j) sol.primal[j] = w.val[j];
  for (int i = 0; i < ms; ++i)
    if (w.basis[i] < n) sol.primal[w.basis[i]] = w.xB[i];
  for (int j = 0; j < n; ++j) sol.primal[j] *= cscale[j];
  sol.objective_value = lp.objective.dot(sol.primal);
  return sol;
}

LpSolution solve_lp(const LinearProgram& lp, const SolverOptions& opts) {
  return SimplexSolver(opts).solve(lp);
}

const SolverBackend& default_solver() {
  static const SimplexSolver instance;
  return instance;
}

namespace {
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
std::string var_label(const LinearProgram& lp, int j) {
  if (j < static_cast<int>(lp.var_names.size()) && !lp.var_names[j].empty())
    return lp.var_names[j];
  return "x" + std::to_string(j);
}
} // namespace

void dump_lp(const LinearProgram& lp, std::ostream& os) {
  os << (lp.sense == Sense::maximize ? "maximize" : "minimize");
  for (int j = 0; j < lp.num_vars(); ++j)
    if (lp.objective[j] != 0.0) os << " + " << fmt(lp.objective[j]) << " " << var_label(lp, j);
  os << "\nsubject to\n";
  for (int i = 0; i < lp.num_rows(); ++i) {
    const auto& row = lp.rows[i];
    os << "  " << (row.name.empty() ? "r" + std::to_string(i) : row.name) << ":";
    for (int j = 0; j < lp.num_vars(); ++j)
      if (row.coeffs[j] != 0.0) os << " + " << fmt(row.coeffs[j]) << " " << var_label(lp, j);
    os << (row.rel == Relation::le ? " <= " : row.rel == Relation::ge ? " >= " : " = ")
       << fmt(row.rhs) << "\n";
  }
  os << "bounds\n";
  for (int j = 0; j < lp.num_vars(); ++j)
    os << "  " << fmt(lp.lower[j]) << " <= " << var_label(lp, j) << " <= " << fmt(lp.upper[j])
       << "\n";
}

} // namespace defba
