#include "defba/collocation.hpp"

#include <cmath>
#include <stdexcept>

namespace defba {

DiscretizationGrid DiscretizationGrid::uniform(double t0, double tf, double d) {
  if (!(d > 0.0)) throw std::invalid_argument("grid: step size must be > 0");
  if (!(tf > t0)) throw std::invalid_argument("grid: tf must exceed t0");
  DiscretizationGrid g;
  g.t0 = t0;
  g.tf = tf;
  g.d = d;
  int n = std::max(1, static_cast<int>(std::ceil((tf - t0) / d - 1e-9)));
  // avoid a degenerate sliver as the shortened last step
  if (n > 1 && tf - (t0 + (n - 1) * d) < 1e-9 * d) --n;
  g.times.resize(n + 1);
  for (int k = 0; k < n; ++k) g.times[k] = t0 + k * d;
  g.times[n] = tf;
  return g;
}

DynamicLP discretize(const MetabolicModel& model, const SystemState& state0,
                     const DiscretizationGrid& grid) {
  if (state0.Y.size() != model.n_y() || state0.C.size() != model.n_c() ||
      state0.P.size() != model.n_p())
    throw DimensionMismatch("discretize: state does not match model");

  const ConstraintMatrices cm = assemble_matrices(model);
  const int N = grid.num_intervals();
  const int m = model.m();
  const int ny = model.n_y(), nc = model.n_c(), np = model.n_p();

  DynamicLP d(model, grid);
  LinearProgram& lp = d.lp;
  lp.sense = Sense::maximize;

  // state columns, time-major; initial conditions are fixed bounds
  for (int k = 0; k <= N; ++k) {
    const std::string at = "@" + std::to_string(k);
    for (int i = 0; i < ny; ++i)
      lp.add_variable(0.0, kInf, 0.0, model.species()[model.y_offset() + i].id + at);
    for (int i = 0; i < nc; ++i)
      lp.add_variable(0.0, kInf, 0.0, model.species()[model.c_offset() + i].id + at);
    for (int i = 0; i < np; ++i)
      lp.add_variable(0.0, kInf, 0.0, model.species()[model.p_offset() + i].id + at);
  }
  for (int k = 0; k < N; ++k) {
    const std::string at = "." + std::to_string(k);
    for (int j = 0; j < m; ++j)
      lp.add_variable(0.0, kInf, 0.0, model.reactions()[j].id + "+" + at);
    for (int j = 0; j < m; ++j)
      lp.add_variable(0.0, model.reactions()[j].reversible ? kInf : 0.0, 0.0,
                      model.reactions()[j].id + "-" + at);
  }
  for (int i = 0; i < ny; ++i) lp.set_bounds(d.y_col(0, i), state0.Y[i], state0.Y[i]);
  for (int i = 0; i < nc; ++i) lp.set_bounds(d.c_col(0, i), state0.C[i], state0.C[i]);
  for (int i = 0; i < np; ++i) lp.set_bounds(d.p_col(0, i), state0.P[i], state0.P[i]);

  const int nv = lp.num_vars();

  // trapezoidal quadrature of B_o as objective
  for (int k = 0; k <= N; ++k) {
    double wgt = 0.0;
    if (k > 0) wgt += 0.5 * grid.step(k - 1);
    if (k < N) wgt += 0.5 * grid.step(k);
    for (int i = 0; i < nc; ++i) lp.objective[d.c_col(k, i)] = wgt * model.b_c()[i];
    for (int i = 0; i < np; ++i) lp.objective[d.p_col(k, i)] = wgt * model.b_p()[i];
  }

  const auto scatter_net = [&](Eigen::VectorXd& row, int k, const Eigen::RowVectorXd& net,
                               double scale) {
    for (int j = 0; j < m; ++j) {
      if (net[j] == 0.0) continue;
      row[d.flux_plus_col(k, j)] += scale * net[j];
      row[d.flux_minus_col(k, j)] -= scale * net[j];
    }
  };

  for (int k = 0; k < N; ++k) {
    const double dk = grid.step(k);
    const std::string at = "@" + std::to_string(k);

    // state recursion z_{k+1} = z_k + dk * S_z v_k (exact for constant v_k)
    for (int i = 0; i < ny; ++i) {
      Eigen::VectorXd row = Eigen::VectorXd::Zero(nv);
      row[d.y_col(k + 1, i)] = 1.0;
      row[d.y_col(k, i)] = -1.0;
      scatter_net(row, k, cm.S_Y.row(i), -dk);
      lp.add_row(std::move(row), Relation::eq, 0.0, "dynY" + std::to_string(i) + at);
    }
    for (int i = 0; i < nc; ++i) {
      Eigen::VectorXd row = Eigen::VectorXd::Zero(nv);
      row[d.c_col(k + 1, i)] = 1.0;
      row[d.c_col(k, i)] = -1.0;
      scatter_net(row, k, cm.S_C.row(i), -dk);
      lp.add_row(std::move(row), Relation::eq, 0.0, "dynC" + std::to_string(i) + at);
    }
    for (int i = 0; i < np; ++i) {
      Eigen::VectorXd row = Eigen::VectorXd::Zero(nv);
      row[d.p_col(k + 1, i)] = 1.0;
      row[d.p_col(k, i)] = -1.0;
      scatter_net(row, k, cm.S_P.row(i), -dk);
      lp.add_row(std::move(row), Relation::eq, 0.0, "dynP" + std::to_string(i) + at);
    }

    for (int i = 0; i < model.n_x(); ++i) {
      Eigen::VectorXd row = Eigen::VectorXd::Zero(nv);
      scatter_net(row, k, cm.S_X.row(i), 1.0);
      lp.add_row(std::move(row), Relation::eq, 0.0, "qss" + std::to_string(i) + at);
    }

    // capacity against the interval's left state
    for (int r = 0; r < cm.H_c.rows(); ++r) {
      Eigen::VectorXd row = Eigen::VectorXd::Zero(nv);
      for (int j = 0; j < m; ++j) {
        if (cm.H_c(r, j) != 0.0) row[d.flux_plus_col(k, j)] = cm.H_c(r, j);
        if (cm.H_c(r, m + j) != 0.0) row[d.flux_minus_col(k, j)] = cm.H_c(r, m + j);
      }
      for (int i = 0; i < np; ++i)
        if (cm.H_e(r, i) != 0.0) row[d.p_col(k, i)] -= cm.H_e(r, i);
      lp.add_row(std::move(row), Relation::le, 0.0, "cap" + std::to_string(r) + at);
    }

    for (int r = 0; r < cm.H_m.rows(); ++r) {
      const int j = cm.maintenance_reaction[r];
      Eigen::VectorXd row = Eigen::VectorXd::Zero(nv);
      row[d.flux_plus_col(k, j)] = -1.0;
      row[d.flux_minus_col(k, j)] = 1.0;
      for (int i = 0; i < nc; ++i) row[d.c_col(k, i)] += cm.H_m(r, i);
      for (int i = 0; i < np; ++i) row[d.p_col(k, i)] += cm.H_m(r, nc + i);
      lp.add_row(std::move(row), Relation::le, 0.0, "mnt" + std::to_string(r) + at);
    }
  }

  // composition at every grid point, including the last
  for (int k = 0; k <= N; ++k) {
    for (int r = 0; r < cm.H_b.rows(); ++r) {
      Eigen::VectorXd row = Eigen::VectorXd::Zero(nv);
      for (int i = 0; i < nc; ++i) row[d.c_col(k, i)] = cm.H_b(r, i);
      for (int i = 0; i < np; ++i) row[d.p_col(k, i)] = cm.H_b(r, nc + i);
      lp.add_row(std::move(row), Relation::le, 0.0,
                 "comp" + std::to_string(r) + "@" + std::to_string(k));
    }
  }

  return d;
}

Trajectory extract_trajectory(const DynamicLP& dlp, const LpSolution& sol) {
  if (sol.status != LpStatus::optimal)
    throw StatusNotOptimal("extract_trajectory: solution status is not optimal");

  const MetabolicModel& model = dlp.model;
  const int N = dlp.grid.num_intervals();
  const int m = model.m();

  Trajectory traj;
  traj.times = dlp.grid.times;
  traj.Y.resize(N + 1, model.n_y());
  traj.C.resize(N + 1, model.n_c());
  traj.P.resize(N + 1, model.n_p());
  traj.fluxes.resize(N, m);
  traj.B.resize(N + 1);
  traj.B_o.resize(N + 1);
  for (int k = 0; k <= N; ++k) {
    for (int i = 0; i < model.n_y(); ++i) traj.Y(k, i) = sol.primal[dlp.y_col(k, i)];
    for (int i = 0; i < model.n_c(); ++i) traj.C(k, i) = sol.primal[dlp.c_col(k, i)];
    for (int i = 0; i < model.n_p(); ++i) traj.P(k, i) = sol.primal[dlp.p_col(k, i)];
    traj.B[k] = model.w_c().dot(traj.C.row(k)) + model.w_p().dot(traj.P.row(k));
    traj.B_o[k] = model.b_c().dot(traj.C.row(k)) + model.b_p().dot(traj.P.row(k));
  }
  for (int k = 0; k < N; ++k)
    for (int j = 0; j < m; ++j)
      traj.fluxes(k, j) =
          sol.primal[dlp.flux_plus_col(k, j)] - sol.primal[dlp.flux_minus_col(k, j)];
  traj.objective_value = sol.objective_value;
  return traj;
}

} // namespace defba
