#include "defba/static_rates.hpp"

#include <stdexcept>

namespace defba {

namespace {

// bounds for the split flux columns: v+ then v-, both nonnegative,
// backward part pinned to zero for irreversible reactions
void add_flux_variables(const MetabolicModel& model, LinearProgram& lp) {
  for (int j = 0; j < model.m(); ++j)
    lp.add_variable(0.0, kInf, 0.0, model.reactions()[j].id + "+");
  for (int j = 0; j < model.m(); ++j)
    lp.add_variable(0.0, model.reactions()[j].reversible ? kInf : 0.0, 0.0,
                    model.reactions()[j].id + "-");
}

// row coefficients of a net-flux expression r^T v over split columns
void put_net_row(const Eigen::RowVectorXd& net, Eigen::VectorXd& coeffs) {
  const int m = static_cast<int>(net.size());
  coeffs.head(m) = net.transpose();
  coeffs.segment(m, m) = -net.transpose();
}

void add_qss_rows(const ConstraintMatrices& cm, int total_vars, LinearProgram& lp) {
  for (int i = 0; i < cm.S_X.rows(); ++i) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(total_vars);
    put_net_row(cm.S_X.row(i), row);
    lp.add_row(std::move(row), Relation::eq, 0.0, "qss" + std::to_string(i));
  }
}

} // namespace

LinearBound max_linear_rate(const MetabolicModel& model, double b_init,
                            const SolverBackend& solver) {
  if (!(b_init > 0.0)) throw std::invalid_argument("max_linear_rate: b_init must be > 0");
  const ConstraintMatrices cm = assemble_matrices(model);
  const int m = model.m(), nc = model.n_c(), np = model.n_p();

  LinearProgram lp;
  lp.sense = Sense::maximize;
  add_flux_variables(model, lp);
  for (int i = 0; i < nc; ++i)
    lp.add_variable(0.0, kInf, 0.0, model.species()[model.c_offset() + i].id + "_lin");
  for (int i = 0; i < np; ++i)
    lp.add_variable(0.0, kInf, 0.0, model.species()[model.p_offset() + i].id + "_lin");
  const int nv = lp.num_vars();
  const int c0 = 2 * m, p0 = 2 * m + nc;

  // objective: b-weighted net production rate of storage and macromolecules
  Eigen::RowVectorXd prod = model.b_c().transpose() * cm.S_C + model.b_p().transpose() * cm.S_P;
  Eigen::VectorXd obj = Eigen::VectorXd::Zero(nv);
  put_net_row(prod, obj);
  lp.objective = obj;

  add_qss_rows(cm, nv, lp);

  for (int r = 0; r < cm.H_c.rows(); ++r) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(nv);
    row.head(2 * m) = cm.H_c.row(r).transpose();
    row.segment(p0, np) = -cm.H_e.row(r).transpose();
    lp.add_row(std::move(row), Relation::le, 0.0, "cap" + std::to_string(r));
  }
  for (int r = 0; r < cm.H_b.rows(); ++r) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(nv);
    row.segment(c0, nc) = cm.H_b.row(r).head(nc).transpose();
    row.segment(p0, np) = cm.H_b.row(r).tail(np).transpose();
    lp.add_row(std::move(row), Relation::le, 0.0, "comp" + std::to_string(r));
  }
  {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(nv);
    row.segment(c0, nc) = model.w_c();
    row.segment(p0, np) = model.w_p();
    lp.add_row(std::move(row), Relation::eq, b_init, "biomass");
  }
  for (int r = 0; r < cm.H_m.rows(); ++r) {
    const int j = cm.maintenance_reaction[r];
    Eigen::VectorXd row = Eigen::VectorXd::Zero(nv);
    row[j] = -1.0;
    row[m + j] = 1.0;
    row.segment(c0, nc) = cm.H_m.row(r).head(nc).transpose();
    row.segment(p0, np) = cm.H_m.row(r).tail(np).transpose();
    lp.add_row(std::move(row), Relation::le, 0.0, "mnt" + std::to_string(r));
  }

  const LpSolution sol = solver.solve(lp);
  if (sol.status == LpStatus::infeasible)
    throw Infeasible("max_linear_rate: composition/maintenance rules are mutually inconsistent");
  if (sol.status == LpStatus::unbounded)
    throw Unbounded("max_linear_rate: unbounded growth rate (growth without enzyme cost)");

  LinearBound out;
  out.lambda_s = sol.objective_value;
  out.lambda_r = sol.objective_value / b_init;
  out.v_lin = sol.primal.head(m) - sol.primal.segment(m, m);
  out.C_lin = sol.primal.segment(c0, nc);
  out.P_lin = sol.primal.segment(p0, np);
  return out;
}

BalancedRate max_balanced_rate(const MetabolicModel& model, const SystemState& state0,
                               const SolverBackend& solver) {
  const ConstraintMatrices cm = assemble_matrices(model);
  const int m = model.m(), nc = model.n_c(), np = model.n_p();
  if (state0.C.size() != nc || state0.P.size() != np)
    throw DimensionMismatch("max_balanced_rate: state does not match model");
  if ((nc > 0 && state0.C.minCoeff() < 0.0) || (np > 0 && state0.P.minCoeff() < 0.0))
    throw std::invalid_argument("max_balanced_rate: negative amounts in state");
  if (state0.C.sum() + state0.P.sum() <= 0.0)
    throw std::invalid_argument("max_balanced_rate: composition is all zero");

  Eigen::VectorXd cp(nc + np);
  cp.head(nc) = state0.C;
  cp.tail(np) = state0.P;
  if (cm.H_b.rows() > 0) {
    Eigen::VectorXd viol = cm.H_b * cp;
    if (viol.maxCoeff() > 1e-9 * (1.0 + cp.cwiseAbs().maxCoeff()))
      throw InfeasibleComposition("max_balanced_rate: state violates the composition constraint");
  }

  LinearProgram lp;
  lp.sense = Sense::maximize;
  add_flux_variables(model, lp);
  const int mu = lp.add_variable(0.0, kInf, 1.0, "mu");
  const int nv = lp.num_vars();

  // balance: (S_C;S_P) v = mu (C0;P0)
  for (int i = 0; i < nc; ++i) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(nv);
    put_net_row(cm.S_C.row(i), row);
    row[mu] = -state0.C[i];
    lp.add_row(std::move(row), Relation::eq, 0.0, "balC" + std::to_string(i));
  }
  for (int i = 0; i < np; ++i) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(nv);
    put_net_row(cm.S_P.row(i), row);
    row[mu] = -state0.P[i];
    lp.add_row(std::move(row), Relation::eq, 0.0, "balP" + std::to_string(i));
  }
  add_qss_rows(cm, nv, lp);
  for (int r = 0; r < cm.H_c.rows(); ++r) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(nv);
    row.head(2 * m) = cm.H_c.row(r).transpose();
    lp.add_row(std::move(row), Relation::le, cm.H_e.row(r).dot(state0.P),
               "cap" + std::to_string(r));
  }
  for (int r = 0; r < cm.H_m.rows(); ++r) {
    const int j = cm.maintenance_reaction[r];
    Eigen::VectorXd row = Eigen::VectorXd::Zero(nv);
    row[j] = -1.0;
    row[m + j] = 1.0;
    lp.add_row(std::move(row), Relation::le, -cm.H_m.row(r).dot(cp), "mnt" + std::to_string(r));
  }

  const LpSolution sol = solver.solve(lp);
  if (sol.status == LpStatus::infeasible)
    throw Infeasible("max_balanced_rate: maintenance demands exceed capacity at this composition");
  if (sol.status == LpStatus::unbounded)
    throw Unbounded("max_balanced_rate: unbounded growth rate (growth without enzyme cost)");

  BalancedRate out;
  out.mu_bal = sol.objective_value;
  out.v_bal = sol.primal.head(m) - sol.primal.segment(m, m);
  return out;
}

} // namespace defba
