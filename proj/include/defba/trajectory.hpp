#pragma once

#include <Eigen/Dense>

#include <vector>

#include "defba/model.hpp"

namespace defba {

/// Time-gridded result of a dynamic solve. States live on the N+1 grid
/// points; fluxes are net rates, constant on each of the N intervals.
struct Trajectory {
  std::vector<double> times;  // N+1 points, h
  Eigen::MatrixXd Y;          // (N+1) x n_y, mol
  Eigen::MatrixXd C;          // (N+1) x n_c
  Eigen::MatrixXd P;          // (N+1) x n_p
  Eigen::MatrixXd fluxes;     // N x m, mol/h
  Eigen::VectorXd B;          // total biomass per grid point, g
  Eigen::VectorXd B_o;        // objective biomass per grid point, g
  double objective_value = 0.0;  // integral of B_o over the grid, g*h

  int num_points() const { return static_cast<int>(times.size()); }
  int num_intervals() const { return num_points() - 1; }

  SystemState state_at(int k) const {
    return SystemState{times[k], Y.row(k).transpose(), C.row(k).transpose(),
                       P.row(k).transpose()};
  }
};

} // namespace defba
