#pragma once

#include <Eigen/Dense>

#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "defba/errors.hpp"

namespace defba {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Relation { le, eq, ge };
enum class Sense { minimize, maximize };
enum class LpStatus { optimal, infeasible, unbounded };

/// A dense linear program over bounded variables. Build it with
/// add_variable/add_row, then hand it to a solver. Not modified by solves.
struct LinearProgram {
  struct Row {
    Eigen::VectorXd coeffs;  // length = variable count at solve time
    Relation rel = Relation::le;
    double rhs = 0.0;
    std::string name;
  };

  Sense sense = Sense::maximize;
  Eigen::VectorXd objective;  // one coefficient per variable
  Eigen::VectorXd lower;      // -inf allowed
  Eigen::VectorXd upper;      // +inf allowed
  std::vector<Row> rows;
  std::vector<std::string> var_names;

  int num_vars() const { return static_cast<int>(objective.size()); }
  int num_rows() const { return static_cast<int>(rows.size()); }

  /// Appends a variable, returns its column index.
  int add_variable(double lo, double hi, double obj = 0.0, std::string name = "");
  void add_row(Eigen::VectorXd coeffs, Relation rel, double rhs, std::string name = "");
  void set_bounds(int var, double lo, double hi);

  /// Throws ValidationError if row lengths or bounds are inconsistent.
  void validate() const;
};

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  double objective_value = 0.0;   // in the original sense, when optimal
  Eigen::VectorXd primal;         // variable values, when optimal
  int iterations = 0;
};

struct SolverOptions {
  double feas_tol = 1e-9;  // bound/row feasibility, relative to magnitude
  double opt_tol = 1e-8;   // reduced-cost threshold
  bool equilibrate = true; // power-of-two row/column scaling
  int max_iterations = 0;  // 0 = automatic from problem size
  int bland_threshold = 0; // 0 = automatic; switch to Bland's rule after this
  int refactor_every = 100;
};

/// Solver interface so alternative LP backends can be swapped in behind the
/// engine. Implementations must be safe for concurrent solve() calls.
class SolverBackend {
public:
  virtual ~SolverBackend() = default;
  virtual LpSolution solve(const LinearProgram& lp) const = 0;
};

/// Bundled deterministic solver: dense revised simplex on bounded variables,
/// two-phase, Dantzig pricing with Bland's rule as anti-cycling fallback.
/// Throws NumericalFailure if the iteration cap is hit.
class SimplexSolver final : public SolverBackend {
public:
  SimplexSolver() = default;
  explicit SimplexSolver(SolverOptions opts) : opts_(opts) {}
  LpSolution solve(const LinearProgram& lp) const override;

private:
  SolverOptions opts_;
};

/// Solves with the bundled simplex.
LpSolution solve_lp(const LinearProgram& lp, const SolverOptions& opts = {});

/// Shared default backend instance.
const SolverBackend& default_solver();

/// Human-readable dump: objective line, one constraint per line, then bounds.
void dump_lp(const LinearProgram& lp, std::ostream& os);

} // namespace defba
