#pragma once

#include <cstddef>
#include <vector>

namespace satrep::lp {

enum class Sense { LessEq, Equal, GreaterEq };

struct Constraint {
  std::vector<double> coefficients;  // dense, one per variable
  Sense sense;
  double rhs;
};

/// minimize cᵀx subject to the constraints and x ≥ 0.
struct Problem {
  std::size_t num_vars = 0;
  std::vector<double> objective;
  std::vector<Constraint> constraints;
};

enum class Status { Optimal, Infeasible, Unbounded };

struct Solution {
  Status status = Status::Infeasible;
  double objective = 0.0;
  std::vector<double> x;
  std::size_t iterations = 0;
};

struct Options {
  double pivot_tol = 1e-10;
  double cost_tol = 1e-11;
  double feasibility_tol = 1e-9;  // phase-one optimum above this is infeasible
  /// Cap on total pivots; 0 means 10·(columns + rows) of the standard form.
  std::size_t max_iterations = 0;
};

/// Two-phase dense tableau simplex with Bland's rule. Throws
/// Error(LPNumericalFailure) when the iteration cap is reached.
Solution solve(const Problem& problem, const Options& options = {});

}  // namespace satrep::lp
