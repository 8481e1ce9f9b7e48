#include "satrep/simplex.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "satrep/error.hpp"

namespace satrep::lp {

namespace {

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_((rows + 1) * (cols + 1), 0.0) {}

  double& at(std::size_t r, std::size_t c) { return data_[r * (cols_ + 1) + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * (cols_ + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, cols_); }
  double& cost(std::size_t c) { return at(rows_, c); }
  double& objective() { return at(rows_, cols_); }  // holds −z

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  void pivot(std::size_t pr, std::size_t pc) {
    const double inv = 1.0 / at(pr, pc);
    double* prow = &data_[pr * (cols_ + 1)];
    for (std::size_t c = 0; c <= cols_; ++c) prow[c] *= inv;
    prow[pc] = 1.0;
    for (std::size_t r = 0; r <= rows_; ++r) {
      if (r == pr) continue;
      double* row = &data_[r * (cols_ + 1)];
      const double f = row[pc];
      if (f == 0.0) continue;
      for (std::size_t c = 0; c <= cols_; ++c) row[c] -= f * prow[c];
      row[pc] = 0.0;
    }
  }

 private:
  std::size_t rows_, cols_;
  std::vector<double> data_;
};

struct Runner {
  Tableau& t;
  std::vector<std::size_t>& basis;
  const Options& opt;
  std::size_t& iterations;
  std::size_t cap;

  // Returns false when unbounded. `allowed` is the number of leading columns
  // eligible to enter. Dantzig pricing; Bland's rule after a run of
  // degenerate pivots, which rules out cycling.
  bool run(std::size_t allowed) {
    constexpr std::size_t kDegenerateStreak = 50;
    std::size_t degenerate = 0;
    for (;;) {
      const bool bland = degenerate >= kDegenerateStreak;
      std::size_t enter = allowed;
      double most_negative = -opt.cost_tol;
      for (std::size_t c = 0; c < allowed; ++c) {
        const double rc = t.cost(c);
        if (rc >= most_negative) continue;
        enter = c;
        if (bland) break;
        most_negative = rc;
      }
      if (enter == allowed) return true;

      std::size_t leave = t.rows();
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < t.rows(); ++r) {
        const double a = t.at(r, enter);
        if (a <= opt.pivot_tol) continue;
        const double ratio = t.rhs(r) / a;
        if (ratio < best - 1e-15 || (std::abs(ratio - best) <= 1e-15 && basis[r] < basis[leave])) {
          best = ratio;
          leave = r;
        }
      }
      if (leave == t.rows()) return false;
      if (++iterations > cap)
        throw Error(ErrorCode::LPNumericalFailure,
                    "simplex iteration cap " + std::to_string(cap) + " reached");
      degenerate = best <= 1e-12 ? degenerate + 1 : 0;
      t.pivot(leave, enter);
      basis[leave] = enter;
    }
  }
};

}  // namespace

Solution solve(const Problem& problem, const Options& options) {
  const std::size_t n = problem.num_vars;
  const std::size_t m = problem.constraints.size();
  if (problem.objective.size() != n)
    throw Error(ErrorCode::DimMismatch, "objective length differs from variable count");

  // Column layout: structural | slack/surplus | artificial.
  std::size_t num_slack = 0, num_art = 0;
  std::vector<double> sign(m, 1.0);
  for (std::size_t i = 0; i < m; ++i) {
    const auto& row = problem.constraints[i];
    if (row.coefficients.size() != n) throw Error(ErrorCode::DimMismatch, "constraint length differs");
    Sense s = row.sense;
    if (row.rhs < 0.0) {
      sign[i] = -1.0;
      if (s == Sense::LessEq) s = Sense::GreaterEq;
      else if (s == Sense::GreaterEq) s = Sense::LessEq;
    }
    if (s != Sense::Equal) ++num_slack;
    if (s != Sense::LessEq) ++num_art;
  }
  const std::size_t art_begin = n + num_slack;
  const std::size_t cols = art_begin + num_art;

  Tableau t(m, cols);
  std::vector<std::size_t> basis(m);
  std::size_t next_slack = n, next_art = art_begin;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& row = problem.constraints[i];
    for (std::size_t j = 0; j < n; ++j) t.at(i, j) = sign[i] * row.coefficients[j];
    t.rhs(i) = sign[i] * row.rhs;
    Sense s = row.sense;
    if (sign[i] < 0.0 && s != Sense::Equal) s = s == Sense::LessEq ? Sense::GreaterEq : Sense::LessEq;
    if (s == Sense::LessEq) {
      t.at(i, next_slack) = 1.0;
      basis[i] = next_slack++;
    } else {
      if (s == Sense::GreaterEq) t.at(i, next_slack++) = -1.0;
      t.at(i, next_art) = 1.0;
      basis[i] = next_art++;
    }
  }

  Solution sol;
  const std::size_t cap = options.max_iterations ? options.max_iterations : 10 * (cols + m);
  Runner runner{t, basis, options, sol.iterations, cap};

  // Phase one: minimize the sum of artificials.
  if (num_art > 0) {
    for (std::size_t c = art_begin; c < cols; ++c) t.cost(c) = 1.0;
    for (std::size_t r = 0; r < m; ++r)
      if (basis[r] >= art_begin)
        for (std::size_t c = 0; c <= cols; ++c) t.at(m, c) -= t.at(r, c);
    runner.run(cols);
    if (-t.objective() > options.feasibility_tol) {
      sol.status = Status::Infeasible;
      return sol;
    }
    // Drive zero-level artificials out of the basis where possible; rows
    // where that fails are redundant and keep their artificial at zero.
    for (std::size_t r = 0; r < m; ++r) {
      if (basis[r] < art_begin) continue;
      for (std::size_t c = 0; c < art_begin; ++c)
        if (std::abs(t.at(r, c)) > options.pivot_tol) {
          t.pivot(r, c);
          basis[r] = c;
          break;
        }
    }
  }

  // Phase two.
  for (std::size_t c = 0; c <= cols; ++c) t.cost(c) = 0.0;
  for (std::size_t j = 0; j < n; ++j) t.cost(j) = problem.objective[j];
  for (std::size_t r = 0; r < m; ++r) {
    const std::size_t b = basis[r];
    const double cb = b < n ? problem.objective[b] : 0.0;
    if (cb == 0.0) continue;
    for (std::size_t c = 0; c <= cols; ++c) t.at(m, c) -= cb * t.at(r, c);
  }
  if (!runner.run(art_begin)) {
    sol.status = Status::Unbounded;
    return sol;
  }

  sol.status = Status::Optimal;
  sol.x.assign(n, 0.0);
  for (std::size_t r = 0; r < m; ++r)
    if (basis[r] < n) sol.x[basis[r]] = t.rhs(r);
  sol.objective = 0.0;
  for (std::size_t j = 0; j < n; ++j) sol.objective += problem.objective[j] * sol.x[j];
  return sol;
}

}  // namespace satrep::lp
