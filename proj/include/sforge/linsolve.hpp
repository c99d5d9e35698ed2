#ifndef SFORGE_LINSOLVE_HPP
#define SFORGE_LINSOLVE_HPP

#include "sforge/expr.hpp"
#include "sforge/zerotest.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sforge {

struct LinearRow {
  std::vector<Expr> coeffs;  // one coefficient per unknown
  Expr rhs;
  std::string label;
};

/// Outcome of a small symbolic linear solve. An unknown whose column is
/// certified zero in every row is reported as undetermined (nullopt), not 0.
struct LinearSolveResult {
  enum class Status { Solved, Inconsistent, Underdetermined };
  Status status = Status::Underdetermined;
  std::vector<std::optional<Expr>> solution;
  std::vector<int> pivot_rows;
  std::vector<int> free_unknowns;  // undetermined columns
  int failing_row = -1;
  Expr failing_residual;
  ZeroCertificate failing_cert;
  std::string note;
  bool solved() const { return status == Status::Solved; }
};

/// Solves rows * x = rhs for a handful of unknowns: picks a row subset with a
/// zero-test-certified nonzero determinant, solves it exactly by Cramer's
/// rule, and certifies every remaining row's residual.
LinearSolveResult solve_linear_symbolic(const std::vector<LinearRow>& rows, int unknowns,
                                        const std::vector<std::string>& symbol_order,
                                        const std::vector<DomainConstraint>& constraints,
                                        const ZeroTestConfig& cfg);

/// Exact determinant of a small symbolic matrix (cofactor expansion).
Expr symbolic_det(const std::vector<std::vector<Expr>>& m);

}  // namespace sforge

#endif
