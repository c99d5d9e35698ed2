#include "sforge/linsolve.hpp"

#include <algorithm>

namespace sforge {

Expr symbolic_det(const std::vector<std::vector<Expr>>& m) {
  std::size_t n = m.size();
  if (n == 0) return num(1);
  if (n == 1) return m[0][0];
  if (n == 2) return sub(mul(m[0][0], m[1][1]), mul(m[0][1], m[1][0]));
  Expr acc = num(0);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<std::vector<Expr>> minor;
    for (std::size_t r = 1; r < n; ++r) {
      std::vector<Expr> row;
      for (std::size_t c = 0; c < n; ++c)
        if (c != j) row.push_back(m[r][c]);
      minor.push_back(std::move(row));
    }
    Expr term = mul(m[0][j], symbolic_det(minor));
    acc = (j % 2 == 0) ? add(acc, term) : sub(acc, term);
  }
  return acc;
}

namespace {

void enumerate_subsets(int total, int k, std::vector<std::vector<int>>& out) {
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    out.push_back(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == total - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

LinearSolveResult solve_linear_symbolic(const std::vector<LinearRow>& rows, int unknowns,
                                        const std::vector<std::string>& symbol_order,
                                        const std::vector<DomainConstraint>& constraints,
                                        const ZeroTestConfig& cfg) {
  LinearSolveResult res;
  res.solution.assign(unknowns, std::nullopt);

  // columns certifying zero everywhere leave their unknown undetermined
  std::vector<int> active;
  for (int j = 0; j < unknowns; ++j) {
    bool all_zero = true;
    for (const auto& r : rows) {
      Expr c = simplify(r.coeffs[j]);
      if (c.is_zero()) continue;
      ZeroCertificate cert = certify_zero(c, symbol_order, constraints, cfg);
      if (!cert.ok()) {
        all_zero = false;
        break;
      }
    }
    if (all_zero)
      res.free_unknowns.push_back(j);
    else
      active.push_back(j);
  }

  int k = static_cast<int>(active.size());
  if (k > 0) {
    if (static_cast<int>(rows.size()) < k) {
      res.status = LinearSolveResult::Status::Underdetermined;
      res.note = "fewer rows than unknowns";
      res.free_unknowns = active;
      return res;
    }
    std::vector<std::vector<int>> subsets;
    enumerate_subsets(static_cast<int>(rows.size()), k, subsets);
    bool found = false;
    for (const auto& subset : subsets) {
      std::vector<std::vector<Expr>> a(k, std::vector<Expr>(k));
      for (int r = 0; r < k; ++r)
        for (int c = 0; c < k; ++c) a[r][c] = rows[subset[r]].coeffs[active[c]];
      Expr det = simplify(symbolic_det(a));
      if (det.is_zero()) continue;
      ZeroCertificate cert = certify_zero(det, symbol_order, constraints, cfg);
      if (cert.verdict != Verdict::Nonzero) continue;
      // Cramer
      for (int c = 0; c < k; ++c) {
        std::vector<std::vector<Expr>> ac = a;
        for (int r = 0; r < k; ++r) ac[r][c] = rows[subset[r]].rhs;
        res.solution[active[c]] = simplify(div(symbolic_det(ac), det));
      }
      res.pivot_rows = subset;
      found = true;
      break;
    }
    if (!found) {
      res.status = LinearSolveResult::Status::Underdetermined;
      res.note = "no row subset with a certified nonzero determinant";
      res.free_unknowns = active;
      return res;
    }
  }

  // every row must be reproduced by the solution
  for (std::size_t r = 0; r < rows.size(); ++r) {
    Expr residual = neg(rows[r].rhs);
    for (int j = 0; j < unknowns; ++j) {
      if (res.solution[j].has_value()) residual = add(residual, mul(rows[r].coeffs[j], *res.solution[j]));
    }
    residual = simplify(residual);
    ZeroCertificate cert = certify_zero(residual, symbol_order, constraints, cfg);
    if (!cert.ok()) {
      res.status = LinearSolveResult::Status::Inconsistent;
      res.failing_row = static_cast<int>(r);
      res.failing_residual = residual;
      res.failing_cert = cert;
      res.note = "row '" + rows[r].label + "' is not reproduced by the solution";
      return res;
    }
  }
  res.status = LinearSolveResult::Status::Solved;
  return res;
}

}  // namespace sforge
