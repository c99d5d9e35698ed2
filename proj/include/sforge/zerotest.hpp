#ifndef SFORGE_ZEROTEST_HPP
#define SFORGE_ZEROTEST_HPP

#include "sforge/expr.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sforge {

struct DomainConstraint {
  enum class Rel { Greater, Less, NonZero };
  std::string symbol;
  Rel rel;
  Expr bound;  // may reference constants and earlier-declared symbols only
};

struct ZeroTestConfig {
  int samples = 32;
  double tol = 1e-9;
  std::uint64_t seed = 0x5EED;
};

enum class Verdict { SymbolicZero, NumericZero, Nonzero, Inconclusive };

std::string verdict_name(Verdict v);

/// Proof token for "this expression vanishes on the chart domain": either the
/// simplifier reduced it to the constant 0, or every sampled in-domain value
/// was below tolerance. A Nonzero verdict means at least one sample exceeded
/// tolerance by a factor of 1e3.
struct ZeroCertificate {
  Verdict verdict = Verdict::Inconclusive;
  int samples = 0;
  double max_abs = 0.0;
  double tol = 0.0;
  std::string note;
  bool ok() const { return verdict == Verdict::SymbolicZero || verdict == Verdict::NumericZero; }
};

/// Deterministic in-domain point generator. Symbols are sampled in the given
/// order; strictly-positive symbols draw log-uniformly from (0.1, 10), all
/// others uniformly from (-5, 5), rejection-sampled against the constraints.
class Sampler {
 public:
  Sampler(std::vector<std::string> symbols, std::vector<DomainConstraint> constraints,
          std::uint64_t seed);

  /// Next in-domain point. Throws EvalError if rejection sampling cannot
  /// find one (reports the offending constraint).
  std::map<std::string, double> next();

 private:
  double next_unit();
  std::vector<std::string> symbols_;
  std::vector<DomainConstraint> constraints_;
  std::uint64_t state_;
};

ZeroCertificate certify_zero(const Expr& e, const std::vector<std::string>& symbol_order,
                             const std::vector<DomainConstraint>& constraints,
                             const ZeroTestConfig& cfg);

/// Convenience overload: symbol order taken from the expression's free
/// symbols in lexicographic order.
ZeroCertificate certify_zero(const Expr& e, const std::vector<DomainConstraint>& constraints,
                             const ZeroTestConfig& cfg);

/// Componentwise certification of a labeled residual family; the combined
/// verdict is the weakest of the components, and the first non-certifying
/// component is recorded.
struct ResidualCheck {
  ZeroCertificate cert;
  int failing_index = -1;
  std::string failing_label;
  Expr failing_expr;
  bool ok() const { return cert.ok(); }
};

ResidualCheck certify_all(const std::vector<std::pair<std::string, Expr>>& residuals,
                          const std::vector<std::string>& symbol_order,
                          const std::vector<DomainConstraint>& constraints,
                          const ZeroTestConfig& cfg);

/// Sampled sign information for an expression over the domain.
struct SignSample {
  bool all_positive = false;
  bool all_negative = false;
  double min_value = 0.0;
  double max_value = 0.0;
  int samples = 0;
};

SignSample sample_sign(const Expr& e, const std::vector<std::string>& symbol_order,
                       const std::vector<DomainConstraint>& constraints,
                       const ZeroTestConfig& cfg);

}  // namespace sforge

#endif
