#ifndef SFORGE_EXPR_HPP
#define SFORGE_EXPR_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace sforge {

using Rational = boost::multiprecision::cpp_rational;

/// Node taxonomy of the expression tree. Sums and products are n-ary and
/// flattened; powers carry an exact rational exponent.
enum class Kind : unsigned char {
  Number,
  Pi,
  Symbol,
  Pow,
  Exp,
  Ln,
  Sin,
  Cos,
  Tan,
  Mul,
  Add,
};

class Expr;

struct ExprNode {
  Kind kind;
  Rational value;          // Number payload, or Pow exponent
  std::string name;        // Symbol payload
  std::vector<Expr> args;  // Add/Mul children, Pow base, function argument
  std::size_t hash = 0;
};

/// Immutable, canonical-by-construction symbolic expression. Copies are
/// cheap shared references; all operations return new values.
class Expr {
 public:
  Expr();  // the constant 0
  explicit Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}

  const ExprNode& node() const { return *node_; }
  Kind kind() const { return node_->kind; }
  std::size_t hash() const { return node_->hash; }

  bool is_number() const { return node_->kind == Kind::Number; }
  const Rational& number() const { return node_->value; }
  bool is_zero() const { return is_number() && node_->value == 0; }
  bool is_one() const { return is_number() && node_->value == 1; }
  bool same_node(const Expr& o) const { return node_ == o.node_; }

 private:
  std::shared_ptr<const ExprNode> node_;
};

// Canonicalizing factories. Arguments are assumed canonical (as produced by
// these same functions); results are canonical.
Expr num(Rational v);
Expr num(long long v);
Expr num(long long numer, long long denom);
Expr sym(const std::string& name);
Expr pi_const();
Expr add(std::vector<Expr> terms);
Expr add(const Expr& a, const Expr& b);
Expr sub(const Expr& a, const Expr& b);
Expr neg(const Expr& a);
Expr mul(std::vector<Expr> factors);
Expr mul(const Expr& a, const Expr& b);
Expr div(const Expr& a, const Expr& b);
Expr pow(const Expr& base, const Rational& exponent);
Expr pow_general(const Expr& base, const Expr& exponent);
Expr exp_e(const Expr& arg);
Expr ln_e(const Expr& arg);
Expr sin_e(const Expr& arg);
Expr cos_e(const Expr& arg);
Expr tan_e(const Expr& arg);
Expr sqrt_e(const Expr& arg);

inline Expr operator+(const Expr& a, const Expr& b) { return add(a, b); }
inline Expr operator-(const Expr& a, const Expr& b) { return sub(a, b); }
inline Expr operator-(const Expr& a) { return neg(a); }
inline Expr operator*(const Expr& a, const Expr& b) { return mul(a, b); }
inline Expr operator/(const Expr& a, const Expr& b) { return div(a, b); }

/// Total structural order: <0, 0, >0 like strcmp. Used for canonical
/// sorting and as the key order in maps of expressions.
int compare(const Expr& a, const Expr& b);
bool struct_equal(const Expr& a, const Expr& b);
inline bool operator==(const Expr& a, const Expr& b) { return struct_equal(a, b); }
inline bool operator!=(const Expr& a, const Expr& b) { return !struct_equal(a, b); }

struct ExprLess {
  bool operator()(const Expr& a, const Expr& b) const { return compare(a, b) < 0; }
};

/// Rebuilds the tree through the canonicalizing factories. Idempotent:
/// simplify(simplify(e)) is structurally equal to simplify(e).
Expr simplify(const Expr& e);

/// Exact partial derivative with respect to a symbol, canonical form.
Expr differentiate(const Expr& e, const std::string& symbol);

Expr substitute(const Expr& e, const std::map<std::string, Expr>& bindings);

void collect_symbols(const Expr& e, std::set<std::string>& out);
std::set<std::string> free_symbols(const Expr& e);

std::string to_string(const Expr& e);

struct EvalError : std::runtime_error {
  explicit EvalError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Floating evaluation. Throws EvalError on domain violations (logarithm of
/// a nonpositive value, zero raised to a negative power, even root of a
/// negative value, missing symbol binding).
double evaluate(const Expr& e, const std::map<std::string, double>& point);

double rational_to_double(const Rational& r);

}  // namespace sforge

#endif
