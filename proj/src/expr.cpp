#include "sforge/expr.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>

namespace sforge {

namespace {

std::size_t hash_mix(std::size_t h, std::size_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

std::size_t hash_rational(const Rational& r) {
  return std::hash<std::string>{}(r.str());
}

Expr make_node(Kind kind, Rational value, std::string name, std::vector<Expr> args) {
  auto n = std::make_shared<ExprNode>();
  n->kind = kind;
  n->value = std::move(value);
  n->name = std::move(name);
  n->args = std::move(args);
  std::size_t h = static_cast<std::size_t>(kind) * 0x100000001b3ULL;
  if (kind == Kind::Number || kind == Kind::Pow) h = hash_mix(h, hash_rational(n->value));
  if (kind == Kind::Symbol) h = hash_mix(h, std::hash<std::string>{}(n->name));
  for (const Expr& a : n->args) h = hash_mix(h, a.hash());
  n->hash = h;
  return Expr(std::move(n));
}

const Expr& zero_expr() {
  static const Expr z = make_node(Kind::Number, Rational(0), {}, {});
  return z;
}
const Expr& one_expr() {
  static const Expr o = make_node(Kind::Number, Rational(1), {}, {});
  return o;
}

int kind_rank(Kind k) { return static_cast<int>(k); }

}  // namespace

Expr::Expr() { *this = zero_expr(); }

int compare(const Expr& a, const Expr& b) {
  if (a.same_node(b)) return 0;
  int ra = kind_rank(a.kind()), rb = kind_rank(b.kind());
  if (ra != rb) return ra < rb ? -1 : 1;
  const ExprNode& na = a.node();
  const ExprNode& nb = b.node();
  switch (a.kind()) {
    case Kind::Number:
      return na.value == nb.value ? 0 : (na.value < nb.value ? -1 : 1);
    case Kind::Pi:
      return 0;
    case Kind::Symbol:
      return na.name.compare(nb.name) < 0 ? -1 : (na.name == nb.name ? 0 : 1);
    case Kind::Pow: {
      int c = compare(na.args[0], nb.args[0]);
      if (c != 0) return c;
      return na.value == nb.value ? 0 : (na.value < nb.value ? -1 : 1);
    }
    default: {
      std::size_t n = std::min(na.args.size(), nb.args.size());
      for (std::size_t i = 0; i < n; ++i) {
        int c = compare(na.args[i], nb.args[i]);
        if (c != 0) return c;
      }
      if (na.args.size() != nb.args.size()) return na.args.size() < nb.args.size() ? -1 : 1;
      return 0;
    }
  }
}

bool struct_equal(const Expr& a, const Expr& b) {
  if (a.same_node(b)) return true;
  if (a.hash() != b.hash()) return false;
  return compare(a, b) == 0;
}

Expr num(Rational v) {
  if (v == 0) return zero_expr();
  if (v == 1) return one_expr();
  return make_node(Kind::Number, std::move(v), {}, {});
}
Expr num(long long v) { return num(Rational(v)); }
Expr num(long long numer, long long denom) { return num(Rational(numer) / Rational(denom)); }

Expr sym(const std::string& name) { return make_node(Kind::Symbol, Rational(0), name, {}); }

Expr pi_const() {
  static const Expr p = make_node(Kind::Pi, Rational(0), {}, {});
  return p;
}

namespace {

// (coefficient, core) decomposition of a canonical term. core carries no
// leading numeric factor.
std::pair<Rational, Expr> split_coeff(const Expr& t) {
  if (t.is_number()) return {t.number(), one_expr()};
  if (t.kind() == Kind::Mul && t.node().args[0].is_number()) {
    const auto& args = t.node().args;
    if (args.size() == 2) return {args[0].number(), args[1]};
    std::vector<Expr> rest(args.begin() + 1, args.end());
    return {args[0].number(), make_node(Kind::Mul, Rational(0), {}, std::move(rest))};
  }
  return {Rational(1), t};
}

Expr with_coeff(const Rational& c, const Expr& core) {
  if (c == 0) return zero_expr();
  if (core.is_one()) return num(c);
  if (c == 1) return core;
  std::vector<Expr> args;
  args.push_back(num(c));
  if (core.kind() == Kind::Mul) {
    for (const Expr& f : core.node().args) args.push_back(f);
  } else {
    args.push_back(core);
  }
  return make_node(Kind::Mul, Rational(0), {}, std::move(args));
}

// (base, exponent) view of a canonical factor.
std::pair<Expr, Rational> split_power(const Expr& f) {
  if (f.kind() == Kind::Pow) return {f.node().args[0], f.node().value};
  return {f, Rational(1)};
}

bool leading_negative(const Expr& e) {
  switch (e.kind()) {
    case Kind::Number:
      return e.number() < 0;
    case Kind::Mul:
      return e.node().args[0].is_number() && e.node().args[0].number() < 0;
    case Kind::Add:
      return leading_negative(e.node().args[0]);
    default:
      return false;
  }
}

using TermMap = std::map<Expr, Rational, ExprLess>;

Expr rebuild_add(TermMap& terms, const Rational& constant) {
  std::vector<Expr> out;
  if (constant != 0) out.push_back(num(constant));
  for (const auto& [core, c] : terms) {
    if (c == 0) continue;
    out.push_back(with_coeff(c, core));
  }
  if (out.empty()) return zero_expr();
  if (out.size() == 1) return out[0];
  return make_node(Kind::Add, Rational(0), {}, std::move(out));
}

}  // namespace

Expr add(std::vector<Expr> terms) {
  TermMap map;
  Rational constant(0);
  std::vector<Expr> queue = std::move(terms);
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    const Expr t = queue[qi];
    if (t.kind() == Kind::Add) {
      for (const Expr& s : t.node().args) queue.push_back(s);
      continue;
    }
    if (t.is_number()) {
      constant += t.number();
      continue;
    }
    auto [c, core] = split_coeff(t);
    map[core] += c;
  }
  return rebuild_add(map, constant);
}

Expr add(const Expr& a, const Expr& b) { return add(std::vector<Expr>{a, b}); }
Expr sub(const Expr& a, const Expr& b) { return add(a, neg(b)); }
Expr neg(const Expr& a) { return mul(num(-1), a); }

namespace {

struct FactorAccumulator {
  Rational coeff{1};
  std::map<Expr, Rational, ExprLess> powers;  // base -> exponent
  std::vector<Expr> exp_args;                 // arguments of exp factors
  bool zero = false;

  void push(const Expr& f);
  Expr build();
};

Expr pow_number(const Rational& b, const Rational& e);

void FactorAccumulator::push(const Expr& f) {
  if (zero) return;
  if (f.is_zero()) {
    zero = true;
    return;
  }
  if (f.is_number()) {
    coeff *= f.number();
    return;
  }
  if (f.kind() == Kind::Exp) {
    exp_args.push_back(f.node().args[0]);
    return;
  }
  auto [base, expo] = split_power(f);
  powers[base] += expo;
}

Expr FactorAccumulator::build() {
  if (zero || coeff == 0) return zero_expr();
  std::vector<Expr> factors;
  std::vector<Expr> sums;  // sum factors left to distribute
  bool remix = false;      // a fold changed shape; run the full pipeline again
  for (const auto& [base, expo] : powers) {
    if (expo == 0) continue;
    // first-power sum factors multiply out; any other power of a sum stays
    // atomic so quotient chains cancel through the exponent sum
    if (base.kind() == Kind::Add && expo == 1) {
      sums.push_back(base);
      continue;
    }
    Expr p = pow(base, expo);
    if (p.is_zero()) return zero_expr();
    if (p.is_one()) continue;
    if (p.is_number()) {
      coeff *= p.number();
      continue;
    }
    bool plain = p.kind() == Kind::Pow
                     ? (struct_equal(p.node().args[0], base) && p.node().value == expo)
                     : (expo == 1 && struct_equal(p, base) && p.kind() != Kind::Add);
    if (!plain) remix = true;
    factors.push_back(p);
  }
  if (!exp_args.empty()) {
    Expr e = exp_e(add(exp_args));
    if (e.is_number()) {
      coeff *= e.number();
    } else if (!e.is_one()) {
      if (e.kind() != Kind::Exp) remix = true;
      factors.push_back(e);
    }
  }
  if (remix) {
    factors.push_back(num(coeff));
    for (Expr& s : sums) factors.push_back(std::move(s));
    return mul(std::move(factors));
  }
  std::sort(factors.begin(), factors.end(), ExprLess{});
  Expr atomic;
  if (factors.empty()) {
    atomic = num(coeff);
  } else if (coeff == 1 && factors.size() == 1) {
    atomic = factors[0];
  } else {
    std::vector<Expr> out;
    if (coeff != 1) out.push_back(num(coeff));
    for (Expr& f : factors) out.push_back(std::move(f));
    atomic = out.size() == 1 ? out[0] : make_node(Kind::Mul, Rational(0), {}, std::move(out));
  }
  if (sums.empty()) return atomic;
  std::vector<Expr> terms{atomic};
  for (const Expr& s : sums) {
    std::vector<Expr> next;
    next.reserve(terms.size() * s.node().args.size());
    for (const Expr& t : terms)
      for (const Expr& u : s.node().args) next.push_back(mul(t, u));
    terms = std::move(next);
  }
  return add(std::move(terms));
}

}  // namespace

Expr mul(std::vector<Expr> factors) {
  std::vector<Expr> flat;
  std::vector<Expr> queue = std::move(factors);
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    const Expr f = queue[qi];
    if (f.kind() == Kind::Mul) {
      for (const Expr& s : f.node().args) queue.push_back(s);
      continue;
    }
    if (f.is_zero()) return zero_expr();
    flat.push_back(f);
  }
  FactorAccumulator acc;
  for (const Expr& f : flat) acc.push(f);
  return acc.build();
}

Expr mul(const Expr& a, const Expr& b) { return mul(std::vector<Expr>{a, b}); }

Expr div(const Expr& a, const Expr& b) { return mul(a, pow(b, Rational(-1))); }

namespace {

// exact n-th root of a nonnegative integer, when it exists
bool integer_root(const boost::multiprecision::cpp_int& v, unsigned n,
                  boost::multiprecision::cpp_int& out) {
  if (v < 0) return false;
  if (v == 0 || v == 1) {
    out = v;
    return true;
  }
  boost::multiprecision::cpp_int lo = 1, hi = v;
  while (lo < hi) {
    boost::multiprecision::cpp_int mid = (lo + hi + 1) / 2;
    boost::multiprecision::cpp_int p = 1;
    bool over = false;
    for (unsigned i = 0; i < n; ++i) {
      p *= mid;
      if (p > v) {
        over = true;
        break;
      }
    }
    if (over)
      hi = mid - 1;
    else
      lo = mid;
  }
  boost::multiprecision::cpp_int p = 1;
  for (unsigned i = 0; i < n; ++i) p *= lo;
  if (p == v) {
    out = lo;
    return true;
  }
  return false;
}

Expr pow_number(const Rational& b, const Rational& e) {
  using boost::multiprecision::cpp_int;
  cpp_int en = numerator(e), ed = denominator(e);
  if (ed == 1) {
    // exact integer power
    cpp_int n = numerator(b), d = denominator(b);
    bool negexp = en < 0;
    cpp_int k = negexp ? -en : en;
    if (negexp && n == 0) throw EvalError("zero raised to a negative power");
    if (k > 4096) throw EvalError("integer exponent too large");
    cpp_int pn = 1, pd = 1;
    for (cpp_int i = 0; i < k; ++i) {
      pn *= n;
      pd *= d;
    }
    if (negexp && pn < 0) {
      pn = -pn;
      pd = -pd;
    }
    Rational r = negexp ? Rational(pd, pn) : Rational(pn, pd);
    return num(r);
  }
  if (b == 0) {
    if (e < 0) throw EvalError("zero raised to a negative power");
    return zero_expr();
  }
  // rational exponent p/q: fold only when base is an exact q-th power
  if (b > 0 && ed.convert_to<long long>() <= 64) {
    unsigned q = ed.convert_to<unsigned>();
    cpp_int rn, rd;
    if (integer_root(numerator(b), q, rn) && integer_root(denominator(b), q, rd)) {
      return pow_number(Rational(rn, rd), Rational(en));
    }
  }
  return make_node(Kind::Pow, e, {}, {num(b)});
}

}  // namespace

Expr pow(const Expr& base, const Rational& exponent) {
  if (exponent == 0) return one_expr();
  if (exponent == 1) return base;
  if (base.is_number()) return pow_number(base.number(), exponent);
  if (base.kind() == Kind::Exp) return exp_e(mul(num(exponent), base.node().args[0]));
  const bool int_exp = denominator(exponent) == 1;
  if (base.kind() == Kind::Cos && int_exp && exponent >= 2 && exponent <= 16) {
    // cos^(2m+r) = (1 - sin^2)^m cos^r, multiplied out: even trig content is
    // expressed through sin, which is what makes sums over squared frame
    // components collapse
    long long k = exponent.convert_to<long long>();
    Expr s2 = sub(num(1), pow(sin_e(base.node().args[0]), Rational(2)));
    Expr out = num(1);
    for (long long i = 0; i < k / 2; ++i) out = mul(out, s2);
    if (k % 2) out = mul(out, base);
    return out;
  }
  if (base.kind() == Kind::Pow && int_exp) {
    return pow(base.node().args[0], base.node().value * exponent);
  }
  if (base.kind() == Kind::Mul && int_exp) {
    std::vector<Expr> fs;
    for (const Expr& f : base.node().args) fs.push_back(pow(f, exponent));
    return mul(std::move(fs));
  }
  // powers of sums stay atomic; products of sums distribute instead. This
  // keeps quotient chains like (s+t)^2 * (s+t)^(-3) collapsing exactly.
  return make_node(Kind::Pow, exponent, {}, {base});
}

Expr pow_general(const Expr& base, const Expr& exponent) {
  if (exponent.is_number()) return pow(base, exponent.number());
  if (base.kind() == Kind::Exp) return exp_e(mul(base.node().args[0], exponent));
  // real-valued b^x with symbolic x requires b > 0; rewrite through exp/ln
  return exp_e(mul(exponent, ln_e(base)));
}

Expr exp_e(const Expr& arg) {
  if (arg.is_zero()) return one_expr();
  if (arg.kind() == Kind::Ln) return arg.node().args[0];
  // peel rational multiples of logarithms: exp(k*ln u + r) = u^k * exp(r)
  std::vector<Expr> terms;
  if (arg.kind() == Kind::Add)
    terms = arg.node().args;
  else
    terms.push_back(arg);
  std::vector<Expr> pows;
  std::vector<Expr> rest;
  for (const Expr& t : terms) {
    auto [c, core] = split_coeff(t);
    if (core.kind() == Kind::Ln) {
      pows.push_back(pow(core.node().args[0], c));
    } else {
      rest.push_back(t);
    }
  }
  if (pows.empty()) return make_node(Kind::Exp, Rational(0), {}, {arg});
  if (!rest.empty()) {
    Expr r = add(std::move(rest));
    if (!r.is_zero()) pows.push_back(make_node(Kind::Exp, Rational(0), {}, {r}));
  }
  return mul(std::move(pows));
}

Expr ln_e(const Expr& arg) {
  if (arg.is_one()) return zero_expr();
  if (arg.kind() == Kind::Exp) return arg.node().args[0];
  return make_node(Kind::Ln, Rational(0), {}, {arg});
}

namespace {

// sin(q*pi) for exact rational q, when the value is in the standard table
bool trig_table(const Rational& q, bool want_sin, Expr& out) {
  // reduce q modulo 2 into [0,2)
  boost::multiprecision::cpp_int whole = numerator(q) / (2 * denominator(q));
  Rational r = q - 2 * Rational(whole);
  while (r < 0) r += 2;
  while (r >= 2) r -= 2;
  auto den = denominator(r);
  if (den != 1 && den != 2 && den != 3 && den != 4 && den != 6) return false;
  // value of sin(r*pi) via quadrant reduction
  Rational x = r;  // in [0,2)
  int sign = 1;
  if (!want_sin) {
    // cos(x*pi) = sin((x + 1/2)*pi)
    x += Rational(1, 2);
    if (x >= 2) x -= 2;
  }
  if (x >= 1) {
    x -= 1;
    sign = -1;
  }
  if (x > Rational(1, 2)) x = 1 - x;
  Expr v;
  if (x == 0)
    v = num(0);
  else if (x == Rational(1, 2))
    v = num(1);
  else if (x == Rational(1, 6))
    v = num(1, 2);
  else if (x == Rational(1, 4))
    v = mul(num(1, 2), pow(num(2), Rational(1, 2)));
  else if (x == Rational(1, 3))
    v = mul(num(1, 2), pow(num(3), Rational(1, 2)));
  else
    return false;
  out = sign < 0 ? neg(v) : v;
  return true;
}

// exact rational q with arg == q*pi, if of that shape
bool pi_multiple(const Expr& arg, Rational& q) {
  if (arg.kind() == Kind::Pi) {
    q = 1;
    return true;
  }
  if (arg.is_zero()) {
    q = 0;
    return true;
  }
  if (arg.kind() == Kind::Mul && arg.node().args.size() == 2 &&
      arg.node().args[0].is_number() && arg.node().args[1].kind() == Kind::Pi) {
    q = arg.node().args[0].number();
    return true;
  }
  return false;
}

}  // namespace

Expr sin_e(const Expr& arg) {
  if (arg.is_zero()) return zero_expr();
  Rational q;
  if (pi_multiple(arg, q)) {
    Expr v;
    if (trig_table(q, true, v)) return v;
  }
  if (leading_negative(arg)) return neg(sin_e(neg(arg)));
  return make_node(Kind::Sin, Rational(0), {}, {arg});
}

Expr cos_e(const Expr& arg) {
  if (arg.is_zero()) return one_expr();
  Rational q;
  if (pi_multiple(arg, q)) {
    Expr v;
    if (trig_table(q, false, v)) return v;
  }
  if (leading_negative(arg)) return cos_e(neg(arg));
  return make_node(Kind::Cos, Rational(0), {}, {arg});
}

Expr tan_e(const Expr& arg) {
  if (arg.is_zero()) return zero_expr();
  Rational q;
  if (pi_multiple(arg, q)) {
    Expr s, c;
    if (trig_table(q, true, s) && trig_table(q, false, c) && !c.is_zero()) return div(s, c);
  }
  if (leading_negative(arg)) return neg(tan_e(neg(arg)));
  return make_node(Kind::Tan, Rational(0), {}, {arg});
}

Expr sqrt_e(const Expr& arg) { return pow(arg, Rational(1, 2)); }

Expr simplify(const Expr& e) {
  switch (e.kind()) {
    case Kind::Number:
    case Kind::Pi:
    case Kind::Symbol:
      return e;
    case Kind::Pow:
      return pow(simplify(e.node().args[0]), e.node().value);
    case Kind::Exp:
      return exp_e(simplify(e.node().args[0]));
    case Kind::Ln:
      return ln_e(simplify(e.node().args[0]));
    case Kind::Sin:
      return sin_e(simplify(e.node().args[0]));
    case Kind::Cos:
      return cos_e(simplify(e.node().args[0]));
    case Kind::Tan:
      return tan_e(simplify(e.node().args[0]));
    case Kind::Mul: {
      std::vector<Expr> fs;
      for (const Expr& f : e.node().args) fs.push_back(simplify(f));
      return mul(std::move(fs));
    }
    case Kind::Add: {
      std::vector<Expr> ts;
      for (const Expr& t : e.node().args) ts.push_back(simplify(t));
      return add(std::move(ts));
    }
  }
  return e;
}

Expr differentiate(const Expr& e, const std::string& s) {
  switch (e.kind()) {
    case Kind::Number:
    case Kind::Pi:
      return num(0);
    case Kind::Symbol:
      return e.node().name == s ? num(1) : num(0);
    case Kind::Add: {
      std::vector<Expr> ts;
      for (const Expr& t : e.node().args) ts.push_back(differentiate(t, s));
      return add(std::move(ts));
    }
    case Kind::Mul: {
      const auto& fs = e.node().args;
      std::vector<Expr> terms;
      for (std::size_t i = 0; i < fs.size(); ++i) {
        std::vector<Expr> prod;
        prod.push_back(differentiate(fs[i], s));
        for (std::size_t j = 0; j < fs.size(); ++j)
          if (j != i) prod.push_back(fs[j]);
        terms.push_back(mul(std::move(prod)));
      }
      return add(std::move(terms));
    }
    case Kind::Pow: {
      const Expr& b = e.node().args[0];
      const Rational& r = e.node().value;
      return mul({num(r), pow(b, r - 1), differentiate(b, s)});
    }
    case Kind::Exp:
      return mul(e, differentiate(e.node().args[0], s));
    case Kind::Ln:
      return div(differentiate(e.node().args[0], s), e.node().args[0]);
    case Kind::Sin:
      return mul(cos_e(e.node().args[0]), differentiate(e.node().args[0], s));
    case Kind::Cos:
      return neg(mul(sin_e(e.node().args[0]), differentiate(e.node().args[0], s)));
    case Kind::Tan: {
      // d tan u = (1 + tan^2 u) du
      Expr t = tan_e(e.node().args[0]);
      return mul(add(num(1), mul(t, t)), differentiate(e.node().args[0], s));
    }
  }
  return num(0);
}

Expr substitute(const Expr& e, const std::map<std::string, Expr>& bindings) {
  switch (e.kind()) {
    case Kind::Number:
    case Kind::Pi:
      return e;
    case Kind::Symbol: {
      auto it = bindings.find(e.node().name);
      return it == bindings.end() ? e : it->second;
    }
    case Kind::Pow:
      return pow(substitute(e.node().args[0], bindings), e.node().value);
    case Kind::Exp:
      return exp_e(substitute(e.node().args[0], bindings));
    case Kind::Ln:
      return ln_e(substitute(e.node().args[0], bindings));
    case Kind::Sin:
      return sin_e(substitute(e.node().args[0], bindings));
    case Kind::Cos:
      return cos_e(substitute(e.node().args[0], bindings));
    case Kind::Tan:
      return tan_e(substitute(e.node().args[0], bindings));
    case Kind::Mul: {
      std::vector<Expr> fs;
      for (const Expr& f : e.node().args) fs.push_back(substitute(f, bindings));
      return mul(std::move(fs));
    }
    case Kind::Add: {
      std::vector<Expr> ts;
      for (const Expr& t : e.node().args) ts.push_back(substitute(t, bindings));
      return add(std::move(ts));
    }
  }
  return e;
}

void collect_symbols(const Expr& e, std::set<std::string>& out) {
  if (e.kind() == Kind::Symbol) {
    out.insert(e.node().name);
    return;
  }
  for (const Expr& a : e.node().args) collect_symbols(a, out);
}

std::set<std::string> free_symbols(const Expr& e) {
  std::set<std::string> out;
  collect_symbols(e, out);
  return out;
}

namespace {

void print_expr(const Expr& e, std::string& out, int parent_prec);

void print_number(const Rational& r, std::string& out, int parent_prec) {
  bool needs_paren = (r < 0 && parent_prec >= 2) || (denominator(r) != 1 && parent_prec >= 3);
  if (needs_paren) out += '(';
  out += numerator(r).str();
  if (denominator(r) != 1) {
    out += '/';
    out += denominator(r).str();
  }
  if (needs_paren) out += ')';
}

// precedence levels: 1 sum, 2 product, 3 power/unary
void print_expr(const Expr& e, std::string& out, int parent_prec) {
  switch (e.kind()) {
    case Kind::Number:
      print_number(e.number(), out, parent_prec);
      return;
    case Kind::Pi:
      out += "pi";
      return;
    case Kind::Symbol:
      out += e.node().name;
      return;
    case Kind::Add: {
      if (parent_prec >= 2) out += '(';
      bool first = true;
      for (const Expr& t : e.node().args) {
        if (!first && leading_negative(t)) {
          out += " - ";
          print_expr(neg(t), out, 1);
        } else {
          if (!first) out += " + ";
          print_expr(t, out, 1);
        }
        first = false;
      }
      if (parent_prec >= 2) out += ')';
      return;
    }
    case Kind::Mul: {
      const auto& fs = e.node().args;
      std::size_t start = 0;
      bool neg_one = fs[0].is_number() && fs[0].number() == -1 && fs.size() > 1;
      bool wrapped = parent_prec >= (neg_one ? 2 : 3);
      if (wrapped) out += '(';
      if (neg_one) {
        out += '-';
        start = 1;
      }
      bool first = true;
      for (std::size_t i = start; i < fs.size(); ++i) {
        if (!first) out += '*';
        print_expr(fs[i], out, 2);
        first = false;
      }
      if (wrapped) out += ')';
      return;
    }
    case Kind::Pow: {
      if (parent_prec >= 3) out += '(';
      print_expr(e.node().args[0], out, 3);
      out += '^';
      const Rational& r = e.node().value;
      if (denominator(r) == 1 && r > 0) {
        out += numerator(r).str();
      } else {
        out += '(';
        print_number(r, out, 0);
        out += ')';
      }
      if (parent_prec >= 3) out += ')';
      return;
    }
    case Kind::Exp:
    case Kind::Ln:
    case Kind::Sin:
    case Kind::Cos:
    case Kind::Tan: {
      switch (e.kind()) {
        case Kind::Exp: out += "exp("; break;
        case Kind::Ln: out += "ln("; break;
        case Kind::Sin: out += "sin("; break;
        case Kind::Cos: out += "cos("; break;
        default: out += "tan("; break;
      }
      print_expr(e.node().args[0], out, 0);
      out += ')';
      return;
    }
  }
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string out;
  print_expr(e, out, 0);
  return out;
}

double rational_to_double(const Rational& r) { return r.convert_to<double>(); }

double evaluate(const Expr& e, const std::map<std::string, double>& point) {
  switch (e.kind()) {
    case Kind::Number:
      return rational_to_double(e.number());
    case Kind::Pi:
      return 3.141592653589793238462643383279502884;
    case Kind::Symbol: {
      auto it = point.find(e.node().name);
      if (it == point.end()) throw EvalError("unbound symbol '" + e.node().name + "'");
      return it->second;
    }
    case Kind::Add: {
      double s = 0;
      for (const Expr& t : e.node().args) s += evaluate(t, point);
      return s;
    }
    case Kind::Mul: {
      double p = 1;
      for (const Expr& f : e.node().args) p *= evaluate(f, point);
      return p;
    }
    case Kind::Pow: {
      double b = evaluate(e.node().args[0], point);
      const Rational& r = e.node().value;
      if (denominator(r) == 1) {
        long long k = numerator(r).convert_to<long long>();
        if (b == 0.0 && k < 0) throw EvalError("division by zero");
        return std::pow(b, static_cast<double>(k));
      }
      double x = rational_to_double(r);
      if (b == 0.0 && x < 0) throw EvalError("division by zero");
      if (b < 0) {
        if (denominator(r) % 2 == 1) {
          double v = std::pow(-b, x);
          return numerator(r) % 2 == 0 ? v : -v;
        }
        throw EvalError("even root of a negative value");
      }
      return std::pow(b, x);
    }
    case Kind::Exp:
      return std::exp(evaluate(e.node().args[0], point));
    case Kind::Ln: {
      double a = evaluate(e.node().args[0], point);
      if (a <= 0) throw EvalError("logarithm of a nonpositive value");
      return std::log(a);
    }
    case Kind::Sin:
      return std::sin(evaluate(e.node().args[0], point));
    case Kind::Cos:
      return std::cos(evaluate(e.node().args[0], point));
    case Kind::Tan: {
      double a = evaluate(e.node().args[0], point);
      double c = std::cos(a);
      if (c == 0) throw EvalError("tangent pole");
      return std::tan(a);
    }
  }
  throw EvalError("unreachable expression kind");
}

}  // namespace sforge
