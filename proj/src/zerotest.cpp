#include "sforge/zerotest.hpp"

#include <algorithm>
#include <cmath>

namespace sforge {

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::SymbolicZero: return "symbolic-zero";
    case Verdict::NumericZero: return "numeric-zero";
    case Verdict::Nonzero: return "nonzero";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

Sampler::Sampler(std::vector<std::string> symbols, std::vector<DomainConstraint> constraints,
                 std::uint64_t seed)
    : symbols_(std::move(symbols)), constraints_(std::move(constraints)), state_(seed) {
  if (state_ == 0) state_ = 0x5EED;
}

// splitmix64; fixed here so sampled points do not depend on the platform's
// standard library distributions
double Sampler::next_unit() {
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z = z ^ (z >> 31);
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

std::map<std::string, double> Sampler::next() {
  for (int attempt = 0; attempt < 512; ++attempt) {
    std::map<std::string, double> point;
    bool ok = true;
    for (const std::string& s : symbols_) {
      bool strictly_positive = false;
      for (const auto& c : constraints_) {
        if (c.symbol != s || c.rel != DomainConstraint::Rel::Greater) continue;
        if (c.bound.is_number() && c.bound.number() >= 0) strictly_positive = true;
      }
      bool found = false;
      for (int tries = 0; tries < 128 && !found; ++tries) {
        double v;
        if (strictly_positive) {
          v = std::pow(10.0, -1.0 + 2.0 * next_unit());  // log-uniform over (0.1, 10)
        } else {
          v = -5.0 + 10.0 * next_unit();
        }
        found = true;
        for (const auto& c : constraints_) {
          if (c.symbol != s) continue;
          double b;
          try {
            b = evaluate(c.bound, point);
          } catch (const EvalError&) {
            found = false;
            break;
          }
          switch (c.rel) {
            case DomainConstraint::Rel::Greater:
              if (!(v > b + 1e-9)) found = false;
              break;
            case DomainConstraint::Rel::Less:
              if (!(v < b - 1e-9)) found = false;
              break;
            case DomainConstraint::Rel::NonZero:
              if (std::abs(v - b) < 1e-6 * std::max(1.0, std::abs(b))) found = false;
              break;
          }
          if (!found) break;
        }
        if (found) point[s] = v;
      }
      if (!found) {
        ok = false;
        break;
      }
    }
    if (ok) return point;
  }
  throw EvalError("rejection sampling failed to find an in-domain point");
}

namespace {

// magnitude proxy used for the relative tolerance: sum of absolute values of
// the top-level terms at the sample point
double scale_at(const Expr& e, const std::map<std::string, double>& point) {
  if (e.kind() == Kind::Add) {
    double s = 0;
    for (const Expr& t : e.node().args) s += std::abs(evaluate(t, point));
    return s;
  }
  return std::abs(evaluate(e, point));
}

}  // namespace

ZeroCertificate certify_zero(const Expr& e, const std::vector<std::string>& symbol_order,
                             const std::vector<DomainConstraint>& constraints,
                             const ZeroTestConfig& cfg) {
  ZeroCertificate cert;
  cert.tol = cfg.tol;
  Expr s = simplify(e);
  if (s.is_zero()) {
    cert.verdict = Verdict::SymbolicZero;
    return cert;
  }
  if (s.is_number()) {
    cert.verdict = Verdict::Nonzero;
    cert.max_abs = std::abs(rational_to_double(s.number()));
    cert.note = "nonzero rational constant";
    return cert;
  }
  std::vector<std::string> order = symbol_order;
  std::set<std::string> free = free_symbols(s);
  for (const std::string& f : free)
    if (std::find(order.begin(), order.end(), f) == order.end()) order.push_back(f);
  // drop symbols the expression does not mention, keeping ones constraints need
  Sampler sampler(order, constraints, cfg.seed);
  bool all_small = true;
  bool any_large = false;
  int produced = 0;
  int failures = 0;
  while (produced < cfg.samples && failures < 8 * cfg.samples + 64) {
    std::map<std::string, double> point;
    double v, sc;
    try {
      point = sampler.next();
      v = evaluate(s, point);
      sc = scale_at(s, point);
    } catch (const EvalError& err) {
      ++failures;
      cert.note = std::string("evaluation failure during sampling: ") + err.what();
      continue;
    }
    if (!std::isfinite(v) || !std::isfinite(sc)) {
      ++failures;
      cert.note = "non-finite value during sampling";
      continue;
    }
    ++produced;
    double ref = cfg.tol * std::max(1.0, sc);
    cert.max_abs = std::max(cert.max_abs, std::abs(v));
    if (std::abs(v) >= ref) all_small = false;
    if (std::abs(v) >= 1e3 * ref) any_large = true;
  }
  cert.samples = produced;
  if (produced < cfg.samples) {
    cert.verdict = Verdict::Inconclusive;
    if (cert.note.empty()) cert.note = "insufficient in-domain samples";
    return cert;
  }
  if (all_small)
    cert.verdict = Verdict::NumericZero;
  else if (any_large)
    cert.verdict = Verdict::Nonzero;
  else
    cert.verdict = Verdict::Inconclusive;
  return cert;
}

ZeroCertificate certify_zero(const Expr& e, const std::vector<DomainConstraint>& constraints,
                             const ZeroTestConfig& cfg) {
  std::set<std::string> free = free_symbols(e);
  return certify_zero(e, std::vector<std::string>(free.begin(), free.end()), constraints, cfg);
}

ResidualCheck certify_all(const std::vector<std::pair<std::string, Expr>>& residuals,
                          const std::vector<std::string>& symbol_order,
                          const std::vector<DomainConstraint>& constraints,
                          const ZeroTestConfig& cfg) {
  ResidualCheck out;
  out.cert.verdict = Verdict::SymbolicZero;
  out.cert.tol = cfg.tol;
  bool any_numeric = false;
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    ZeroCertificate c = certify_zero(residuals[i].second, symbol_order, constraints, cfg);
    out.cert.max_abs = std::max(out.cert.max_abs, c.max_abs);
    out.cert.samples = std::max(out.cert.samples, c.samples);
    if (c.verdict == Verdict::NumericZero) any_numeric = true;
    if (!c.ok()) {
      out.cert.verdict = c.verdict;
      out.cert.note = c.note;
      out.failing_index = static_cast<int>(i);
      out.failing_label = residuals[i].first;
      out.failing_expr = simplify(residuals[i].second);
      return out;
    }
  }
  if (any_numeric) out.cert.verdict = Verdict::NumericZero;
  return out;
}

SignSample sample_sign(const Expr& e, const std::vector<std::string>& symbol_order,
                       const std::vector<DomainConstraint>& constraints,
                       const ZeroTestConfig& cfg) {
  SignSample out;
  Expr s = simplify(e);
  std::vector<std::string> order = symbol_order;
  std::set<std::string> free = free_symbols(s);
  for (const std::string& f : free)
    if (std::find(order.begin(), order.end(), f) == order.end()) order.push_back(f);
  Sampler sampler(order, constraints, cfg.seed);
  out.all_positive = true;
  out.all_negative = true;
  for (int i = 0; i < cfg.samples; ++i) {
    double v;
    try {
      v = evaluate(s, sampler.next());
    } catch (const EvalError&) {
      continue;
    }
    if (!std::isfinite(v)) continue;
    if (out.samples == 0) {
      out.min_value = out.max_value = v;
    } else {
      out.min_value = std::min(out.min_value, v);
      out.max_value = std::max(out.max_value, v);
    }
    ++out.samples;
    if (v <= 0) out.all_positive = false;
    if (v >= 0) out.all_negative = false;
  }
  if (out.samples == 0) {
    out.all_positive = false;
    out.all_negative = false;
  }
  return out;
}

}  // namespace sforge
