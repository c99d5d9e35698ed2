#ifndef SFORGE_TEST_FIXTURES_HPP
#define SFORGE_TEST_FIXTURES_HPP

#include "sforge/geometry.hpp"
#include "sforge/parse.hpp"

namespace fixtures {

using namespace sforge;

inline ZeroTestConfig cfg() { return {}; }

inline Expr P(const std::string& s, const Chart& c) {
  std::set<std::string> allowed(c.coords.begin(), c.coords.end());
  allowed.insert(c.params.begin(), c.params.end());
  return parse_expression(s, allowed);
}

inline Metric hyperbolic() {
  auto c = std::make_shared<Chart>();
  c->name = "hyperbolic";
  c->coords = {"x", "y", "z"};
  c->constraints = {{"z", DomainConstraint::Rel::Greater, num(0)}};
  Mat g = zero_mat(3);
  for (int i = 0; i < 3; ++i) g[i][i] = P("1/z^2", *c);
  return Metric::build(c, g, cfg());
}

inline Metric lorentz() {
  auto c = std::make_shared<Chart>();
  c->name = "lorentz";
  c->coords = {"x", "y", "z"};
  Mat g = zero_mat(3);
  g[0][0] = P("e^(-2*z)", *c);
  g[1][1] = P("e^(2*x-2*z)", *c);
  g[2][2] = num(-1);
  return Metric::build(c, g, cfg());
}

inline Metric euclidean3() {
  auto c = std::make_shared<Chart>();
  c->name = "euclidean";
  c->coords = {"x", "y", "z"};
  Mat g = zero_mat(3);
  for (int i = 0; i < 3; ++i) g[i][i] = num(1);
  return Metric::build(c, g, cfg());
}

inline Metric euclidean2() {
  auto c = std::make_shared<Chart>();
  c->name = "plane";
  c->coords = {"x", "y"};
  Mat g = zero_mat(2);
  g[0][0] = num(1);
  g[1][1] = num(1);
  return Metric::build(c, g, cfg());
}

inline Metric spherical_flat() {
  auto c = std::make_shared<Chart>();
  c->name = "spherical";
  c->coords = {"s", "th", "ph"};
  c->constraints = {{"s", DomainConstraint::Rel::Greater, num(0)},
                    {"th", DomainConstraint::Rel::Greater, num(0)},
                    {"th", DomainConstraint::Rel::Less, pi_const()}};
  Mat g = zero_mat(3);
  g[0][0] = num(1);
  g[1][1] = P("s^2", *c);
  g[2][2] = P("s^2*sin(th)^2", *c);
  return Metric::build(c, g, cfg());
}

/// Twisted-product instance carrying a torqued soliton: coordinates (s,t,w)
/// on {s < 0, t < -s}, g = ds^2 + 4 (s+t)^-2 (dt^2 + dw^2),
/// V = -2/(s+t) d/ds. Then a = 2 (s+t)^-2, psi = -dt/(s+t), psi(V) = 0, and
/// (V, -1/4 - (s+t)^-2, (s+t)^2/16 - 1/4) solves the eta-Ricci equation with
/// eta the g-dual of V.
inline Metric twisted_torqued() {
  auto c = std::make_shared<Chart>();
  c->name = "twisted";
  c->coords = {"s", "t", "w"};
  c->constraints = {{"s", DomainConstraint::Rel::Less, num(0)},
                    {"t", DomainConstraint::Rel::Less, P("-s", Chart{"", {"s"}, {}, {}})}};
  Mat g = zero_mat(3);
  g[0][0] = num(1);
  g[1][1] = P("4*(s+t)^(-2)", *c);
  g[2][2] = P("4*(s+t)^(-2)", *c);
  return Metric::build(c, g, cfg());
}

inline Vec position_field(const Metric& m) {
  Vec v = zero_vec(m.dim());
  for (int i = 0; i < m.dim(); ++i) v[i] = sym(m.chart().coords[i]);
  return v;
}

}  // namespace fixtures

#endif
