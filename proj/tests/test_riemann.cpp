#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sforge/geometry.hpp"
#include "sforge/parse.hpp"

using namespace sforge;

namespace {

ZeroTestConfig cfg;

ChartPtr chart_xyz(std::vector<DomainConstraint> cons = {}) {
  auto c = std::make_shared<Chart>();
  c->name = "xyz";
  c->coords = {"x", "y", "z"};
  c->constraints = std::move(cons);
  return c;
}

Expr P(const std::string& s, const Chart& c) {
  std::set<std::string> allowed(c.coords.begin(), c.coords.end());
  allowed.insert(c.params.begin(), c.params.end());
  return parse_expression(s, allowed);
}

Metric hyperbolic() {
  auto c = chart_xyz({{"z", DomainConstraint::Rel::Greater, num(0)}});
  Mat g = zero_mat(3);
  for (int i = 0; i < 3; ++i) g[i][i] = P("1/z^2", *c);
  return Metric::build(c, g, cfg);
}

Metric lorentz() {
  auto c = chart_xyz();
  Mat g = zero_mat(3);
  g[0][0] = P("e^(-2*z)", *c);
  g[1][1] = P("e^(2*x-2*z)", *c);
  g[2][2] = num(-1);
  return Metric::build(c, g, cfg);
}

Metric euclidean3() {
  auto c = chart_xyz();
  Mat g = zero_mat(3);
  for (int i = 0; i < 3; ++i) g[i][i] = num(1);
  return Metric::build(c, g, cfg);
}

Metric spherical_flat() {
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
  return Metric::build(c, g, cfg);
}

Metric round_sphere2() {
  auto c = std::make_shared<Chart>();
  c->name = "s2";
  c->coords = {"u", "v"};
  c->constraints = {{"v", DomainConstraint::Rel::Greater, num(0)},
                    {"v", DomainConstraint::Rel::Less, pi_const()}};
  Mat g = zero_mat(2);
  g[0][0] = P("sin(v)^2", *c);
  g[1][1] = num(1);
  return Metric::build(c, g, cfg);
}

bool certify(const Expr& e, const Metric& m) {
  return certify_zero(e, m.chart().symbol_order(), m.chart().constraints, cfg).ok();
}

void check_curvature_properties(const Metric& m) {
  auto gamma = christoffel(m);
  auto R = curvature(m, gamma);
  int n = m.dim();
  const auto& coords = m.chart().coords;

  // torsion-freeness is structural
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) CHECK(gamma.gamma[k][i][j] == gamma.gamma[k][j][i]);

  // metric compatibility: nabla_k g_ij = 0
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Expr nk = differentiate(m.g()[i][j], coords[k]);
        for (int p = 0; p < n; ++p) {
          nk = sub(nk, mul(gamma.gamma[p][k][i], m.g()[p][j]));
          nk = sub(nk, mul(gamma.gamma[p][k][j], m.g()[i][p]));
        }
        CHECK(simplify(nk).is_zero());
      }

  // Riemann antisymmetries, pair symmetry, first Bianchi
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          CHECK(certify(add(R.low[i][j][k][l], R.low[j][i][k][l]), m));
          CHECK(certify(add(R.low[i][j][k][l], R.low[i][j][l][k]), m));
          CHECK(certify(sub(R.low[i][j][k][l], R.low[k][l][i][j]), m));
          CHECK(certify(add(add(R.low[i][j][k][l], R.low[i][k][l][j]), R.low[i][l][j][k]), m));
        }

  // Ricci symmetry
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) CHECK(certify(sub(R.ricci[i][j], R.ricci[j][i]), m));

  // contracted second Bianchi: d scal = 2 div Ric
  Vec divr = divergence_sym2(m, gamma, R.ricci);
  for (int j = 0; j < n; ++j)
    CHECK(certify(sub(differentiate(R.scal, coords[j]), mul(num(2), divr[j])), m));

  // Lie derivative symmetry for a generic field
  Vec v = zero_vec(n);
  v[0] = P("1", m.chart());
  v[n - 1] = m.chart().coords[0] == "x" ? P("x", m.chart()) : P("s", m.chart());
  Mat lie = lie_derivative_metric(m, gamma, v);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) CHECK(lie[i][j] == lie[j][i]);

  // finite-difference oracle
  auto fd = fd_christoffel_check(m, gamma, 16, 1e-5, cfg);
  INFO(fd.note);
  CHECK(fd.pass);
  CHECK(fd.points == 16);
}

}  // namespace

TEST_CASE("euclidean: flat, position field concurrent pieces") {
  Metric m = euclidean3();
  CHECK(m.signature() == Signature::Riemannian);
  auto gamma = christoffel(m);
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) CHECK(gamma.gamma[k][i][j].is_zero());
  auto R = curvature(m, gamma);
  CHECK(R.scal.is_zero());
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(R.ricci[i][j].is_zero());

  Vec pos = {P("x", m.chart()), P("y", m.chart()), P("z", m.chart())};
  Mat dv = covariant_derivative_vector(m, gamma, pos);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(dv[i][j] == (i == j ? num(1) : num(0)));
  // homothety: Lie_P g = 2 g
  Mat lie = lie_derivative_metric(m, gamma, pos);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(lie[i][j] == (i == j ? num(2) : num(0)));
  CHECK(divergence(m, gamma, pos) == num(3));
  // zero field
  Mat lz = lie_derivative_metric(m, gamma, zero_vec(3));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(lz[i][j].is_zero());
}

TEST_CASE("hyperbolic: christoffels, curvature, frames") {
  Metric m = hyperbolic();
  CHECK(m.signature() == Signature::Riemannian);
  auto gamma = christoffel(m);
  const Chart& c = m.chart();
  // x,y,z = 0,1,2
  CHECK(gamma.gamma[0][0][2] == P("-1/z", c));
  CHECK(gamma.gamma[2][0][0] == P("1/z", c));
  CHECK(gamma.gamma[2][2][2] == P("-1/z", c));
  CHECK(gamma.gamma[1][1][2] == P("-1/z", c));
  CHECK(gamma.gamma[2][1][1] == P("1/z", c));
  CHECK(gamma.gamma[0][0][1].is_zero());

  auto R = curvature(m, gamma);
  CHECK(R.scal == num(-6));

  Vec E1 = {P("z", c), num(0), num(0)};
  Vec E2 = {num(0), P("z", c), num(0)};
  Vec E3 = {num(0), num(0), P("-z", c)};

  // orthonormal frame
  CHECK(inner(m, E1, E1) == num(1));
  CHECK(inner(m, E3, E3) == num(1));
  CHECK(inner(m, E1, E3).is_zero());

  // Ric(E_i, E_i) = -2
  for (const Vec& e : {E1, E2, E3}) CHECK(eval_bilinear(R.ricci, e, e) == num(-2));

  // R(E1,E2)E2 = -E1 pins the sign convention
  Vec r122 = curvature_apply(R, E1, E2, E2);
  for (int l = 0; l < 3; ++l) CHECK(certify(add(r122[l], E1[l]), m));
  Vec r133 = curvature_apply(R, E1, E3, E3);
  for (int l = 0; l < 3; ++l) CHECK(certify(add(r133[l], E1[l]), m));

  // bracket table: [E2,E3] = E2, [E3,E1] = -E1, [E1,E2] = 0
  Vec b23 = lie_bracket(c, E2, E3);
  for (int l = 0; l < 3; ++l) CHECK(certify(sub(b23[l], E2[l]), m));
  Vec b31 = lie_bracket(c, E3, E1);
  for (int l = 0; l < 3; ++l) CHECK(certify(add(b31[l], E1[l]), m));
  Vec b12 = lie_bracket(c, E1, E2);
  for (int l = 0; l < 3; ++l) CHECK(b12[l].is_zero());
  Vec bxx = lie_bracket(c, E1, E1);
  for (int l = 0; l < 3; ++l) CHECK(bxx[l].is_zero());

  // connection table via covariant derivative: nabla_{E1} E3 = E1
  Vec V = E3;
  Mat dv = covariant_derivative_vector(m, gamma, V);
  // (nabla_X V)^j = X^i (nabla_i V)^j
  auto nabla_along = [&](const Vec& X) {
    Vec out = zero_vec(3);
    for (int j = 0; j < 3; ++j) {
      Expr acc = num(0);
      for (int i = 0; i < 3; ++i) acc = add(acc, mul(X[i], dv[i][j]));
      out[j] = simplify(acc);
    }
    return out;
  };
  Vec n13 = nabla_along(E1);
  for (int l = 0; l < 3; ++l) CHECK(certify(sub(n13[l], E1[l]), m));
  Vec n33 = nabla_along(E3);
  for (int l = 0; l < 3; ++l) CHECK(n33[l].is_zero());

  // half-Lie frame values: 1/2 (Lie_V g)(E1,E1) = 1, (E3,E3) = 0
  Mat lie = lie_derivative_metric(m, gamma, V);
  CHECK(eval_bilinear(lie, E1, E1) == num(2));
  CHECK(eval_bilinear(lie, E3, E3).is_zero());

  // gradient: grad(-ln z) = -z d/dz = V
  Vec gf = grad(m, P("-ln(z)", c));
  for (int l = 0; l < 3; ++l) CHECK(gf[l] == V[l]);
  // norm: |V|^2 = 1
  CHECK(norm_sq(m, V) == num(1));

  check_curvature_properties(m);
}

TEST_CASE("lorentzian example: signature, curvature, frames") {
  Metric m = lorentz();
  CHECK(m.signature() == Signature::Lorentzian);
  const Chart& c = m.chart();
  auto gamma = christoffel(m);
  auto R = curvature(m, gamma);
  CHECK(R.scal == P("2*(3-e^(2*z))", c));

  Vec E1 = {P("e^z", c), num(0), num(0)};
  Vec E2 = {num(0), P("e^(z-x)", c), num(0)};
  Vec E3 = {num(0), num(0), num(1)};
  CHECK(inner(m, E1, E1) == num(1));
  CHECK(inner(m, E2, E2) == num(1));
  CHECK(inner(m, E3, E3) == num(-1));

  CHECK(eval_bilinear(R.ricci, E1, E1) == P("2-e^(2*z)", c));
  CHECK(eval_bilinear(R.ricci, E2, E2) == P("2-e^(2*z)", c));
  CHECK(eval_bilinear(R.ricci, E3, E3) == num(-2));

  // R(E1,E2)E2 = (1-e^{2z}) E1
  Vec r122 = curvature_apply(R, E1, E2, E2);
  Expr coef = P("1-e^(2*z)", c);
  for (int l = 0; l < 3; ++l) CHECK(certify(sub(r122[l], mul(coef, E1[l])), m));
  Vec r311 = curvature_apply(R, E3, E1, E1);
  for (int l = 0; l < 3; ++l) CHECK(certify(sub(r311[l], E3[l]), m));

  // connection: nabla_{E1} E3 = -E1
  Mat dv = covariant_derivative_vector(m, gamma, E3);
  Vec n13 = zero_vec(3);
  for (int j = 0; j < 3; ++j) {
    Expr acc = num(0);
    for (int i = 0; i < 3; ++i) acc = add(acc, mul(E1[i], dv[i][j]));
    n13[j] = simplify(acc);
  }
  for (int l = 0; l < 3; ++l) CHECK(certify(add(n13[l], E1[l]), m));

  // gradient: grad(-z) = d/dz; indefinite norm is not square-rooted
  Vec gf = grad(m, P("-z", c));
  CHECK(gf[0].is_zero());
  CHECK(gf[1].is_zero());
  CHECK(gf[2] == num(1));
  CHECK(norm_sq(m, E3) == num(-1));

  check_curvature_properties(m);
}

TEST_CASE("spherical chart: christoffels and flatness") {
  Metric m = spherical_flat();
  const Chart& c = m.chart();
  auto gamma = christoffel(m);
  // s,th,ph = 0,1,2
  CHECK(gamma.gamma[1][0][1] == P("1/s", c));
  CHECK(gamma.gamma[0][1][1] == P("-s", c));
  auto R = curvature(m, gamma);
  CHECK(R.scal.is_zero());
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(certify(R.ricci[i][j], m));
  // position field s d/ds is the identity under nabla
  Vec v = {P("s", c), num(0), num(0)};
  Mat dv = covariant_derivative_vector(m, gamma, v);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(certify(sub(dv[i][j], i == j ? num(1) : num(0)), m));
  CHECK(divergence(m, gamma, v) == num(3));
  check_curvature_properties(m);
}

TEST_CASE("convention anchors: round spheres") {
  // unit S^2: scal = n(n-1) = 2
  Metric s2 = round_sphere2();
  auto R2 = curvature(s2, christoffel(s2));
  CHECK(R2.scal == num(2));
  auto cc = constant_curvature(s2, R2, cfg);
  CHECK(cc.certified);
  CHECK(cc.c == num(1));

  // unit S^3 chart: scal = 6, constant curvature 1
  auto c = std::make_shared<Chart>();
  c->name = "s3";
  c->coords = {"a", "b", "c"};
  c->constraints = {{"a", DomainConstraint::Rel::Greater, num(0)},
                    {"a", DomainConstraint::Rel::Less, pi_const()},
                    {"b", DomainConstraint::Rel::Greater, num(0)},
                    {"b", DomainConstraint::Rel::Less, pi_const()}};
  Mat g = zero_mat(3);
  g[0][0] = num(1);
  g[1][1] = P("sin(a)^2", *c);
  g[2][2] = P("sin(a)^2*sin(b)^2", *c);
  Metric s3 = Metric::build(c, g, cfg);
  auto R3 = curvature(s3, christoffel(s3));
  CHECK(R3.scal == num(6));
  auto cc3 = constant_curvature(s3, R3, cfg);
  CHECK(cc3.certified);
  CHECK(cc3.c == num(1));

  // hyperbolic space: constant curvature -1
  Metric h = hyperbolic();
  auto Rh = curvature(h, christoffel(h));
  auto cch = constant_curvature(h, Rh, cfg);
  CHECK(cch.certified);
  CHECK(cch.c == num(-1));

  // the lorentzian example is not constant curvature
  Metric lo = lorentz();
  auto Rl = curvature(lo, christoffel(lo));
  auto ccl = constant_curvature(lo, Rl, cfg);
  CHECK(!ccl.certified);
}

TEST_CASE("weyl tensor: n=4 conformally flat metric vanishes") {
  auto c = std::make_shared<Chart>();
  c->name = "e4conf";
  c->coords = {"x1", "x2", "x3", "x4"};
  c->constraints = {{"x4", DomainConstraint::Rel::Greater, num(0)}};
  Mat g = zero_mat(4);
  for (int i = 0; i < 4; ++i) g[i][i] = P("1/x4^2", *c);
  Metric m = Metric::build(c, g, cfg);
  auto R = curvature(m, christoffel(m), true);
  REQUIRE(R.weyl.has_value());
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) CHECK(certify((*R.weyl)[i][j][k][l], m));
}

TEST_CASE("degenerate metric is rejected") {
  auto c = chart_xyz();
  Mat g = zero_mat(3);
  g[0][0] = num(1);
  g[1][1] = num(1);
  g[2][2] = num(0);
  CHECK_THROWS_WITH_AS(Metric::build(c, g, cfg),
                       doctest::Contains("determinant did not certify nonzero"),
                       std::runtime_error);
  // asymmetric metric rejected
  Mat g2 = zero_mat(3);
  g2[0][0] = num(1);
  g2[1][1] = num(1);
  g2[2][2] = num(1);
  g2[0][1] = P("x", *c);
  g2[1][0] = P("y", *c);
  CHECK_THROWS_WITH_AS(Metric::build(c, g2, cfg), doctest::Contains("not symmetric"),
                       std::runtime_error);
}

TEST_CASE("musical duals round trip") {
  Metric m = lorentz();
  Vec v = {P("x", m.chart()), num(1), P("e^z", m.chart())};
  Vec w = lower_index(m, v);
  Vec back = raise_index(m, w);
  for (int i = 0; i < 3; ++i) CHECK(certify(sub(back[i], v[i]), m));
}
