#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixtures.hpp"
#include "sforge/hypersurface.hpp"

using namespace sforge;
using fixtures::P;

namespace {

const ZeroTestConfig cfg;

ChartPtr chart_uv(bool polar_v) {
  auto c = std::make_shared<Chart>();
  c->name = "uv";
  c->coords = {"u", "v"};
  if (polar_v)
    c->constraints = {{"v", DomainConstraint::Rel::Greater, num(0)},
                      {"v", DomainConstraint::Rel::Less, pi_const()}};
  return c;
}

Metric e3_metric() { return fixtures::euclidean3(); }

Metric e4_metric() {
  auto c = std::make_shared<Chart>();
  c->name = "e4";
  c->coords = {"x1", "x2", "x3", "x4"};
  Mat g = zero_mat(4);
  for (int i = 0; i < 4; ++i) g[i][i] = num(1);
  return Metric::build(c, g, cfg);
}

Metric s3_metric() {
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
  return Metric::build(c, g, cfg);
}

Immersion plane_immersion() {
  auto src = chart_uv(false);
  return {src, e3_metric(), {sym("u"), sym("v"), num(0)}};
}

Immersion sphere2_immersion() {
  auto src = chart_uv(true);
  const Chart& c = *src;
  return {src, e3_metric(),
          {P("sin(v)*cos(u)", c), P("sin(v)*sin(u)", c), P("cos(v)", c)}};
}

Immersion latitude_immersion(const std::string& theta0) {
  auto src = chart_uv(true);
  const Chart& c = *src;
  // chart components (a, b, c) = (theta0, v, u); this order makes the
  // determinant convention pick N = -d/da, so H = cot(theta0) g
  return {src, s3_metric(), {P(theta0, c), sym("v"), sym("u")}};
}

Immersion s3_in_e4_immersion() {
  auto s3 = s3_metric();
  auto src = s3.chart_ptr();
  const Chart& c = *src;
  return {std::const_pointer_cast<const Chart>(src), e4_metric(),
          {P("sin(a)*sin(b)*cos(c)", c), P("sin(a)*sin(b)*sin(c)", c),
           P("sin(a)*cos(b)", c), P("cos(a)", c)}};
}

bool certify(const Expr& e, const Metric& m) {
  return certify_zero(e, m.chart().symbol_order(), m.chart().constraints, cfg).ok();
}

}  // namespace

TEST_CASE("plane in E^3: totally geodesic baseline") {
  Immersion imm = plane_immersion();
  auto geo = induce_geometry(imm, cfg);
  CHECK(geo.rank_cert.ok());
  CHECK(geo.orthogonality.ok());
  CHECK(geo.unit_normal.ok());
  CHECK(geo.weingarten.ok());
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      CHECK(geo.induced.g()[i][j] == (i == j ? num(1) : num(0)));
      CHECK(geo.H[i][j].is_zero());
    }
  CHECK(geo.normal[0].is_zero());
  CHECK(geo.normal[1].is_zero());
  CHECK(geo.normal[2] == num(1));

  // split of the constant field e3: V^T = 0, rho = 1
  auto split = split_ambient_field(imm, geo, {num(0), num(0), num(1)}, cfg);
  CHECK(split.tangential[0].is_zero());
  CHECK(split.tangential[1].is_zero());
  CHECK(split.rho == num(1));
  CHECK(split.reconstruction.ok());

  // gauss with flat ambient
  auto amb_curv = curvature(imm.ambient, christoffel(imm.ambient));
  auto cc = constant_curvature(imm.ambient, amb_curv, cfg);
  REQUIRE(cc.certified);
  CHECK(cc.c.is_zero());
  auto gauss = verify_gauss_equation(geo, cc, cfg);
  CHECK(gauss.applicable);
  CHECK(gauss.ricci_residual.ok());
  CHECK(gauss.scal_residual.ok());

  // ambient field e3 is parallel: a = 0, psi = 0; the soliton is steady
  auto amb_gamma = christoffel(imm.ambient);
  auto amb_dec = classify_vector_field(imm.ambient, amb_gamma, {num(0), num(0), num(1)}, cfg);
  CHECK(amb_dec.cls == VFClass::Parallel);
  auto dec = pull_back_decomposition(imm, amb_dec, cfg);
  auto rep = solve_submanifold_soliton(imm, geo, split, dec, cc, false, cfg);
  REQUIRE(rep.solution.consistent);
  CHECK(rep.solution.lambda.is_zero());
  CHECK(rep.solution.sign == SignTag::Steady);
  CHECK(!rep.solution.mu.has_value());
  CHECK(rep.structure_residual.check.ok());
  CHECK(rep.constant_curvature_form.check.ok());
  // the plane is minimal and e3 is (trivially) concircular
  CHECK(rep.minimal_scal.applicable);
  CHECK(rep.minimal_scal.check.ok());

  // umbilical classification: alpha = 0
  auto umb = umbilical_classify(geo, {}, cfg);
  CHECK(umb.cls == UmbilicalClass::TotallyUmbilical);
  CHECK(umb.alpha->is_zero());
}

TEST_CASE("unit sphere in E^3") {
  Immersion imm = sphere2_immersion();
  auto geo = induce_geometry(imm, cfg);
  const Metric& m = geo.induced;
  CHECK(geo.rank_cert.ok());
  CHECK(geo.orthogonality.cert.verdict == Verdict::SymbolicZero);
  CHECK(geo.unit_normal.verdict == Verdict::SymbolicZero);
  CHECK(geo.weingarten.ok());
  CHECK(m.g()[0][0] == P("sin(v)^2", m.chart()));
  CHECK(m.g()[1][1] == num(1));
  // inward orientation from the determinant convention: N = -position, H = g
  for (int A = 0; A < 3; ++A) CHECK(certify(add(geo.normal[A], imm.map[A]), m));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(certify(sub(geo.H[i][j], m.g()[i][j]), m));
  CHECK(certify(sub(geo.trH, num(2)), m));

  // gauss: Ric = tr(H) H - H^2 = g
  auto amb_curv = curvature(imm.ambient, christoffel(imm.ambient));
  auto cc = constant_curvature(imm.ambient, amb_curv, cfg);
  auto gauss = verify_gauss_equation(geo, cc, cfg);
  CHECK(gauss.ricci_residual.cert.verdict == Verdict::SymbolicZero);
  CHECK(gauss.scal_residual.cert.verdict == Verdict::SymbolicZero);

  // position field: concurrent ambient field, V^T = 0, rho = -1 (inward N)
  auto amb_gamma = christoffel(imm.ambient);
  Vec pos = {sym("x"), sym("y"), sym("z")};
  auto amb_dec = classify_vector_field(imm.ambient, amb_gamma, pos, cfg);
  REQUIRE(amb_dec.cls == VFClass::Concurrent);
  auto split = split_ambient_field(imm, geo, pos, cfg);
  for (int i = 0; i < 2; ++i) CHECK(certify(split.tangential[i], m));
  CHECK(certify(add(split.rho, num(1)), m));
  CHECK(split.reconstruction.ok());

  auto dec = pull_back_decomposition(imm, amb_dec, cfg);
  CHECK(dec.a == num(1));
  CHECK(dec.psi_vanishes);
  auto rep = solve_submanifold_soliton(imm, geo, split, dec, cc, false, cfg);
  REQUIRE(rep.solution.consistent);
  CHECK(rep.solution.lambda == num(1));  // Ric = g and V^T = 0
  CHECK(!rep.solution.mu.has_value());   // eta = 0: mu undetermined
  CHECK(rep.structure_residual.check.ok());
  CHECK(rep.constant_curvature_form.check.ok());
  CHECK(!rep.minimal_scal.applicable);  // tr H != 0
  CHECK(rep.tangential_class.zero_field);

  // umbilical: alpha = 1; proposition coefficients cross-check
  auto umb = umbilical_classify(geo, {}, cfg);
  CHECK(umb.cls == UmbilicalClass::TotallyUmbilical);
  CHECK(certify(sub(*umb.alpha, num(1)), m));
  auto einstein = einstein_classify(m, geo.induced_curv.ricci, {}, cfg);
  CHECK(einstein.cls == EinsteinClass::Einstein);
  auto cross = umbilical_soliton_crosscheck(geo, split, dec, rep.solution, einstein, cfg);
  CHECK(cross.applicable);
  CHECK(cross.check.ok());

  // yamabe side: lambda = scal = 2
  auto yrep = solve_submanifold_soliton(imm, geo, split, dec, cc, true, cfg);
  REQUIRE(yrep.solution.consistent);
  CHECK(certify(sub(yrep.solution.lambda, num(2)), m));
  CHECK(yrep.structure_residual.check.ok());
  CHECK(yrep.constant_curvature_form.check.ok());
}

TEST_CASE("orientation flip negates H and rho but keeps verdicts") {
  Immersion imm = sphere2_immersion();
  auto geo = induce_geometry(imm, cfg);
  auto flipped = induce_geometry(imm, cfg, true);
  const Metric& m = geo.induced;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(certify(add(flipped.H[i][j], geo.H[i][j]), m));
  CHECK(flipped.orthogonality.ok());
  CHECK(flipped.unit_normal.ok());
  CHECK(flipped.weingarten.ok());

  Vec pos = {sym("x"), sym("y"), sym("z")};
  auto split = split_ambient_field(imm, geo, pos, cfg);
  auto fsplit = split_ambient_field(imm, flipped, pos, cfg);
  CHECK(certify(add(fsplit.rho, split.rho), m));

  auto amb_curv = curvature(imm.ambient, christoffel(imm.ambient));
  auto cc = constant_curvature(imm.ambient, amb_curv, cfg);
  auto amb_dec = classify_vector_field(imm.ambient, christoffel(imm.ambient), pos, cfg);
  auto dec = pull_back_decomposition(imm, amb_dec, cfg);
  auto rep = solve_submanifold_soliton(imm, flipped, fsplit, dec, cc, false, cfg);
  REQUIRE(rep.solution.consistent);
  CHECK(rep.solution.lambda == num(1));
  CHECK(rep.structure_residual.check.ok());
  CHECK(rep.constant_curvature_form.check.ok());
}

TEST_CASE("latitude spheres in S^3: induced geometry and thm-sub") {
  struct Case {
    std::string theta0, cot, csc2;
  };
  // cot(pi/6) = sqrt(3), cot(pi/4) = 1, cot(pi/2) = 0
  std::vector<Case> cases = {{"pi/6", "sqrt(3)", "4"}, {"pi/4", "1", "2"}, {"pi/2", "0", "1"}};
  for (const auto& tc : cases) {
    CAPTURE(tc.theta0);
    Immersion imm = latitude_immersion(tc.theta0);
    auto geo = induce_geometry(imm, cfg);
    const Metric& m = geo.induced;
    CHECK(geo.rank_cert.ok());
    CHECK(geo.orthogonality.ok());
    CHECK(geo.unit_normal.ok());
    CHECK(geo.weingarten.ok());
    // H = cot(theta0) g
    Expr cot = P(tc.cot, m.chart());
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        CHECK(certify(sub(geo.H[i][j], mul(cot, m.g()[i][j])), m));

    // gauss against the round ambient: c = 1, exact scal agreement
    auto amb_curv = curvature(imm.ambient, christoffel(imm.ambient));
    auto cc = constant_curvature(imm.ambient, amb_curv, cfg);
    REQUIRE(cc.certified);
    CHECK(cc.c == num(1));
    auto gauss = verify_gauss_equation(geo, cc, cfg);
    CHECK(gauss.ricci_residual.cert.verdict == Verdict::SymbolicZero);
    CHECK(gauss.scal_residual.cert.verdict == Verdict::SymbolicZero);
    // scal_M = 2 csc^2(theta0)
    CHECK(geo.induced_curv.scal == mul(num(2), P(tc.csc2, m.chart())));

    // thm-sub with the ambient concircular field XI = -sin(a) d/da
    auto amb_gamma = christoffel(imm.ambient);
    Vec xi = {P("-sin(a)", imm.ambient.chart()), num(0), num(0)};
    auto amb_dec = classify_vector_field(imm.ambient, amb_gamma, xi, cfg);
    REQUIRE(amb_dec.cls == VFClass::Concircular);
    CHECK(certify(add(amb_dec.a, P("cos(a)", imm.ambient.chart())), imm.ambient));
    auto split = split_ambient_field(imm, geo, xi, cfg);
    CHECK(split.reconstruction.ok());
    // V^T = 0; rho = sin(theta0) with this orientation
    for (int i = 0; i < 2; ++i) CHECK(certify(split.tangential[i], m));
    auto dec = pull_back_decomposition(imm, amb_dec, cfg);
    auto rep = solve_submanifold_soliton(imm, geo, split, dec, cc, false, cfg);
    REQUIRE(rep.solution.consistent);
    CHECK(certify(sub(rep.solution.lambda, P(tc.csc2, m.chart())), m));
    CHECK(rep.structure_residual.check.ok());
    CHECK(rep.constant_curvature_form.check.ok());

    // umbilical with alpha = cot(theta0)
    auto umb = umbilical_classify(geo, {}, cfg);
    CHECK(umb.cls == UmbilicalClass::TotallyUmbilical);
    CHECK(certify(sub(*umb.alpha, cot), m));
  }
}

TEST_CASE("sphere chain: latitude spheres with constant ambient field") {
  struct Case {
    std::string theta0;
    long long lam_num, lam_den;  // ThmB i lambda = csc^2(theta0)
    long long ylam;              // ThmB ii lambda = scal = 2 csc^2
  };
  std::vector<Case> cases = {{"pi/6", 4, 1, 8}, {"pi/4", 2, 1, 4}, {"pi/2", 1, 1, 2}};
  Immersion outer = s3_in_e4_immersion();
  for (const auto& tc : cases) {
    CAPTURE(tc.theta0);
    Immersion inner = latitude_immersion(tc.theta0);
    Vec e4 = {num(0), num(0), num(0), num(1)};
    auto an = sphere_hypersurface_analysis(inner, outer, e4, cfg);
    REQUIRE(an.chain_valid);
    CHECK(an.unit_sphere_cert.ok());
    CHECK(an.sphere_metric_cert.ok());
    CHECK(an.ambient_class.cls == VFClass::Parallel);
    const Metric& m = an.geo.induced;

    // delta and varrho are the expected constants; U vanishes
    Expr th = P(tc.theta0, m.chart());
    CHECK(certify(sub(an.delta, sin_e(th)), m));
    CHECK(certify(sub(an.varrho, cos_e(th)), m));
    for (int i = 0; i < 2; ++i) CHECK(certify(an.u_field[i], m));
    CHECK(an.u_tangency.ok());

    // precursor identities
    REQUIRE(an.identities.size() == 5);
    for (const auto& rec : an.identities) {
      CAPTURE(rec.id);
      CHECK(rec.check.ok());
    }

    // ThmB i lambda equals the direct eta-Ricci lambda (mu undetermined in both)
    REQUIRE(an.thmb_ricci.consistent);
    REQUIRE(an.direct_ricci.consistent);
    CHECK(certify(sub(an.thmb_ricci.lambda, num(tc.lam_num, tc.lam_den)), m));
    CHECK(!an.thmb_ricci.mu.has_value());
    CHECK(!an.direct_ricci.mu.has_value());
    CHECK(an.ricci_coherence.applicable);
    CHECK(an.ricci_coherence.check.ok());

    // ThmB ii
    REQUIRE(an.thmb_yamabe.consistent);
    CHECK(certify(sub(an.thmb_yamabe.lambda, num(tc.ylam)), m));
    CHECK(an.yamabe_coherence.applicable);
    CHECK(an.yamabe_coherence.check.ok());
    CHECK(an.pseudo_quasi_umbilical.applicable);
    CHECK(an.pseudo_quasi_umbilical.check.ok());
  }
}

TEST_CASE("sphere chain: V = 0 trivializes everything") {
  Immersion inner = latitude_immersion("pi/4");
  Immersion outer = s3_in_e4_immersion();
  auto an = sphere_hypersurface_analysis(inner, outer, zero_vec(4), cfg);
  REQUIRE(an.chain_valid);
  const Metric& m = an.geo.induced;
  CHECK(certify(an.delta, m));
  CHECK(certify(an.varrho, m));
  for (int i = 0; i < 2; ++i) CHECK(certify(an.u_field[i], m));
  for (const auto& rec : an.identities) CHECK(rec.check.ok());
  // lambda from ThmB i with zero field: Ric = lambda g
  REQUIRE(an.thmb_ricci.consistent);
  CHECK(certify(sub(an.thmb_ricci.lambda, num(2)), m));
  CHECK(an.ricci_coherence.check.ok());
}

TEST_CASE("chain validation rejects a non-sphere outer immersion") {
  Immersion inner = latitude_immersion("pi/4");
  auto s3 = s3_metric();
  auto src = s3.chart_ptr();
  const Chart& c = *src;
  Immersion bad_outer{src, e4_metric(),
                      {P("2*sin(a)*sin(b)*cos(c)", c), P("2*sin(a)*sin(b)*sin(c)", c),
                       P("2*sin(a)*cos(b)", c), P("2*cos(a)", c)}};
  auto an = sphere_hypersurface_analysis(inner, bad_outer, zero_vec(4), cfg);
  CHECK(!an.chain_valid);
  CHECK(!an.unit_sphere_cert.ok());
}

TEST_CASE("degenerate immersions are rejected") {
  auto src = chart_uv(false);
  // rank-deficient map: image is a curve
  Immersion bad{src, e3_metric(), {sym("u"), sym("u"), num(0)}};
  CHECK_THROWS_AS(induce_geometry(bad, cfg), std::runtime_error);

  // codimension 2 is out of scope
  auto line = std::make_shared<Chart>();
  line->name = "line";
  line->coords = {"u"};
  Immersion codim2{line, e3_metric(), {sym("u"), num(0), num(0)}};
  CHECK_THROWS_WITH_AS(induce_geometry(codim2, cfg), doctest::Contains("codimension"),
                       std::runtime_error);
}
