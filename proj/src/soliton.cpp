#include "sforge/soliton.hpp"

#include <algorithm>
#include <cmath>

namespace sforge {

std::string vf_class_name(VFClass c) {
  switch (c) {
    case VFClass::Parallel: return "parallel";
    case VFClass::Concurrent: return "concurrent";
    case VFClass::Concircular: return "concircular";
    case VFClass::Recurrent: return "recurrent";
    case VFClass::Torqued: return "torqued";
    case VFClass::TorseForming: return "torse-forming";
    case VFClass::NotTorseForming: return "not-torse-forming";
  }
  return "?";
}

std::string soliton_kind_name(SolitonKind k) {
  switch (k) {
    case SolitonKind::EtaRicci: return "eta-ricci";
    case SolitonKind::EtaYamabe: return "eta-yamabe";
    case SolitonKind::Ricci: return "ricci";
    case SolitonKind::Yamabe: return "yamabe";
  }
  return "?";
}

std::string sign_tag_name(SignTag s) {
  switch (s) {
    case SignTag::Shrinking: return "shrinking";
    case SignTag::Steady: return "steady";
    case SignTag::Expanding: return "expanding";
    case SignTag::NonConstant: return "non-constant";
    case SignTag::Indefinite: return "indefinite";
  }
  return "?";
}

std::string einstein_class_name(EinsteinClass c) {
  switch (c) {
    case EinsteinClass::Einstein: return "einstein";
    case EinsteinClass::Quasi: return "quasi-einstein";
    case EinsteinClass::AlmostQuasi: return "almost-quasi-einstein";
    case EinsteinClass::Generalized: return "generalized-quasi-einstein";
    case EinsteinClass::MixedGeneralized: return "mixed-generalized-quasi-einstein";
    case EinsteinClass::PseudoQuasi: return "pseudo-quasi-einstein";
    case EinsteinClass::Unclassified: return "unclassified";
  }
  return "?";
}

namespace {

std::string comp_label(int i, int j) {
  return "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
}

ZeroCertificate certify_vec_zero(const Vec& v, const Metric& m, const ZeroTestConfig& cfg) {
  ZeroCertificate worst;
  worst.verdict = Verdict::SymbolicZero;
  worst.tol = cfg.tol;
  for (const Expr& e : v) {
    ZeroCertificate c =
        certify_zero(e, m.chart().symbol_order(), m.chart().constraints, cfg);
    worst.max_abs = std::max(worst.max_abs, c.max_abs);
    worst.samples = std::max(worst.samples, c.samples);
    if (c.verdict == Verdict::NumericZero && worst.verdict == Verdict::SymbolicZero)
      worst.verdict = Verdict::NumericZero;
    if (!c.ok()) {
      worst.verdict = c.verdict;
      worst.note = c.note;
      return worst;
    }
  }
  return worst;
}

bool is_constant_certified(const Expr& e, const Metric& m, const ZeroTestConfig& cfg) {
  for (const std::string& s : m.chart().coords) {
    Expr d = differentiate(e, s);
    if (d.is_zero()) continue;
    if (!certify_zero(d, m.chart().symbol_order(), m.chart().constraints, cfg).ok()) return false;
  }
  return true;
}

}  // namespace

TorseFormingDecomposition classify_vector_field(const Metric& m, const ChristoffelSymbols& gamma,
                                                const Vec& v, const ZeroTestConfig& cfg) {
  TorseFormingDecomposition out;
  int n = m.dim();
  out.psi = zero_vec(n);
  out.a = num(0);

  Vec vs(n);
  bool all_zero = true;
  for (int i = 0; i < n; ++i) {
    vs[i] = simplify(v[i]);
    if (!vs[i].is_zero()) all_zero = false;
  }
  if (all_zero) {
    out.zero_field = true;
    out.cls = VFClass::Parallel;
    out.note = "zero field: trivially parallel";
    out.residual.cert.verdict = Verdict::SymbolicZero;
    out.psi_zero.verdict = out.a_zero.verdict = out.a_one.verdict = out.psi_v_zero.verdict =
        Verdict::SymbolicZero;
    out.a_one.verdict = Verdict::Nonzero;
    out.psi_of_v = num(0);
    return out;
  }

  // pivot component: the column whose |V^j| clears 0.1 * max_k |V^k| at the
  // most sample points
  Sampler sampler(m.chart().symbol_order(), m.chart().constraints, cfg.seed);
  std::vector<int> hits(n, 0);
  int sampled = 0;
  for (int s = 0; s < cfg.samples && sampled < cfg.samples; ++s) {
    std::map<std::string, double> pt;
    std::vector<double> vals(n);
    try {
      pt = sampler.next();
      for (int i = 0; i < n; ++i) vals[i] = std::abs(evaluate(vs[i], pt));
    } catch (const EvalError&) {
      continue;
    }
    double vmax = *std::max_element(vals.begin(), vals.end());
    if (!(vmax > 0) || !std::isfinite(vmax)) continue;
    ++sampled;
    for (int i = 0; i < n; ++i)
      if (vals[i] > 0.1 * vmax) ++hits[i];
  }
  int p = static_cast<int>(std::max_element(hits.begin(), hits.end()) - hits.begin());
  if (sampled == 0 || hits[p] == 0) {
    out.pivot_failed = true;
    out.cls = VFClass::NotTorseForming;
    out.note = "pivot failure: no component of V certifies nonzero on the domain";
    return out;
  }
  out.pivot = p;
  out.pivot_partial = hits[p] < sampled;
  if (out.pivot_partial)
    out.note = "pivot component " + std::to_string(p + 1) + " vanishes on part of the domain";

  Mat dv = covariant_derivative_vector(m, gamma, v);
  // psi_i = (nabla_i V)^p / V^p for i != p; a from a diagonal row away from
  // the pivot; psi_p closes the pivot diagonal
  for (int i = 0; i < n; ++i)
    if (i != p) out.psi[i] = simplify(div(dv[i][p], vs[p]));
  int aux = p == 0 ? 1 : 0;
  out.a = simplify(sub(dv[aux][aux], mul(out.psi[aux], vs[aux])));
  out.psi[p] = simplify(div(sub(dv[p][p], out.a), vs[p]));

  std::vector<std::pair<std::string, Expr>> residuals;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Expr model = mul(out.psi[i], vs[j]);
      if (i == j) model = add(model, out.a);
      residuals.push_back({comp_label(i, j), sub(dv[i][j], model)});
    }
  out.residual = certify_all(residuals, m.chart().symbol_order(), m.chart().constraints, cfg);
  if (!out.residual.ok()) {
    out.cls = VFClass::NotTorseForming;
    out.note = "torse-forming residual fails at component " + out.residual.failing_label;
    return out;
  }

  out.psi_of_v = num(0);
  for (int i = 0; i < n; ++i) out.psi_of_v = add(out.psi_of_v, mul(out.psi[i], vs[i]));
  out.psi_of_v = simplify(out.psi_of_v);

  const auto order = m.chart().symbol_order();
  const auto& cons = m.chart().constraints;
  out.psi_zero = certify_vec_zero(out.psi, m, cfg);
  out.a_zero = certify_zero(out.a, order, cons, cfg);
  out.a_one = certify_zero(sub(out.a, num(1)), order, cons, cfg);
  out.psi_v_zero = certify_zero(out.psi_of_v, order, cons, cfg);

  if (out.psi_zero.ok())
    out.cls = out.a_zero.ok() ? VFClass::Parallel
                              : (out.a_one.ok() ? VFClass::Concurrent : VFClass::Concircular);
  else if (out.a_zero.ok())
    out.cls = VFClass::Recurrent;
  else if (out.psi_v_zero.ok())
    out.cls = VFClass::Torqued;
  else
    out.cls = VFClass::TorseForming;
  return out;
}

namespace {

SolitonSolution solve_soliton(const Metric& m, const ChristoffelSymbols& gamma,
                              const CurvatureBundle& curv, const Vec& v, const Vec& eta,
                              bool yamabe, const ZeroTestConfig& cfg) {
  SolitonSolution out;
  int n = m.dim();
  out.scal = curv.scal;
  Mat lie = lie_derivative_metric(m, gamma, v);
  Mat target = zero_mat(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Expr t = mul(num(1, 2), lie[i][j]);
      if (yamabe)
        t = sub(t, mul(curv.scal, m.g()[i][j]));
      else
        t = add(t, curv.ricci[i][j]);
      target[i][j] = simplify(t);
    }

  std::vector<LinearRow> rows;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Expr cg = yamabe ? neg(m.g()[i][j]) : m.g()[i][j];
      rows.push_back({{cg, simplify(mul(eta[i], eta[j]))}, target[i][j], comp_label(i, j)});
    }
  LinearSolveResult sol =
      solve_linear_symbolic(rows, 2, m.chart().symbol_order(), m.chart().constraints, cfg);

  bool eta_zero = true;
  for (const Expr& e : eta)
    if (!simplify(e).is_zero()) eta_zero = false;
  out.kind = yamabe ? (eta_zero ? SolitonKind::Yamabe : SolitonKind::EtaYamabe)
                    : (eta_zero ? SolitonKind::Ricci : SolitonKind::EtaRicci);

  Vec vlow = lower_index(m, v);
  Vec eta_minus_dual(n), eta_plus_dual(n);
  for (int i = 0; i < n; ++i) {
    eta_minus_dual[i] = sub(eta[i], vlow[i]);
    eta_plus_dual[i] = add(eta[i], vlow[i]);
  }
  out.eta_is_gdual = certify_vec_zero(eta_minus_dual, m, cfg).ok();
  if (!out.eta_is_gdual && !eta_zero)
    out.eta_is_neg_gdual = certify_vec_zero(eta_plus_dual, m, cfg).ok();

  if (sol.status == LinearSolveResult::Status::Inconsistent) {
    out.consistent = false;
    out.failure_note = "not a soliton: " + sol.note;
    out.failing_component = sol.failing_row >= 0 ? rows[sol.failing_row].label : "";
    out.failing_residual = sol.failing_residual;
    out.residual.cert = sol.failing_cert;
    out.residual.failing_label = out.failing_component;
    out.residual.failing_expr = sol.failing_residual;
    return out;
  }
  if (sol.status == LinearSolveResult::Status::Underdetermined || !sol.solution[0].has_value()) {
    out.consistent = false;
    out.failure_note = "solve underdetermined: " + sol.note;
    return out;
  }
  out.lambda = *sol.solution[0];
  if (sol.solution[1].has_value()) out.mu = *sol.solution[1];

  std::vector<std::pair<std::string, Expr>> residuals;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Expr model = yamabe ? mul(neg(m.g()[i][j]), out.lambda) : mul(m.g()[i][j], out.lambda);
      if (out.mu) model = add(model, mul(*out.mu, mul(eta[i], eta[j])));
      residuals.push_back({comp_label(i, j), sub(target[i][j], model)});
    }
  out.residual = certify_all(residuals, m.chart().symbol_order(), m.chart().constraints, cfg);
  out.consistent = out.residual.ok();
  if (!out.consistent) {
    out.failure_note = "not a soliton: residual fails at " + out.residual.failing_label;
    out.failing_component = out.residual.failing_label;
    out.failing_residual = out.residual.failing_expr;
    return out;
  }

  out.lambda_constant = is_constant_certified(out.lambda, m, cfg);
  if (out.mu) out.mu_constant = is_constant_certified(*out.mu, m, cfg);
  if (!out.lambda_constant) {
    out.sign = SignTag::NonConstant;
  } else {
    Expr l = simplify(out.lambda);
    if (l.is_number()) {
      out.sign = l.number() > 0 ? SignTag::Shrinking
                                : (l.number() < 0 ? SignTag::Expanding : SignTag::Steady);
    } else if (certify_zero(l, m.chart().symbol_order(), m.chart().constraints, cfg).ok()) {
      out.sign = SignTag::Steady;
    } else {
      SignSample ss = sample_sign(l, m.chart().symbol_order(), m.chart().constraints, cfg);
      out.sign = ss.all_positive ? SignTag::Shrinking
                                 : (ss.all_negative ? SignTag::Expanding : SignTag::Indefinite);
    }
  }
  return out;
}

}  // namespace

SolitonSolution solve_eta_ricci(const Metric& m, const ChristoffelSymbols& gamma,
                                const CurvatureBundle& curv, const Vec& v, const Vec& eta,
                                const ZeroTestConfig& cfg) {
  return solve_soliton(m, gamma, curv, v, eta, false, cfg);
}

SolitonSolution solve_eta_yamabe(const Metric& m, const ChristoffelSymbols& gamma,
                                 const CurvatureBundle& curv, const Vec& v, const Vec& eta,
                                 const ZeroTestConfig& cfg) {
  return solve_soliton(m, gamma, curv, v, eta, true, cfg);
}

GradientReport check_gradient_potential(const Metric& m, const Vec& v,
                                        const std::optional<Expr>& f, const ZeroTestConfig& cfg) {
  GradientReport out;
  std::vector<std::pair<std::string, Expr>> residuals;
  if (f.has_value()) {
    out.has_function = true;
    Vec gf = grad(m, *f);
    for (int i = 0; i < m.dim(); ++i)
      residuals.push_back({"component " + std::to_string(i + 1), sub(v[i], gf[i])});
    out.note = "V - grad(f) componentwise";
  } else {
    // necessary condition only: the g-dual of a gradient field is closed
    Vec vlow = lower_index(m, v);
    Mat d = exterior_derivative_oneform(m.chart(), vlow);
    for (int i = 0; i < m.dim(); ++i)
      for (int j = i + 1; j < m.dim(); ++j)
        residuals.push_back({"d(V-flat)" + comp_label(i, j), d[i][j]});
    out.note = "closedness of the g-dual (necessary condition only)";
  }
  out.check = certify_all(residuals, m.chart().symbol_order(), m.chart().constraints, cfg);
  return out;
}

std::vector<IdentityRecord> verify_concircular_identities(
    const Metric& m, const ChristoffelSymbols& gamma, const CurvatureBundle& curv, const Vec& v,
    const TorseFormingDecomposition& dec, const ZeroTestConfig& cfg) {
  std::vector<IdentityRecord> out;
  const auto order = m.chart().symbol_order();
  const auto& cons = m.chart().constraints;
  int n = m.dim();
  bool concircular = dec.torse_forming() && dec.psi_zero.ok();
  if (!concircular) {
    IdentityRecord skip;
    skip.id = "concircular-identities";
    skip.applicable = false;
    skip.skip_reason = "not concircular (psi does not vanish)";
    out.push_back(skip);
    return out;
  }

  // V = grad(|V|^2) / (2a), defined where a is nonzero
  IdentityRecord grad_type;
  grad_type.id = "concircular-gradient-type";
  ZeroCertificate a_zero = certify_zero(dec.a, order, cons, cfg);
  if (a_zero.verdict != Verdict::Nonzero) {
    grad_type.applicable = false;
    grad_type.skip_reason = "a did not certify nonzero (division by 2a)";
  } else {
    Vec gn = grad(m, norm_sq(m, v));
    std::vector<std::pair<std::string, Expr>> residuals;
    for (int i = 0; i < n; ++i)
      residuals.push_back({"component " + std::to_string(i + 1),
                           sub(v[i], div(gn[i], mul(num(2), dec.a)))});
    grad_type.check = certify_all(residuals, order, cons, cfg);
  }
  out.push_back(grad_type);

  IdentityRecord divr;
  divr.id = "concircular-divergence";
  divr.check = certify_all(
      {{"div(V) - a n", sub(divergence(m, gamma, v), mul(num(n), dec.a))}}, order, cons, cfg);
  out.push_back(divr);

  IdentityRecord curvid;
  curvid.id = "concircular-curvature";
  {
    Expr va = num(0);
    for (int k = 0; k < n; ++k) va = add(va, mul(v[k], differentiate(dec.a, m.chart().coords[k])));
    va = simplify(va);
    std::vector<std::pair<std::string, Expr>> residuals;
    for (int i = 0; i < n; ++i) {
      Vec x = zero_vec(n);
      x[i] = num(1);
      Vec rxvv = curvature_apply(curv, x, v, v);
      for (int l = 0; l < n; ++l) {
        Expr model = mul(differentiate(dec.a, m.chart().coords[i]), v[l]);
        if (l == i) model = sub(model, va);
        residuals.push_back({"X=d_" + std::to_string(i + 1) + " comp " + std::to_string(l + 1),
                             sub(rxvv[l], model)});
      }
    }
    curvid.check = certify_all(residuals, order, cons, cfg);
  }
  out.push_back(curvid);

  IdentityRecord ricid;
  ricid.id = "concircular-ricci";
  {
    Expr va = num(0);
    for (int k = 0; k < n; ++k) va = add(va, mul(v[k], differentiate(dec.a, m.chart().coords[k])));
    Expr lhs = eval_bilinear(curv.ricci, v, v);
    ricid.check = certify_all({{"Ric(V,V) - (1-n)V(a)", sub(lhs, mul(num(1 - n), va))}}, order,
                              cons, cfg);
  }
  out.push_back(ricid);
  return out;
}

std::vector<IdentityRecord> verify_proposition_p(const Metric& m, const CurvatureBundle& curv,
                                                 const Vec& v, const Vec& eta,
                                                 const TorseFormingDecomposition& dec,
                                                 const SolitonSolution& sol,
                                                 const ZeroTestConfig& cfg) {
  std::vector<IdentityRecord> out;
  const auto order = m.chart().symbol_order();
  const auto& cons = m.chart().constraints;
  int n = m.dim();

  auto skip_all = [&](const std::string& reason) {
    IdentityRecord skip;
    skip.id = "gradient-collinearity";
    skip.applicable = false;
    skip.skip_reason = reason;
    out.push_back(skip);
    return out;
  };
  if (!dec.torse_forming() || !dec.psi_zero.ok()) return skip_all("not concircular");
  if (!sol.consistent) return skip_all("no eta-ricci solution");
  if (!sol.mu) return skip_all("mu undetermined");
  ZeroCertificate a_nonzero = certify_zero(dec.a, order, cons, cfg);
  bool a_const = true;
  for (const std::string& s : m.chart().coords)
    if (!certify_zero(differentiate(dec.a, s), order, cons, cfg).ok()) a_const = false;
  if (a_nonzero.verdict != Verdict::Nonzero || !a_const)
    return skip_all("a is not a certified nonzero constant");
  // the identities see eta only through mu eta(x)eta, so sign is immaterial
  if (!sol.eta_is_gdual && !sol.eta_is_neg_gdual)
    return skip_all("eta is not the g-dual of V (up to sign)");

  const Expr& lambda = sol.lambda;
  const Expr& mu = *sol.mu;
  Expr vsq = norm_sq(m, v);

  IdentityRecord alg;
  alg.id = "prop-collinear-lambda-mu-relation";
  alg.check = certify_all({{"(lambda-a) + |V|^2 mu", add(sub(lambda, dec.a), mul(vsq, mu))}},
                          order, cons, cfg);
  out.push_back(alg);

  IdentityRecord gl;
  gl.id = "prop-collinear-grad-lambda";
  {
    Vec gL = grad(m, lambda);
    Expr coef = mul(num(2 * static_cast<long long>(n - 3), n - 1), mul(dec.a, mu));
    std::vector<std::pair<std::string, Expr>> residuals;
    for (int i = 0; i < n; ++i)
      residuals.push_back(
          {"component " + std::to_string(i + 1), sub(gL[i], mul(coef, v[i]))});
    gl.check = certify_all(residuals, order, cons, cfg);
  }
  out.push_back(gl);

  IdentityRecord gm;
  gm.id = "prop-collinear-grad-mu";
  ZeroCertificate vsq_nonzero = certify_zero(vsq, order, cons, cfg);
  if (vsq_nonzero.verdict != Verdict::Nonzero) {
    gm.applicable = false;
    gm.skip_reason = "inapplicable (null field): |V|^2 did not certify nonzero";
  } else {
    Vec gM = grad(m, mu);
    Expr coef = mul(num(4 * static_cast<long long>(n - 2), n - 1), mul(dec.a, mu));
    std::vector<std::pair<std::string, Expr>> residuals;
    for (int i = 0; i < n; ++i)
      residuals.push_back({"component " + std::to_string(i + 1),
                           add(gM[i], div(mul(coef, v[i]), vsq))});
    gm.check = certify_all(residuals, order, cons, cfg);
  }
  out.push_back(gm);

  IdentityRecord gs;
  gs.id = "prop-collinear-grad-scal";
  {
    Vec gS = grad(m, curv.scal);
    Expr coef = mul(num(2 * static_cast<long long>(n - 3)), mul(dec.a, mu));
    std::vector<std::pair<std::string, Expr>> residuals;
    for (int i = 0; i < n; ++i)
      residuals.push_back({"component " + std::to_string(i + 1), sub(gS[i], mul(coef, v[i]))});
    gs.check = certify_all(residuals, order, cons, cfg);
  }
  out.push_back(gs);
  return out;
}

std::vector<IdentityRecord> verify_torqued_structure(const Metric& m, const CurvatureBundle& curv,
                                                     const Vec& v, const Vec& eta,
                                                     const TorseFormingDecomposition& dec,
                                                     const SolitonSolution& sol,
                                                     const ZeroTestConfig& cfg) {
  std::vector<IdentityRecord> out;
  const auto order = m.chart().symbol_order();
  const auto& cons = m.chart().constraints;
  int n = m.dim();

  bool torqued = dec.torse_forming() && dec.cls == VFClass::Torqued;
  bool concircular_path = dec.torse_forming() && dec.psi_zero.ok();
  IdentityRecord res;
  res.id = "torqued-mgqe-residual";
  if (!torqued && !concircular_path) {
    res.applicable = false;
    res.skip_reason = dec.torse_forming()
                          ? "not torqued: psi(V) does not vanish"
                          : "not torse-forming";
    out.push_back(res);
    return out;
  }
  if (!sol.consistent) {
    res.applicable = false;
    res.skip_reason = "no eta-ricci solution";
    out.push_back(res);
    return out;
  }
  if (!sol.eta_is_gdual && !sol.eta_is_neg_gdual) {
    res.applicable = false;
    res.skip_reason = "eta is not the g-dual of V (up to sign)";
    out.push_back(res);
    return out;
  }
  if (concircular_path) res.note = "psi = 0: reduces to the quasi-Einstein form";
  {
    // the mixed psi term is derived with eta = V-flat; a sign-flipped eta
    // flips that term
    Expr half = sol.eta_is_neg_gdual ? num(-1, 2) : num(1, 2);
    Mat model = mat_scale(sub(sol.lambda, dec.a), m.g());
    if (sol.mu) model = mat_add(model, mat_scale(*sol.mu, outer(eta, eta)));
    model = mat_sub(model, mat_scale(half, sym_outer(dec.psi, eta)));
    std::vector<std::pair<std::string, Expr>> residuals;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        residuals.push_back({comp_label(i, j), sub(curv.ricci[i][j], model[i][j])});
    res.check = certify_all(residuals, order, cons, cfg);
  }
  out.push_back(res);

  IdentityRecord dual;
  dual.id = "torqued-eta-U-vanishing";
  {
    Vec u = raise_index(m, dec.psi);
    Expr eta_u = num(0);
    for (int i = 0; i < n; ++i) eta_u = add(eta_u, mul(eta[i], u[i]));
    dual.check = certify_all({{"eta(U)", eta_u}, {"psi(V)", dec.psi_of_v}}, order, cons, cfg);
  }
  out.push_back(dual);
  return out;
}

HessianReport verify_hessian_torse_forming(const Metric& m, const ChristoffelSymbols& gamma,
                                           const Expr& sigma, const ZeroTestConfig& cfg) {
  HessianReport out;
  const auto order = m.chart().symbol_order();
  const auto& cons = m.chart().constraints;
  int n = m.dim();
  Vec dsigma(n);
  bool nonconstant = false;
  for (int i = 0; i < n; ++i) {
    dsigma[i] = differentiate(sigma, m.chart().coords[i]);
    if (!certify_zero(dsigma[i], order, cons, cfg).ok()) nonconstant = true;
  }
  if (!nonconstant) {
    out.applicable = false;
    out.skip_reason = "sigma is constant";
    return out;
  }
  Mat hess = hessian(m, gamma, sigma);
  LinearSolveResult fit = fit_two_term(m, hess, m.g(), outer(dsigma, dsigma), cfg);
  if (!fit.solved() || !fit.solution[0].has_value()) {
    out.solved = false;
    out.note = "Hess(sigma) does not decompose as a g + delta dsigma(x)dsigma: " + fit.note;
    if (fit.status == LinearSolveResult::Status::Inconsistent) {
      out.residual.cert = fit.failing_cert;
      out.residual.failing_expr = fit.failing_residual;
      out.residual.failing_label = fit.failing_row >= 0 ? std::to_string(fit.failing_row) : "";
    }
    return out;
  }
  out.solved = true;
  out.a = *fit.solution[0];
  out.delta = fit.solution[1] ? *fit.solution[1] : num(0);
  {
    Mat model = mat_add(mat_scale(out.a, m.g()), mat_scale(out.delta, outer(dsigma, dsigma)));
    std::vector<std::pair<std::string, Expr>> residuals;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        residuals.push_back({comp_label(i, j), sub(hess[i][j], model[i][j])});
    out.residual = certify_all(residuals, order, cons, cfg);
  }
  // grad sigma must classify torse-forming with the induced (a, psi = delta dsigma)
  Vec gs = grad(m, sigma);
  TorseFormingDecomposition dec = classify_vector_field(m, gamma, gs, cfg);
  IdentityRecord cls;
  cls.id = "hessian-classification-consistency";
  if (!dec.torse_forming()) {
    cls.applicable = false;
    cls.skip_reason = "grad(sigma) did not classify torse-forming";
  } else {
    std::vector<std::pair<std::string, Expr>> residuals;
    residuals.push_back({"a", sub(dec.a, out.a)});
    for (int i = 0; i < n; ++i)
      residuals.push_back({"psi component " + std::to_string(i + 1),
                           sub(dec.psi[i], mul(out.delta, dsigma[i]))});
    cls.check = certify_all(residuals, order, cons, cfg);
  }
  out.consistency.push_back(cls);
  return out;
}

std::vector<IdentityRecord> verify_yamabe_identities(const Metric& m,
                                                     const ChristoffelSymbols& gamma,
                                                     const CurvatureBundle& curv, const Vec& v,
                                                     const Vec& eta,
                                                     const TorseFormingDecomposition& dec,
                                                     const SolitonSolution& ysol,
                                                     const ZeroTestConfig& cfg) {
  std::vector<IdentityRecord> out;
  const auto order = m.chart().symbol_order();
  const auto& cons = m.chart().constraints;
  int n = m.dim();

  if (!dec.torse_forming() || !ysol.consistent) {
    IdentityRecord skip;
    skip.id = "yamabe-identities";
    skip.applicable = false;
    skip.skip_reason = !dec.torse_forming() ? "potential field is not torse-forming"
                                            : "no eta-yamabe solution";
    out.push_back(skip);
    return out;
  }

  const Expr& lambda = ysol.lambda;
  Expr mu = ysol.mu_or_zero();
  std::string mu_note = ysol.mu ? "" : "mu undetermined: eta vanishes, mu-terms drop";
  Expr vsq = norm_sq(m, v);
  Vec u = raise_index(m, dec.psi);
  Expr usq = norm_sq(m, u);
  Expr psiv = dec.psi_of_v;
  // scal - lambda - a - psi(V)
  Expr core = sub(sub(sub(curv.scal, lambda), dec.a), psiv);

  // every identity below sees eta only through eta (x) eta, so the g-dual
  // hypothesis holds up to sign
  bool gdual = ysol.eta_is_gdual || ysol.eta_is_neg_gdual;
  auto gated = [&](IdentityRecord& r) {
    if (!gdual) {
      r.applicable = false;
      r.skip_reason = "eta is not the g-dual of V (up to sign)";
      return true;
    }
    if (ysol.eta_is_neg_gdual && r.note.empty()) r.note = "eta = -(g-dual of V)";
    return false;
  };

  {
    IdentityRecord e1;
    e1.id = "yamabe-e1";
    e1.note = mu_note;
    if (!gated(e1))
      e1.check = certify_all({{"scal - lambda - a - psi(V) + mu |V|^2", add(core, mul(mu, vsq))}},
                             order, cons, cfg);
    out.push_back(e1);
  }
  {
    IdentityRecord e2;
    e2.id = "yamabe-e2";
    e2.note = mu_note;
    if (!gated(e2))
      e2.check = certify_all(
          {{"(scal - lambda - a - psi(V)) |U|^2 + mu psi(V)^2",
            add(mul(core, usq), mul(mu, mul(psiv, psiv)))}},
          order, cons, cfg);
    out.push_back(e2);
  }
  {
    // either mu = 0 (an almost Yamabe soliton) or psi(V)^2 = |V|^2 |U|^2
    IdentityRecord branch;
    branch.id = "yamabe-mu-or-cauchy-equality";
    if (!gated(branch)) {
      ZeroCertificate mu_zero = certify_zero(mu, order, cons, cfg);
      if (mu_zero.ok()) {
        branch.note = "mu = 0 branch";
        branch.check.cert = mu_zero;
      } else {
        branch.note = "psi(V)^2 = |V|^2 |U|^2 branch";
        branch.check = certify_all(
            {{"psi(V)^2 - |V|^2 |U|^2", sub(mul(psiv, psiv), mul(vsq, usq))}}, order, cons, cfg);
      }
    }
    out.push_back(branch);
  }
  {
    IdentityRecord muz;
    muz.id = "yamabe-mu-zero-lambda-formula";
    if (!gated(muz)) {
      ZeroCertificate mu_zero = certify_zero(mu, order, cons, cfg);
      ZeroCertificate vsq_nonzero = certify_zero(vsq, order, cons, cfg);
      if (!mu_zero.ok()) {
        muz.applicable = false;
        muz.skip_reason = "mu does not vanish";
      } else if (vsq_nonzero.verdict != Verdict::Nonzero) {
        muz.applicable = false;
        muz.skip_reason = "inapplicable (null field): |V|^2 did not certify nonzero";
      } else {
        Expr vnorm = num(0);
        for (int k = 0; k < n; ++k)
          vnorm = add(vnorm, mul(v[k], differentiate(vsq, m.chart().coords[k])));
        Expr rhs = sub(curv.scal, div(vnorm, mul(num(2), vsq)));
        muz.check = certify_all({{"lambda - scal + V(|V|^2)/(2|V|^2)", sub(lambda, rhs)}}, order,
                                cons, cfg);
      }
    }
    out.push_back(muz);
  }
  {
    // concircular branch: a = 0, or mu = 0, or (lambda, mu) = (scal - a + n|V|^2, n).
    // The mu = 0 alternative is included: substituting the solved pair into
    // the divergence identity shows a mu(n-1)|V|^2 = 0, so a nonparallel
    // concircular soliton forces mu = 0 rather than mu = n.
    IdentityRecord conc;
    conc.id = "yamabe-concircular-branch";
    if (!gated(conc)) {
      if (!dec.psi_zero.ok()) {
        conc.applicable = false;
        conc.skip_reason = "psi does not vanish (not concircular)";
      } else {
        ZeroCertificate a_zero = certify_zero(dec.a, order, cons, cfg);
        ZeroCertificate mu_zero = certify_zero(mu, order, cons, cfg);
        if (a_zero.ok()) {
          conc.note = "V is nabla-parallel (a = 0)";
          conc.check.cert = a_zero;
        } else if (mu_zero.ok()) {
          conc.note = "mu = 0 branch (almost Yamabe soliton)";
          conc.check.cert = mu_zero;
        } else {
          conc.note = "(lambda, mu) = (scal - a + n|V|^2, n) branch";
          conc.check = certify_all(
              {{"lambda - (scal - a + n|V|^2)",
                sub(lambda, add(sub(curv.scal, dec.a), mul(num(n), vsq)))},
               {"mu - n", sub(mu, num(n))}},
              order, cons, cfg);
        }
      }
    }
    out.push_back(conc);
  }
  {
    // Ric = alpha g + beta eta(x)eta + gamma_c (eta(x)psi + psi(x)eta) gives
    // lambda = (beta + mu/n)|V|^2 + alpha n - a for a torqued field
    IdentityRecord e4;
    e4.id = "yamabe-e4";
    if (!gated(e4)) {
      if (!dec.psi_v_zero.ok()) {
        e4.applicable = false;
        e4.skip_reason = "psi(V) does not vanish (not torqued)";
      } else {
        std::vector<LinearRow> rows;
        Mat ee = outer(eta, eta);
        Mat ep = sym_outer(eta, dec.psi);
        for (int i = 0; i < n; ++i)
          for (int j = i; j < n; ++j)
            rows.push_back({{m.g()[i][j], ee[i][j], ep[i][j]}, curv.ricci[i][j],
                            comp_label(i, j)});
        LinearSolveResult fit = solve_linear_symbolic(rows, 3, order, cons, cfg);
        if (!fit.solved() || !fit.solution[0].has_value()) {
          e4.applicable = false;
          e4.skip_reason = "Ricci tensor does not have the hypothesis form";
        } else {
          Expr alpha = *fit.solution[0];
          Expr beta = fit.solution[1] ? *fit.solution[1] : num(0);
          Expr rhs = sub(add(mul(add(beta, div(mu, num(n))), vsq), mul(num(n), alpha)), dec.a);
          e4.check =
              certify_all({{"lambda - ((beta + mu/n)|V|^2 + alpha n - a)", sub(lambda, rhs)}},
                          order, cons, cfg);
        }
      }
    }
    out.push_back(e4);
  }
  return out;
}

LinearSolveResult fit_two_term(const Metric& m, const Mat& target, const Mat& p, const Mat& q,
                               const ZeroTestConfig& cfg) {
  std::vector<LinearRow> rows;
  int n = m.dim();
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      rows.push_back({{p[i][j], q[i][j]}, target[i][j], comp_label(i, j)});
  return solve_linear_symbolic(rows, 2, m.chart().symbol_order(), m.chart().constraints, cfg);
}

EinsteinClassReport einstein_classify(const Metric& m, const Mat& ricci,
                                      const EinsteinCandidates& candidates,
                                      const ZeroTestConfig& cfg) {
  EinsteinClassReport out;
  const auto order = m.chart().symbol_order();
  const auto& cons = m.chart().constraints;
  int n = m.dim();

  auto coeff_zero = [&](const std::optional<Expr>& e) {
    if (!e.has_value()) return true;
    return certify_zero(*e, order, cons, cfg).ok();
  };

  std::vector<LinearRow> rows;
  std::vector<std::string> names;
  Mat ee, bb, abba;
  std::vector<Mat> basis;
  basis.push_back(m.g());
  names.push_back("alpha");
  if (candidates.A) {
    basis.push_back(outer(*candidates.A, *candidates.A));
    names.push_back("beta");
  }
  if (candidates.E) {
    // pseudo quasi-Einstein: Ric = alpha g + beta A(x)A + gamma E, tr E = 0
    Expr tr = trace_with_metric(m, *candidates.E);
    out.trace_free = certify_zero(tr, order, cons, cfg);
    if (!out.trace_free->ok()) {
      out.note = "supplied E is not trace-free";
      return out;
    }
    basis.push_back(*candidates.E);
    names.push_back("gamma");
  } else if (candidates.B) {
    if (!candidates.A) {
      out.note = "B supplied without A";
      return out;
    }
    Vec araised = raise_index(m, *candidates.A);
    Expr ab = num(0);
    for (int i = 0; i < n; ++i) ab = add(ab, mul(araised[i], (*candidates.B)[i]));
    out.orthogonality = certify_zero(ab, order, cons, cfg);
    if (!out.orthogonality->ok()) {
      out.note = "candidate 1-forms are not g-orthogonal";
      return out;
    }
    basis.push_back(outer(*candidates.B, *candidates.B));
    names.push_back("gamma");
    basis.push_back(sym_outer(*candidates.A, *candidates.B));
    names.push_back("delta");
  }

  int k = static_cast<int>(basis.size());
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      std::vector<Expr> coeffs;
      for (const Mat& b : basis) coeffs.push_back(b[i][j]);
      rows.push_back({coeffs, ricci[i][j], comp_label(i, j)});
    }
  LinearSolveResult fit = solve_linear_symbolic(rows, k, order, cons, cfg);
  if (!fit.solved()) {
    out.note = "no candidate decomposition certifies: " + fit.note;
    if (fit.status == LinearSolveResult::Status::Inconsistent) {
      out.residual.cert = fit.failing_cert;
      out.residual.failing_expr = fit.failing_residual;
      out.residual.failing_label =
          fit.failing_row >= 0 ? rows[fit.failing_row].label : "";
    }
    return out;
  }
  out.solved = true;
  auto value_of = [&](const std::string& name) -> std::optional<Expr> {
    for (int i = 0; i < k; ++i)
      if (names[i] == name) return fit.solution[i] ? *fit.solution[i] : Expr();
    return std::nullopt;
  };
  out.alpha = value_of("alpha");
  out.beta = value_of("beta");
  out.gamma = value_of("gamma");
  out.delta = value_of("delta");

  {
    Mat model = zero_mat(n);
    for (int b = 0; b < k; ++b) {
      Expr c = fit.solution[b] ? *fit.solution[b] : num(0);
      model = mat_add(model, mat_scale(c, basis[b]));
    }
    std::vector<std::pair<std::string, Expr>> residuals;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        residuals.push_back({comp_label(i, j), sub(ricci[i][j], model[i][j])});
    out.residual = certify_all(residuals, order, cons, cfg);
    if (!out.residual.ok()) {
      out.note = "decomposition residual fails";
      return out;
    }
  }

  bool beta0 = coeff_zero(out.beta);
  bool gamma0 = coeff_zero(out.gamma);
  bool delta0 = coeff_zero(out.delta);
  if (candidates.E) {
    out.cls = gamma0 ? (beta0 ? EinsteinClass::Einstein : EinsteinClass::Quasi)
                     : EinsteinClass::PseudoQuasi;
  } else if (beta0 && gamma0 && delta0) {
    out.cls = EinsteinClass::Einstein;
  } else if (delta0 && (beta0 || gamma0)) {
    out.cls = EinsteinClass::Quasi;
  } else if (beta0 && gamma0) {
    out.cls = EinsteinClass::AlmostQuasi;
  } else if (delta0) {
    out.cls = EinsteinClass::Generalized;
  } else {
    out.cls = EinsteinClass::MixedGeneralized;
  }
  return out;
}

}  // namespace sforge
