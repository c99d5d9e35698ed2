#include "sforge/hypersurface.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sforge {

namespace {

std::string comp_label(int i, int j) {
  return "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
}

std::map<std::string, Expr> map_bindings(const Immersion& imm) {
  std::map<std::string, Expr> out;
  const auto& coords = imm.ambient.chart().coords;
  for (std::size_t a = 0; a < coords.size(); ++a) out[coords[a]] = imm.map[a];
  return out;
}

// factors a simplified nonnegative expression as r^2 * p with p kept under
// the square root
void split_square(const Expr& q, Expr& r, Expr& p) {
  std::vector<Expr> factors;
  if (q.kind() == Kind::Mul)
    factors = q.node().args;
  else
    factors.push_back(q);
  std::vector<Expr> rs, ps;
  for (const Expr& f : factors) {
    if (f.is_number()) {
      Rational c = f.number();
      // exact square roots of the numerator/denominator when available
      Expr root = pow(num(c < 0 ? -c : c), Rational(1, 2));
      if (root.is_number()) {
        rs.push_back(root);
        if (c < 0) ps.push_back(num(-1));
      } else {
        ps.push_back(f);
      }
      continue;
    }
    if (f.kind() == Kind::Pow && denominator(f.node().value) == 1) {
      Rational e = f.node().value;
      Rational half = e / 2;
      if (denominator(half) == 1) {
        rs.push_back(pow(f.node().args[0], half));
        continue;
      }
      rs.push_back(pow(f.node().args[0], (e - 1) / 2));
      ps.push_back(f.node().args[0]);
      continue;
    }
    if (f.kind() == Kind::Exp) {
      rs.push_back(exp_e(mul(num(1, 2), f.node().args[0])));
      continue;
    }
    ps.push_back(f);
  }
  r = rs.empty() ? num(1) : mul(rs);
  p = ps.empty() ? num(1) : mul(ps);
}

}  // namespace

Expr Immersion::pull_back(const Expr& e) const { return substitute(e, map_bindings(*this)); }

InducedGeometry induce_geometry(const Immersion& imm, const ZeroTestConfig& cfg,
                                bool flip_normal) {
  int n = imm.source_dim();
  int N = imm.ambient_dim();
  if (N != n + 1)
    throw std::runtime_error("immersion into '" + imm.ambient.chart().name +
                             "': codimension must be exactly 1");
  if (static_cast<int>(imm.map.size()) != N)
    throw std::runtime_error("immersion map has " + std::to_string(imm.map.size()) +
                             " components, ambient dimension is " + std::to_string(N));
  InducedGeometry out;
  const auto& u = imm.source->coords;
  auto bind = map_bindings(imm);

  out.jacobian.assign(N, Vec(n, num(0)));
  for (int A = 0; A < N; ++A)
    for (int i = 0; i < n; ++i) out.jacobian[A][i] = differentiate(imm.map[A], u[i]);

  // ambient metric and Christoffel symbols along the immersion
  Mat amb_g(N, Vec(N));
  Mat amb_inv(N, Vec(N));
  for (int A = 0; A < N; ++A)
    for (int B = 0; B < N; ++B) {
      amb_g[A][B] = simplify(substitute(imm.ambient.g()[A][B], bind));
      amb_inv[A][B] = simplify(substitute(imm.ambient.inv()[A][B], bind));
    }
  ChristoffelSymbols amb_gamma_chart = christoffel(imm.ambient);
  std::vector<Mat> amb_gamma(N, Mat(N, Vec(N)));
  for (int A = 0; A < N; ++A)
    for (int B = 0; B < N; ++B)
      for (int C = 0; C < N; ++C)
        amb_gamma[A][B][C] = simplify(substitute(amb_gamma_chart.gamma[A][B][C], bind));

  // induced metric
  Mat g(n, Vec(n, num(0)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Expr acc = num(0);
      for (int A = 0; A < N; ++A)
        for (int B = 0; B < N; ++B)
          acc = add(acc, mul(amb_g[A][B], mul(out.jacobian[A][i], out.jacobian[B][j])));
      g[i][j] = simplify(acc);
    }
  out.induced = Metric::build(imm.source, g, cfg);
  out.induced_gamma = christoffel(out.induced);
  out.induced_curv = curvature(out.induced, out.induced_gamma);

  // immersion certificate: full rank at sampled points
  {
    Sampler sampler(imm.source->symbol_order(), imm.source->constraints, cfg.seed ^ 0x1A);
    int good = 0, total = 0;
    double worst_ratio = 1.0;
    for (int k = 0; k < cfg.samples; ++k) {
      Eigen::MatrixXd J(N, n);
      try {
        auto pt = sampler.next();
        for (int A = 0; A < N; ++A)
          for (int i = 0; i < n; ++i) J(A, i) = evaluate(out.jacobian[A][i], pt);
      } catch (const EvalError&) {
        continue;
      }
      ++total;
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
      double ratio = svd.singularValues()(n - 1) / std::max(svd.singularValues()(0), 1e-300);
      worst_ratio = std::min(worst_ratio, ratio);
      if (ratio > 1e-8) ++good;
    }
    out.rank_cert.cert.samples = total;
    out.rank_cert.cert.tol = 1e-8;
    out.rank_cert.cert.max_abs = worst_ratio;
    if (total > 0 && good == total) {
      out.rank_cert.cert.verdict = Verdict::NumericZero;
      out.rank_cert.cert.note = "jacobian has full rank at all sample points";
    } else {
      out.rank_cert.cert.verdict = Verdict::Nonzero;
      out.rank_cert.cert.note = "jacobian rank deficient at a sample point";
      throw std::runtime_error("immersion into '" + imm.ambient.chart().name +
                               "': rank certificate failed");
    }
  }

  // conormal by cofactors, raised and normalized
  Vec conormal(N, num(0));
  for (int A = 0; A < N; ++A) {
    Mat full(N, Vec(N, num(0)));
    for (int r = 0; r < N; ++r)
      for (int c = 0; c < n; ++c) full[r][c] = out.jacobian[r][c];
    for (int r = 0; r < N; ++r) full[r][n] = r == A ? num(1) : num(0);
    conormal[A] = simplify(symbolic_det(full));
  }
  Vec nraw(N, num(0));
  for (int A = 0; A < N; ++A) {
    Expr acc = num(0);
    for (int B = 0; B < N; ++B) acc = add(acc, mul(amb_inv[A][B], conormal[B]));
    nraw[A] = simplify(acc);
  }
  Expr q = num(0);
  for (int A = 0; A < N; ++A)
    for (int B = 0; B < N; ++B) q = add(q, mul(amb_g[A][B], mul(nraw[A], nraw[B])));
  q = simplify(q);
  SignSample qs = sample_sign(q, imm.source->symbol_order(), imm.source->constraints, cfg);
  if (!qs.all_positive && !qs.all_negative)
    throw std::runtime_error("immersion into '" + imm.ambient.chart().name +
                             "': normal is not normalizable (null or sign-changing norm)");
  out.normal_sign = qs.all_positive ? 1 : -1;
  Expr r, p;
  split_square(out.normal_sign > 0 ? q : simplify(neg(q)), r, p);
  Expr inv_norm = mul(pow(r, Rational(-1)), pow(p, Rational(-1, 2)));
  out.normal = Vec(N, num(0));
  for (int A = 0; A < N; ++A) out.normal[A] = simplify(mul(nraw[A], inv_norm));

  // orientation: positive determinant of (dphi_1, ..., dphi_n, N)
  {
    Mat frame(N, Vec(N, num(0)));
    for (int A = 0; A < N; ++A) {
      for (int i = 0; i < n; ++i) frame[A][i] = out.jacobian[A][i];
      frame[A][n] = out.normal[A];
    }
    Expr det = simplify(symbolic_det(frame));
    SignSample ds = sample_sign(det, imm.source->symbol_order(), imm.source->constraints, cfg);
    if (ds.all_negative) {
      for (int A = 0; A < N; ++A) out.normal[A] = simplify(neg(out.normal[A]));
      out.orientation_fixed = true;
    } else if (ds.all_positive) {
      out.orientation_fixed = true;
    } else {
      out.orientation_note = "frame determinant changes sign on the sampled domain";
    }
  }
  if (flip_normal)
    for (int A = 0; A < N; ++A) out.normal[A] = simplify(neg(out.normal[A]));

  // certificates for the normal
  {
    std::vector<std::pair<std::string, Expr>> ortho;
    for (int i = 0; i < n; ++i) {
      Expr acc = num(0);
      for (int A = 0; A < N; ++A)
        for (int B = 0; B < N; ++B)
          acc = add(acc, mul(amb_g[A][B], mul(out.normal[A], out.jacobian[B][i])));
      ortho.push_back({"g~(N, dphi_" + std::to_string(i + 1) + ")", acc});
    }
    out.orthogonality =
        certify_all(ortho, imm.source->symbol_order(), imm.source->constraints, cfg);
    Expr nn = num(0);
    for (int A = 0; A < N; ++A)
      for (int B = 0; B < N; ++B) nn = add(nn, mul(amb_g[A][B], mul(out.normal[A], out.normal[B])));
    out.unit_normal = certify_zero(sub(nn, num(out.normal_sign)), imm.source->symbol_order(),
                                   imm.source->constraints, cfg);
  }

  // second fundamental form H_ij = g~(nabla~_{d_i} dphi_j, N)
  out.H = zero_mat(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Vec dd(N, num(0));
      for (int A = 0; A < N; ++A) {
        Expr acc = differentiate(out.jacobian[A][j], u[i]);
        for (int B = 0; B < N; ++B)
          for (int C = 0; C < N; ++C)
            acc = add(acc, mul(amb_gamma[A][B][C],
                               mul(out.jacobian[B][i], out.jacobian[C][j])));
        dd[A] = acc;
      }
      Expr h = num(0);
      for (int A = 0; A < N; ++A)
        for (int B = 0; B < N; ++B) h = add(h, mul(amb_g[A][B], mul(dd[A], out.normal[B])));
      h = simplify(h);
      out.H[i][j] = h;
      out.H[j][i] = h;
    }
  out.B = zero_mat(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Expr acc = num(0);
      for (int k = 0; k < n; ++k) acc = add(acc, mul(out.induced.inv()[j][k], out.H[i][k]));
      out.B[i][j] = simplify(acc);
    }
  Expr tr = num(0);
  for (int i = 0; i < n; ++i) tr = add(tr, out.B[i][i]);
  out.trH = simplify(tr);
  out.mean_curvature = simplify(div(out.trH, num(n)));

  // Weingarten: nabla~_{d_i} N = -B(d_i)
  {
    std::vector<std::pair<std::string, Expr>> res;
    for (int i = 0; i < n; ++i)
      for (int A = 0; A < N; ++A) {
        Expr acc = differentiate(out.normal[A], u[i]);
        for (int B = 0; B < N; ++B)
          for (int C = 0; C < N; ++C)
            acc = add(acc, mul(amb_gamma[A][B][C], mul(out.jacobian[B][i], out.normal[C])));
        for (int j = 0; j < n; ++j) acc = add(acc, mul(out.B[i][j], out.jacobian[A][j]));
        res.push_back({"i=" + std::to_string(i + 1) + " comp " + std::to_string(A + 1), acc});
      }
    out.weingarten = certify_all(res, imm.source->symbol_order(), imm.source->constraints, cfg);
  }
  return out;
}

AmbientSplit split_ambient_field(const Immersion& imm, const InducedGeometry& geo,
                                 const Vec& ambient_field, const ZeroTestConfig& cfg) {
  int n = imm.source_dim();
  int N = imm.ambient_dim();
  auto bind = map_bindings(imm);
  AmbientSplit out;
  out.ambient_value = Vec(N, num(0));
  for (int A = 0; A < N; ++A) out.ambient_value[A] = simplify(substitute(ambient_field[A], bind));

  Mat amb_g(N, Vec(N));
  for (int A = 0; A < N; ++A)
    for (int B = 0; B < N; ++B) amb_g[A][B] = simplify(substitute(imm.ambient.g()[A][B], bind));

  // tangential components from g(V^T, d_i) = g~(V, dphi_i)
  Vec w(n, num(0));
  for (int i = 0; i < n; ++i) {
    Expr acc = num(0);
    for (int A = 0; A < N; ++A)
      for (int B = 0; B < N; ++B)
        acc = add(acc, mul(amb_g[A][B], mul(out.ambient_value[A], geo.jacobian[B][i])));
    w[i] = simplify(acc);
  }
  out.tangential = raise_index(geo.induced, w);

  Expr rho = num(0);
  for (int A = 0; A < N; ++A)
    for (int B = 0; B < N; ++B)
      rho = add(rho, mul(amb_g[A][B], mul(out.ambient_value[A], geo.normal[B])));
  out.rho = simplify(mul(num(geo.normal_sign), rho));

  std::vector<std::pair<std::string, Expr>> res;
  for (int A = 0; A < N; ++A) {
    Expr acc = mul(out.rho, geo.normal[A]);
    for (int i = 0; i < n; ++i) acc = add(acc, mul(out.tangential[i], geo.jacobian[A][i]));
    res.push_back({"component " + std::to_string(A + 1), sub(acc, out.ambient_value[A])});
  }
  out.reconstruction =
      certify_all(res, imm.source->symbol_order(), imm.source->constraints, cfg);
  return out;
}

GaussReport verify_gauss_equation(const InducedGeometry& geo, const ConstantCurvature& ambient_cc,
                                  const ZeroTestConfig& cfg) {
  GaussReport out;
  if (!ambient_cc.certified) {
    out.applicable = false;
    out.skip_reason = "ambient is not certified constant curvature";
    return out;
  }
  out.c = ambient_cc.c;
  const Metric& m = geo.induced;
  int n = m.dim();
  Mat h2 = zero_mat(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Expr acc = num(0);
      for (int k = 0; k < n; ++k) acc = add(acc, mul(geo.H[i][k], geo.B[k][j]));
      // H^2(X,Y) = H(BX, Y): H_ik g^{kl} H_lj
      acc = num(0);
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          acc = add(acc, mul(geo.H[i][k], mul(m.inv()[k][l], geo.H[l][j])));
      h2[i][j] = simplify(acc);
    }
  std::vector<std::pair<std::string, Expr>> res;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Expr model = add(sub(mul(geo.trH, geo.H[i][j]), h2[i][j]),
                       mul(mul(num(n - 1), out.c), m.g()[i][j]));
      res.push_back({comp_label(i, j), sub(geo.induced_curv.ricci[i][j], model)});
    }
  out.ricci_residual = certify_all(res, m.chart().symbol_order(), m.chart().constraints, cfg);

  Expr tr_h2 = trace_with_metric(m, h2);
  Expr model = add(mul(num(static_cast<long long>(n) * (n - 1)), out.c),
                   sub(mul(geo.trH, geo.trH), tr_h2));
  out.scal_residual =
      certify_all({{"scal", sub(geo.induced_curv.scal, model)}}, m.chart().symbol_order(),
                  m.chart().constraints, cfg);
  return out;
}

AmbientDecomposition pull_back_decomposition(const Immersion& imm,
                                             const TorseFormingDecomposition& dec,
                                             const ZeroTestConfig& cfg) {
  AmbientDecomposition out;
  int n = imm.source_dim();
  int N = imm.ambient_dim();
  auto bind = map_bindings(imm);
  out.a = simplify(substitute(dec.a, bind));
  out.psi = Vec(n, num(0));
  Mat jac(N, Vec(n));
  for (int A = 0; A < N; ++A)
    for (int i = 0; i < n; ++i) jac[A][i] = differentiate(imm.map[A], imm.source->coords[i]);
  bool vanish = true;
  for (int i = 0; i < n; ++i) {
    Expr acc = num(0);
    for (int A = 0; A < N; ++A) acc = add(acc, mul(substitute(dec.psi[A], bind), jac[A][i]));
    out.psi[i] = simplify(acc);
    if (!out.psi[i].is_zero() &&
        !certify_zero(out.psi[i], imm.source->symbol_order(), imm.source->constraints, cfg).ok())
      vanish = false;
  }
  out.psi_vanishes = vanish;
  return out;
}

SubmanifoldSolitonReport solve_submanifold_soliton(const Immersion& imm,
                                                   const InducedGeometry& geo,
                                                   const AmbientSplit& split,
                                                   const AmbientDecomposition& dec,
                                                   const ConstantCurvature& ambient_cc,
                                                   bool yamabe, const ZeroTestConfig& cfg) {
  SubmanifoldSolitonReport out;
  const Metric& m = geo.induced;
  int n = m.dim();
  const auto order = m.chart().symbol_order();
  const auto& cons = m.chart().constraints;
  Vec eta = lower_index(m, split.tangential);
  out.tangential_class = classify_vector_field(m, geo.induced_gamma, split.tangential, cfg);
  out.solution = yamabe
                     ? solve_eta_yamabe(m, geo.induced_gamma, geo.induced_curv, split.tangential,
                                        eta, cfg)
                     : solve_eta_ricci(m, geo.induced_gamma, geo.induced_curv, split.tangential,
                                       eta, cfg);

  out.structure_residual.id = yamabe ? "yamabe-structure-rhoH" : "ricci-structure-rhoH";
  out.constant_curvature_form.id =
      yamabe ? "yamabe-constant-curvature-form" : "ricci-constant-curvature-form";
  out.minimal_scal.id = yamabe ? "minimal-yamabe-scal" : "minimal-ricci-scal";
  if (!out.solution.consistent) {
    out.structure_residual.applicable = false;
    out.structure_residual.skip_reason = "no soliton solution";
    out.constant_curvature_form.applicable = false;
    out.constant_curvature_form.skip_reason = "no soliton solution";
    out.minimal_scal.applicable = false;
    out.minimal_scal.skip_reason = "no soliton solution";
    return out;
  }
  const Expr& lambda = out.solution.lambda;
  Expr mu = out.solution.mu_or_zero();
  if (!out.solution.mu)
    out.structure_residual.note = "mu undetermined: eta vanishes, mu-terms drop";

  Mat mixed = sym_outer(dec.psi, eta);
  {
    std::vector<std::pair<std::string, Expr>> res;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        if (yamabe) {
          // (scal - lambda - a) g - rho H + mu eta(x)eta - mixed/2 = 0
          Expr e = sub(mul(sub(sub(geo.induced_curv.scal, lambda), dec.a), m.g()[i][j]),
                       mul(split.rho, geo.H[i][j]));
          e = add(e, mul(mu, mul(eta[i], eta[j])));
          e = sub(e, mul(num(1, 2), mixed[i][j]));
          res.push_back({comp_label(i, j), e});
        } else {
          // Ric = (lambda - a) g - rho H + mu eta(x)eta - mixed/2
          Expr model = sub(mul(sub(lambda, dec.a), m.g()[i][j]), mul(split.rho, geo.H[i][j]));
          model = add(model, mul(mu, mul(eta[i], eta[j])));
          model = sub(model, mul(num(1, 2), mixed[i][j]));
          res.push_back({comp_label(i, j), sub(geo.induced_curv.ricci[i][j], model)});
        }
      }
    out.structure_residual.check = certify_all(res, order, cons, cfg);
  }

  if (!ambient_cc.certified) {
    out.constant_curvature_form.applicable = false;
    out.constant_curvature_form.skip_reason = "ambient is not certified constant curvature";
  } else {
    Expr c = ambient_cc.c;
    Mat h2 = zero_mat(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Expr acc = num(0);
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l)
            acc = add(acc, mul(geo.H[i][k], mul(m.inv()[k][l], geo.H[l][j])));
        h2[i][j] = simplify(acc);
      }
    std::vector<std::pair<std::string, Expr>> res;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        if (!yamabe) {
          // H^2 = [rho + tr H] H + [(n-1)c - lambda + a] g - mu eta(x)eta + mixed/2
          Expr model = mul(add(split.rho, geo.trH), geo.H[i][j]);
          model = add(model, mul(add(sub(mul(num(n - 1), c), lambda), dec.a), m.g()[i][j]));
          model = sub(model, mul(mu, mul(eta[i], eta[j])));
          model = add(model, mul(num(1, 2), mixed[i][j]));
          res.push_back({comp_label(i, j), sub(h2[i][j], model)});
        } else {
          // rho H = [n(n-1)c + (trH)^2 - tr(H^2) - lambda - a] g + mu eta(x)eta - mixed/2
          Expr coef = sub(sub(add(mul(num(static_cast<long long>(n) * (n - 1)), c),
                                  sub(mul(geo.trH, geo.trH), trace_with_metric(m, h2))),
                              lambda),
                          dec.a);
          Expr model = mul(coef, m.g()[i][j]);
          model = add(model, mul(mu, mul(eta[i], eta[j])));
          model = sub(model, mul(num(1, 2), mixed[i][j]));
          res.push_back({comp_label(i, j), sub(mul(split.rho, geo.H[i][j]), model)});
        }
      }
    out.constant_curvature_form.check = certify_all(res, order, cons, cfg);
  }

  // minimal corollary, for a concircular ambient field on a minimal M
  ZeroCertificate minimal = certify_zero(geo.trH, order, cons, cfg);
  if (!minimal.ok()) {
    out.minimal_scal.applicable = false;
    out.minimal_scal.skip_reason = "tr(H) does not vanish (not minimal)";
  } else if (!dec.psi_vanishes) {
    out.minimal_scal.applicable = false;
    out.minimal_scal.skip_reason = "ambient field is not concircular";
  } else {
    Expr vt2 = norm_sq(m, split.tangential);
    Expr model = yamabe ? sub(add(lambda, dec.a), mul(div(mu, num(n)), vt2))
                        : add(mul(num(n), sub(lambda, dec.a)), mul(mu, vt2));
    out.minimal_scal.check = certify_all(
        {{"scal_M", sub(geo.induced_curv.scal, model)}}, order, cons, cfg);
  }
  return out;
}

std::string umbilical_class_name(UmbilicalClass c) {
  switch (c) {
    case UmbilicalClass::TotallyUmbilical: return "totally-umbilical";
    case UmbilicalClass::QuasiUmbilical: return "quasi-umbilical";
    case UmbilicalClass::TwoQuasiUmbilical: return "2-quasi-umbilical";
    case UmbilicalClass::PseudoQuasiUmbilical: return "pseudo-quasi-umbilical";
    case UmbilicalClass::Unclassified: return "unclassified";
  }
  return "?";
}

UmbilicalReport umbilical_classify(const InducedGeometry& geo,
                                   const UmbilicalCandidates& candidates,
                                   const ZeroTestConfig& cfg) {
  UmbilicalReport out;
  const Metric& m = geo.induced;
  int n = m.dim();
  const auto order = m.chart().symbol_order();
  const auto& cons = m.chart().constraints;

  std::vector<Mat> basis{m.g()};
  std::vector<std::string> names{"alpha"};
  if (candidates.varpi) {
    basis.push_back(outer(*candidates.varpi, *candidates.varpi));
    names.push_back("beta");
  }
  if (candidates.eta) {
    if (candidates.varpi) {
      Vec raised = raise_index(m, *candidates.varpi);
      Expr ip = num(0);
      for (int i = 0; i < n; ++i) ip = add(ip, mul(raised[i], (*candidates.eta)[i]));
      out.orthogonality = certify_zero(ip, order, cons, cfg);
      if (!out.orthogonality->ok()) {
        out.note = "candidate 1-forms are not g-orthogonal";
        return out;
      }
    }
    basis.push_back(outer(*candidates.eta, *candidates.eta));
    names.push_back("gamma");
  }
  int k = static_cast<int>(basis.size());
  std::vector<LinearRow> rows;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      std::vector<Expr> coeffs;
      for (const Mat& b : basis) coeffs.push_back(b[i][j]);
      rows.push_back({coeffs, geo.H[i][j], comp_label(i, j)});
    }
  LinearSolveResult fit = solve_linear_symbolic(rows, k, order, cons, cfg);
  if (fit.solved() && fit.solution[0].has_value()) {
    out.solved = true;
    out.alpha = *fit.solution[0];
    int idx = 1;
    if (candidates.varpi) out.beta = fit.solution[idx] ? *fit.solution[idx] : Expr(), ++idx;
    if (candidates.eta) out.gamma = fit.solution[idx] ? *fit.solution[idx] : Expr();
    auto zero = [&](const std::optional<Expr>& e) {
      return !e.has_value() || certify_zero(*e, order, cons, cfg).ok();
    };
    bool beta0 = zero(out.beta), gamma0 = zero(out.gamma);
    out.cls = beta0 && gamma0 ? UmbilicalClass::TotallyUmbilical
              : (gamma0 ? UmbilicalClass::QuasiUmbilical : UmbilicalClass::TwoQuasiUmbilical);
    Mat model = zero_mat(n);
    for (int b = 0; b < k; ++b) {
      Expr c = fit.solution[b] ? *fit.solution[b] : num(0);
      model = mat_add(model, mat_scale(c, basis[b]));
    }
    std::vector<std::pair<std::string, Expr>> res;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) res.push_back({comp_label(i, j), sub(geo.H[i][j], model[i][j])});
    out.residual = certify_all(res, order, cons, cfg);
    return out;
  }

  // fall back to a pseudo decomposition: a trace-free remainder over the
  // alpha/beta part recovered from the pivot rows
  if (fit.status == LinearSolveResult::Status::Inconsistent) {
    out.residual.cert = fit.failing_cert;
    out.residual.failing_expr = fit.failing_residual;
    out.residual.failing_label = fit.failing_row >= 0 ? rows[fit.failing_row].label : "";
  }
  if (candidates.varpi && candidates.eta) {
    std::vector<LinearRow> rows2;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        rows2.push_back({{m.g()[i][j], basis[1][i][j]}, geo.H[i][j], comp_label(i, j)});
    // pivot-only fit: a full-residual failure here is expected
    LinearSolveResult fit2 = solve_linear_symbolic(rows2, 2, order, cons, cfg);
    Expr alpha, beta;
    if (fit2.solved() || fit2.status == LinearSolveResult::Status::Inconsistent) {
      alpha = fit2.solution[0] ? *fit2.solution[0] : div(geo.trH, num(n));
      beta = fit2.solution[1] ? *fit2.solution[1] : num(0);
    } else {
      alpha = div(geo.trH, num(n));
      beta = num(0);
    }
    Mat E = mat_sub(geo.H, mat_add(mat_scale(alpha, m.g()), mat_scale(beta, basis[1])));
    out.trace_free = certify_zero(trace_with_metric(m, E), order, cons, cfg);
    bool e_nonzero = false;
    for (int i = 0; i < n && !e_nonzero; ++i)
      for (int j = 0; j < n; ++j)
        if (!certify_zero(E[i][j], order, cons, cfg).ok()) {
          e_nonzero = true;
          break;
        }
    if (out.trace_free->ok() && e_nonzero) {
      out.cls = UmbilicalClass::PseudoQuasiUmbilical;
      out.alpha = alpha;
      out.beta = beta;
      out.note = "H = alpha g + beta varpi(x)varpi + E with tr E = 0";
      return out;
    }
  }
  out.cls = UmbilicalClass::Unclassified;
  if (out.note.empty()) out.note = "no candidate decomposition certifies";
  return out;
}

IdentityRecord umbilical_soliton_crosscheck(const InducedGeometry& geo, const AmbientSplit& split,
                                            const AmbientDecomposition& dec,
                                            const SolitonSolution& sol,
                                            const EinsteinClassReport& einstein,
                                            const ZeroTestConfig& cfg) {
  IdentityRecord out;
  out.id = "quasi-umbilical-coefficients";
  const Metric& m = geo.induced;
  const auto order = m.chart().symbol_order();
  const auto& cons = m.chart().constraints;
  if (!sol.consistent || sol.kind == SolitonKind::EtaYamabe || sol.kind == SolitonKind::Yamabe) {
    out.applicable = false;
    out.skip_reason = "no eta-ricci solution";
    return out;
  }
  if (!dec.psi_vanishes) {
    out.applicable = false;
    out.skip_reason = "ambient field is not concircular";
    return out;
  }
  if (!einstein.solved ||
      (einstein.cls != EinsteinClass::Einstein && einstein.cls != EinsteinClass::Quasi)) {
    out.applicable = false;
    out.skip_reason = "hypersurface is not certified quasi-Einstein";
    return out;
  }
  ZeroCertificate rho_nonzero = certify_zero(split.rho, order, cons, cfg);
  if (rho_nonzero.verdict != Verdict::Nonzero) {
    out.applicable = false;
    out.skip_reason = "inapplicable: rho did not certify nonzero";
    return out;
  }
  int n = m.dim();
  Vec eta = lower_index(m, split.tangential);
  Expr alpha = einstein.alpha ? *einstein.alpha : num(0);
  Expr beta = einstein.beta ? *einstein.beta : num(0);
  Expr mu = sol.mu_or_zero();
  Expr ca = div(sub(sub(sol.lambda, dec.a), alpha), split.rho);
  Expr cb = div(sub(mu, beta), split.rho);
  std::vector<std::pair<std::string, Expr>> res;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Expr model = add(mul(ca, m.g()[i][j]), mul(cb, mul(eta[i], eta[j])));
      res.push_back({comp_label(i, j), sub(geo.H[i][j], model)});
    }
  out.check = certify_all(res, order, cons, cfg);
  return out;
}

namespace {

SolitonSolution fill_from_rows(const Metric& m, const std::vector<LinearRow>& rows,
                               SolitonKind kind, const Vec& eta, const ZeroTestConfig& cfg) {
  SolitonSolution out;
  out.kind = kind;
  const auto order = m.chart().symbol_order();
  const auto& cons = m.chart().constraints;
  LinearSolveResult sol = solve_linear_symbolic(rows, 2, order, cons, cfg);
  if (sol.status == LinearSolveResult::Status::Inconsistent) {
    out.consistent = false;
    out.failure_note = sol.note;
    out.failing_component = sol.failing_row >= 0 ? rows[sol.failing_row].label : "";
    out.failing_residual = sol.failing_residual;
    out.residual.cert = sol.failing_cert;
    return out;
  }
  if (!sol.solved() || !sol.solution[0].has_value()) {
    out.consistent = false;
    out.failure_note = sol.note;
    return out;
  }
  out.consistent = true;
  out.lambda = *sol.solution[0];
  if (sol.solution[1].has_value()) out.mu = *sol.solution[1];
  out.residual.cert.verdict = Verdict::SymbolicZero;
  std::vector<std::pair<std::string, Expr>> res;
  for (const auto& r : rows) {
    Expr e = neg(r.rhs);
    e = add(e, mul(r.coeffs[0], out.lambda));
    if (out.mu) e = add(e, mul(r.coeffs[1], *out.mu));
    res.push_back({r.label, e});
  }
  out.residual = certify_all(res, order, cons, cfg);
  out.consistent = out.residual.ok();
  bool c = true;
  for (const std::string& s : m.chart().coords)
    if (!certify_zero(differentiate(out.lambda, s), order, cons, cfg).ok()) c = false;
  out.lambda_constant = c;
  return out;
}

}  // namespace

SphereChainAnalysis sphere_hypersurface_analysis(const Immersion& inner,
                                                 const Immersion& outer_imm,
                                                 const Vec& ambient_field,
                                                 const ZeroTestConfig& cfg) {
  SphereChainAnalysis out;
  int n = inner.source_dim();
  int ns = outer_imm.source_dim();
  int ne = outer_imm.ambient_dim();
  if (inner.ambient_dim() != ns || ne != ns + 1) {
    out.chain_note = "chain dimensions do not match M -> S^{n+1} -> E^{n+2}";
    return out;
  }
  // the outer ambient must be flat space in orthonormal coordinates: the
  // chain identities differentiate componentwise
  for (int A = 0; A < ne; ++A)
    for (int B = 0; B < ne; ++B)
      if (!simplify(outer_imm.ambient.g()[A][B]).is_number() ||
          simplify(outer_imm.ambient.g()[A][B]).number() != (A == B ? 1 : 0)) {
        out.chain_note = "outer ambient metric is not the euclidean identity";
        return out;
      }

  const auto s_order = outer_imm.source->symbol_order();
  const auto& s_cons = outer_imm.source->constraints;
  // |phi|^2 = 1 on the sphere chart
  {
    Expr nsq = num(-1);
    for (int A = 0; A < ne; ++A) nsq = add(nsq, mul(outer_imm.map[A], outer_imm.map[A]));
    out.unit_sphere_cert = certify_all({{"|phi|^2 - 1", nsq}}, s_order, s_cons, cfg);
  }
  // declared sphere metric equals the pullback of the euclidean one
  {
    std::vector<std::pair<std::string, Expr>> res;
    for (int i = 0; i < ns; ++i)
      for (int j = i; j < ns; ++j) {
        Expr acc = neg(inner.ambient.g()[i][j]);
        for (int A = 0; A < ne; ++A)
          acc = add(acc, mul(differentiate(outer_imm.map[A], outer_imm.source->coords[i]),
                             differentiate(outer_imm.map[A], outer_imm.source->coords[j])));
        res.push_back({comp_label(i, j), acc});
      }
    out.sphere_metric_cert = certify_all(res, s_order, s_cons, cfg);
  }
  if (!out.unit_sphere_cert.ok() || !out.sphere_metric_cert.ok()) {
    out.chain_note = "chain constraint violated: outer immersion is not the unit sphere";
    return out;
  }
  out.chain_valid = true;

  ChristoffelSymbols egamma = christoffel(outer_imm.ambient);
  out.ambient_class = classify_vector_field(outer_imm.ambient, egamma, ambient_field, cfg);

  out.geo = induce_geometry(inner, cfg);
  const Metric& m = out.geo.induced;
  const auto order = m.chart().symbol_order();
  const auto& cons = m.chart().constraints;
  const auto& u = inner.source->coords;

  // full map Phi = outer_imm.map o inner.map and its jacobian
  std::map<std::string, Expr> inner_bind;
  for (int k = 0; k < ns; ++k) inner_bind[outer_imm.source->coords[k]] = inner.map[k];
  Vec Phi(ne, num(0));
  for (int A = 0; A < ne; ++A) Phi[A] = simplify(substitute(outer_imm.map[A], inner_bind));
  Mat JPhi(ne, Vec(n, num(0)));
  for (int A = 0; A < ne; ++A)
    for (int i = 0; i < n; ++i) JPhi[A][i] = simplify(differentiate(Phi[A], u[i]));

  std::map<std::string, Expr> full_bind;
  for (int A = 0; A < ne; ++A) full_bind[outer_imm.ambient.chart().coords[A]] = Phi[A];
  Vec V(ne, num(0));
  for (int A = 0; A < ne; ++A) V[A] = simplify(substitute(ambient_field[A], full_bind));
  Expr a_at = simplify(substitute(out.ambient_class.a, full_bind));
  Vec psi_amb(ne, num(0));
  for (int A = 0; A < ne; ++A)
    psi_amb[A] = simplify(substitute(out.ambient_class.psi[A], full_bind));
  Vec psi(n, num(0));  // pulled back to M
  for (int i = 0; i < n; ++i) {
    Expr acc = num(0);
    for (int A = 0; A < ne; ++A) acc = add(acc, mul(psi_amb[A], JPhi[A][i]));
    psi[i] = simplify(acc);
  }

  // varrho = <V, N_S> with N_S the position field; xi = V - varrho N_S
  Expr varrho = num(0);
  for (int A = 0; A < ne; ++A) varrho = add(varrho, mul(V[A], Phi[A]));
  out.varrho = simplify(varrho);
  out.xi = Vec(ne, num(0));
  for (int A = 0; A < ne; ++A) out.xi[A] = simplify(sub(V[A], mul(out.varrho, Phi[A])));

  // unit normal of M in the sphere, pushed to euclidean components
  Mat J2(ne, Vec(ns, num(0)));
  for (int A = 0; A < ne; ++A)
    for (int k = 0; k < ns; ++k)
      J2[A][k] = simplify(
          substitute(differentiate(outer_imm.map[A], outer_imm.source->coords[k]), inner_bind));
  out.normal_e = Vec(ne, num(0));
  for (int A = 0; A < ne; ++A) {
    Expr acc = num(0);
    for (int k = 0; k < ns; ++k) acc = add(acc, mul(J2[A][k], out.geo.normal[k]));
    out.normal_e[A] = simplify(acc);
  }

  Expr delta = num(0);
  for (int A = 0; A < ne; ++A) delta = add(delta, mul(V[A], out.normal_e[A]));
  out.delta = simplify(delta);

  Vec U_E(ne, num(0));
  for (int A = 0; A < ne; ++A)
    U_E[A] = simplify(sub(out.xi[A], mul(out.delta, out.normal_e[A])));
  {
    Expr un = num(0), up = num(0);
    for (int A = 0; A < ne; ++A) {
      un = add(un, mul(U_E[A], out.normal_e[A]));
      up = add(up, mul(U_E[A], Phi[A]));
    }
    out.u_tangency =
        certify_all({{"<U, N>", un}, {"<U, N_S>", up}}, order, cons, cfg);
  }
  Vec w(n, num(0));
  for (int i = 0; i < n; ++i) {
    Expr acc = num(0);
    for (int A = 0; A < ne; ++A) acc = add(acc, mul(U_E[A], JPhi[A][i]));
    w[i] = simplify(acc);
  }
  out.u_field = raise_index(m, w);
  Vec eta = lower_index(m, out.u_field);

  // (recur1): nabla-bar_X xi + (varrho - a) X = psi(X) xi, projected off N_S
  {
    std::vector<std::pair<std::string, Expr>> res;
    for (int i = 0; i < n; ++i) {
      Vec dxi(ne, num(0));
      Expr radial = num(0);
      for (int A = 0; A < ne; ++A) {
        dxi[A] = differentiate(out.xi[A], u[i]);
        radial = add(radial, mul(dxi[A], Phi[A]));
      }
      for (int A = 0; A < ne; ++A) {
        Expr e = sub(dxi[A], mul(radial, Phi[A]));
        e = add(e, mul(sub(out.varrho, a_at), JPhi[A][i]));
        e = sub(e, mul(psi[i], out.xi[A]));
        res.push_back({"i=" + std::to_string(i + 1) + " comp " + std::to_string(A + 1), e});
      }
    }
    IdentityRecord rec;
    rec.id = "sphere-recur1";
    rec.check = certify_all(res, order, cons, cfg);
    out.identities.push_back(rec);
  }
  // X(varrho) - g(X, xi) = psi(X) varrho
  {
    std::vector<std::pair<std::string, Expr>> res;
    for (int i = 0; i < n; ++i) {
      Expr gxxi = num(0);
      for (int A = 0; A < ne; ++A) gxxi = add(gxxi, mul(JPhi[A][i], out.xi[A]));
      res.push_back({"i=" + std::to_string(i + 1),
                     sub(sub(differentiate(out.varrho, u[i]), gxxi), mul(psi[i], out.varrho))});
    }
    IdentityRecord rec;
    rec.id = "sphere-varrho-derivative";
    rec.check = certify_all(res, order, cons, cfg);
    out.identities.push_back(rec);
  }
  // (nablaU): nabla_X U = psi(X) U - (varrho - a) X + delta B(X)
  {
    Mat du = covariant_derivative_vector(m, out.geo.induced_gamma, out.u_field);
    std::vector<std::pair<std::string, Expr>> res;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Expr model = mul(psi[i], out.u_field[j]);
        if (i == j) model = sub(model, sub(out.varrho, a_at));
        model = add(model, mul(out.delta, out.geo.B[i][j]));
        res.push_back({comp_label(i, j), sub(du[i][j], model)});
      }
    IdentityRecord rec;
    rec.id = "sphere-nablaU";
    rec.check = certify_all(res, order, cons, cfg);
    out.identities.push_back(rec);
  }
  // psi(X) delta = g(B(X), U) + X(delta)
  {
    std::vector<std::pair<std::string, Expr>> res;
    for (int i = 0; i < n; ++i) {
      Expr gbu = num(0);
      for (int j = 0; j < n; ++j) gbu = add(gbu, mul(out.geo.H[i][j], out.u_field[j]));
      res.push_back({"i=" + std::to_string(i + 1),
                     sub(mul(psi[i], out.delta), add(gbu, differentiate(out.delta, u[i])))});
    }
    IdentityRecord rec;
    rec.id = "sphere-delta-derivative";
    rec.check = certify_all(res, order, cons, cfg);
    out.identities.push_back(rec);
  }
  // (LieU)
  {
    Mat lie = lie_derivative_metric(m, out.geo.induced_gamma, out.u_field);
    Vec ulow = lower_index(m, out.u_field);
    std::vector<std::pair<std::string, Expr>> res;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        Expr model = add(mul(psi[i], ulow[j]), mul(psi[j], ulow[i]));
        model = sub(model, mul(mul(num(2), sub(out.varrho, a_at)), m.g()[i][j]));
        model = add(model, mul(mul(num(2), out.delta), out.geo.H[i][j]));
        res.push_back({comp_label(i, j), sub(lie[i][j], model)});
      }
    IdentityRecord rec;
    rec.id = "sphere-LieU";
    rec.check = certify_all(res, order, cons, cfg);
    out.identities.push_back(rec);
  }

  Mat h2 = zero_mat(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Expr acc = num(0);
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          acc = add(acc, mul(out.geo.H[i][k], mul(m.inv()[k][l], out.geo.H[l][j])));
      h2[i][j] = simplify(acc);
    }
  Expr tr_h2 = trace_with_metric(m, h2);
  Vec ulow = lower_index(m, out.u_field);
  Mat mixed = sym_outer(psi, ulow);

  // ThmB i: H^2 = [trH + delta] H + (n-1-varrho-lambda+a) g - mu eta(x)eta + mixed/2
  {
    std::vector<LinearRow> rows;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        Expr rhs = sub(h2[i][j], mul(add(out.geo.trH, out.delta), out.geo.H[i][j]));
        rhs = sub(rhs, mul(add(sub(num(n - 1), out.varrho), a_at), m.g()[i][j]));
        rhs = sub(rhs, mul(num(1, 2), mixed[i][j]));
        rows.push_back({{neg(m.g()[i][j]), neg(mul(eta[i], eta[j]))}, rhs, comp_label(i, j)});
      }
    out.thmb_ricci = fill_from_rows(m, rows, SolitonKind::EtaRicci, eta, cfg);
  }
  out.direct_ricci = solve_eta_ricci(m, out.geo.induced_gamma, out.geo.induced_curv, out.u_field,
                                     eta, cfg);
  out.ricci_coherence.id = "thmb-ricci-coherence";
  if (!out.thmb_ricci.consistent || !out.direct_ricci.consistent) {
    out.ricci_coherence.applicable = false;
    out.ricci_coherence.skip_reason = "one of the two solves did not produce a soliton";
  } else {
    std::vector<std::pair<std::string, Expr>> res;
    res.push_back({"lambda", sub(out.thmb_ricci.lambda, out.direct_ricci.lambda)});
    if (out.thmb_ricci.mu.has_value() != out.direct_ricci.mu.has_value()) {
      out.ricci_coherence.check.cert.verdict = Verdict::Nonzero;
      out.ricci_coherence.note = "mu determinacy flags disagree";
    } else {
      if (out.thmb_ricci.mu) res.push_back({"mu", sub(*out.thmb_ricci.mu, *out.direct_ricci.mu)});
      out.ricci_coherence.check = certify_all(res, order, cons, cfg);
      if (!out.thmb_ricci.mu) out.ricci_coherence.note = "mu undetermined in both solves";
    }
  }

  // ThmB ii: delta H = [n(n-1) + (trH)^2 - tr(H^2) + varrho - lambda - a] g
  //          + mu eta(x)eta - mixed/2
  {
    std::vector<LinearRow> rows;
    Expr base = add(num(static_cast<long long>(n) * (n - 1)),
                    add(sub(mul(out.geo.trH, out.geo.trH), tr_h2), sub(out.varrho, a_at)));
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        Expr rhs = sub(mul(out.delta, out.geo.H[i][j]), mul(base, m.g()[i][j]));
        rhs = add(rhs, mul(num(1, 2), mixed[i][j]));
        rows.push_back({{neg(m.g()[i][j]), mul(eta[i], eta[j])}, rhs, comp_label(i, j)});
      }
    out.thmb_yamabe = fill_from_rows(m, rows, SolitonKind::EtaYamabe, eta, cfg);
  }
  out.direct_yamabe = solve_eta_yamabe(m, out.geo.induced_gamma, out.geo.induced_curv,
                                       out.u_field, eta, cfg);
  out.yamabe_coherence.id = "thmb-yamabe-coherence";
  if (!out.thmb_yamabe.consistent || !out.direct_yamabe.consistent) {
    out.yamabe_coherence.applicable = false;
    out.yamabe_coherence.skip_reason = "one of the two solves did not produce a soliton";
  } else {
    std::vector<std::pair<std::string, Expr>> res;
    res.push_back({"lambda", sub(out.thmb_yamabe.lambda, out.direct_yamabe.lambda)});
    if (out.thmb_yamabe.mu.has_value() != out.direct_yamabe.mu.has_value()) {
      out.yamabe_coherence.check.cert.verdict = Verdict::Nonzero;
      out.yamabe_coherence.note = "mu determinacy flags disagree";
    } else {
      if (out.thmb_yamabe.mu)
        res.push_back({"mu", sub(*out.thmb_yamabe.mu, *out.direct_yamabe.mu)});
      out.yamabe_coherence.check = certify_all(res, order, cons, cfg);
      if (!out.thmb_yamabe.mu) out.yamabe_coherence.note = "mu undetermined in both solves";
    }
  }

  // pseudo quasi-umbilical certificate from the yamabe identity
  out.pseudo_quasi_umbilical.id = "pseudo-quasi-umbilical";
  if (!out.thmb_yamabe.consistent) {
    out.pseudo_quasi_umbilical.applicable = false;
    out.pseudo_quasi_umbilical.skip_reason = "no eta-yamabe solution";
  } else {
    ZeroCertificate dz = certify_zero(out.delta, order, cons, cfg);
    if (dz.verdict != Verdict::Nonzero) {
      out.pseudo_quasi_umbilical.applicable = false;
      out.pseudo_quasi_umbilical.skip_reason = "inapplicable: delta did not certify nonzero";
    } else {
      Expr base = add(num(static_cast<long long>(n) * (n - 1)),
                      add(sub(mul(out.geo.trH, out.geo.trH), tr_h2),
                          sub(sub(out.varrho, out.thmb_yamabe.lambda), a_at)));
      Expr alpha = div(base, out.delta);
      Expr beta = div(out.thmb_yamabe.mu_or_zero(), out.delta);
      Mat E = mat_sub(out.geo.H,
                      mat_add(mat_scale(alpha, m.g()), mat_scale(beta, outer(eta, eta))));
      E = mat_add(E, mat_scale(div(num(1, 2), out.delta), mixed));
      std::vector<std::pair<std::string, Expr>> res;
      res.push_back({"tr E", trace_with_metric(m, E)});
      out.pseudo_quasi_umbilical.check = certify_all(res, order, cons, cfg);
      out.pseudo_quasi_umbilical.note =
          "H = alpha g + beta eta(x)eta + E with alpha, beta from the yamabe identity";
    }
  }
  return out;
}

}  // namespace sforge
