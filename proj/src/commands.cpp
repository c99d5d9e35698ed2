#include "sforge/commands.hpp"

#include "sforge/hypersurface.hpp"

#include <algorithm>
#include <stdexcept>

namespace sforge {

namespace {

std::string verdict_of(const ZeroCertificate& c) {
  switch (c.verdict) {
    case Verdict::SymbolicZero: return "certified-symbolic";
    case Verdict::NumericZero: return "certified-numeric";
    default: return "failed";
  }
}

std::string worst(const std::string& a, const std::string& b) {
  auto rank = [](const std::string& v) {
    if (v == "failed") return 3;
    if (v == "certified-numeric") return 2;
    if (v == "inapplicable" || v == "undetermined") return 1;
    return 0;  // certified-symbolic
  };
  return rank(a) >= rank(b) ? a : b;
}

CheckRecord rec_check(const std::string& id, const std::string& anchor, const ResidualCheck& rc) {
  CheckRecord out;
  out.id = id;
  out.anchor = anchor;
  out.verdict = verdict_of(rc.cert);
  if (!rc.ok()) {
    ResidualInfo ri;
    ri.max_abs = format_double(rc.cert.max_abs);
    ri.component = rc.failing_label;
    out.residual = ri;
    if (!rc.failing_label.empty())
      out.note = "fails at " + rc.failing_label + ": " + to_string(rc.failing_expr);
  }
  return out;
}

CheckRecord rec_identity(const std::string& anchor, const IdentityRecord& ir) {
  CheckRecord out;
  out.id = ir.id;
  out.anchor = anchor;
  if (!ir.applicable) {
    out.verdict = "inapplicable";
    out.note = ir.skip_reason;
    return out;
  }
  out = rec_check(ir.id, anchor, ir.check);
  if (!ir.note.empty()) out.note = out.note.empty() ? ir.note : out.note + "; " + ir.note;
  return out;
}

std::string opt_expr(const std::optional<Expr>& e) {
  return e.has_value() ? to_string(*e) : std::string("undetermined");
}

struct Engine {
  const LoadedDocument& doc;
  const CommandOptions& opt;
  Metric const& m;
  ChristoffelSymbols gamma;
  CurvatureBundle curv;
  VerificationReport report;

  Engine(const LoadedDocument& d, const CommandOptions& o)
      : doc(d), opt(o), m(d.metric), gamma(christoffel(m)), curv(curvature(m, gamma, o.weyl)) {
    report.config = o.ztc;
    report.input_sha256 = d.input_digest;
  }

  const std::vector<std::string>& order() const {
    static thread_local std::vector<std::string> o;
    o = m.chart().symbol_order();
    return o;
  }
  const std::vector<DomainConstraint>& cons() const { return m.chart().constraints; }

  ResidualCheck all(const std::vector<std::pair<std::string, Expr>>& res) const {
    return certify_all(res, m.chart().symbol_order(), m.chart().constraints, opt.ztc);
  }

  // ---- named object selection -------------------------------------------
  Vec need_vector(std::string name) const {
    if (name.empty()) name = opt.vector_name.empty() ? "V" : opt.vector_name;
    const Vec* v = doc.doc.find_vector(name);
    if (!v) throw std::runtime_error("document '" + doc.doc.name + "' has no vector named '" +
                                     name + "'");
    return *v;
  }
  bool have_vector() const {
    std::string name = opt.vector_name.empty() ? "V" : opt.vector_name;
    return doc.doc.find_vector(name) != nullptr;
  }
  std::pair<Vec, std::string> pick_eta(const Vec& v) const {
    std::string name = opt.eta_name;
    if (name.empty() && doc.doc.find_form("eta")) name = "eta";
    if (!name.empty()) {
      const Vec* f = doc.doc.find_form(name);
      if (!f) throw std::runtime_error("document '" + doc.doc.name + "' has no form named '" +
                                       name + "'");
      return {*f, "declared form '" + name + "'"};
    }
    return {lower_index(m, v), "g-dual of the potential field"};
  }

  // ---- command pieces ----------------------------------------------------
  void curvature_records();
  void frame_records();
  void classify_records(const Vec& v, TorseFormingDecomposition& dec);
  SolitonSolution solve_records(const Vec& v, const Vec& eta, const std::string& eta_note,
                                bool yamabe);
  void gradient_records(const Vec& v);
  void einstein_records();
  void identity_records();
  void hypersurface_records();
  void sphere_records();
};

void Engine::curvature_records() {
  int n = m.dim();
  const auto& coords = m.chart().coords;
  {
    CheckRecord r;
    r.id = "metric-validate";
    r.anchor = "g symmetric, det(g) != 0 on the domain, constant signature";
    r.verdict = "certified-numeric";
    r.witnesses.push_back({"signature", signature_name(m.signature())});
    r.witnesses.push_back({"det", to_string(m.det())});
    report.checks.push_back(r);
  }
  {
    CheckRecord r;
    r.id = "christoffel-torsion-free";
    r.anchor = "Gamma^k_ij = Gamma^k_ji";
    r.verdict = "certified-symbolic";
    r.note = "structural: symbols are built symmetric in (i,j)";
    report.checks.push_back(r);
  }
  {
    std::vector<std::pair<std::string, Expr>> res;
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
          Expr e = differentiate(m.g()[i][j], coords[k]);
          for (int p = 0; p < n; ++p) {
            e = sub(e, mul(gamma.gamma[p][k][i], m.g()[p][j]));
            e = sub(e, mul(gamma.gamma[p][k][j], m.g()[i][p]));
          }
          res.push_back({"k=" + std::to_string(k + 1) + " (" + std::to_string(i + 1) + "," +
                             std::to_string(j + 1) + ")",
                         e});
        }
    report.checks.push_back(rec_check("metric-compatibility", "nabla_k g_ij = 0", all(res)));
  }
  {
    std::vector<std::pair<std::string, Expr>> a12, a34, pair_sym, bianchi;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            std::string lbl = "(" + std::to_string(i + 1) + std::to_string(j + 1) +
                              std::to_string(k + 1) + std::to_string(l + 1) + ")";
            a12.push_back({lbl, add(curv.low[i][j][k][l], curv.low[j][i][k][l])});
            a34.push_back({lbl, add(curv.low[i][j][k][l], curv.low[i][j][l][k])});
            pair_sym.push_back({lbl, sub(curv.low[i][j][k][l], curv.low[k][l][i][j])});
            bianchi.push_back(
                {lbl, add(add(curv.low[i][j][k][l], curv.low[i][k][l][j]), curv.low[i][l][j][k])});
          }
    report.checks.push_back(
        rec_check("riemann-antisymmetry-12", "R_ijkl = -R_jikl", all(a12)));
    report.checks.push_back(
        rec_check("riemann-antisymmetry-34", "R_ijkl = -R_ijlk", all(a34)));
    report.checks.push_back(
        rec_check("riemann-pair-symmetry", "R_ijkl = R_klij", all(pair_sym)));
    report.checks.push_back(
        rec_check("first-bianchi", "R_ijkl + R_iklj + R_iljk = 0", all(bianchi)));
  }
  {
    std::vector<std::pair<std::string, Expr>> res;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        res.push_back({"(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")",
                       sub(curv.ricci[i][j], curv.ricci[j][i])});
    report.checks.push_back(rec_check("ricci-symmetry", "Ric_ij = Ric_ji", all(res)));
  }
  {
    Vec divr = divergence_sym2(m, gamma, curv.ricci);
    std::vector<std::pair<std::string, Expr>> res;
    for (int j = 0; j < n; ++j)
      res.push_back({"component " + std::to_string(j + 1),
                     sub(differentiate(curv.scal, coords[j]), mul(num(2), divr[j]))});
    report.checks.push_back(
        rec_check("contracted-second-bianchi", "d scal = 2 div(Ric)", all(res)));
  }
  {
    FdOracleResult fd = fd_christoffel_check(m, gamma, 16, 1e-5, opt.ztc);
    CheckRecord r;
    r.id = "fd-christoffel-oracle";
    r.anchor = "Gamma^k_ij vs central finite differences of g";
    r.verdict = fd.pass ? "certified-numeric" : "failed";
    r.witnesses.push_back({"points", std::to_string(fd.points)});
    r.witnesses.push_back({"max_rel_err", format_double(fd.max_rel_err)});
    if (!fd.note.empty()) r.note = fd.note;
    report.checks.push_back(r);
  }
  {
    CheckRecord r;
    r.id = "curvature-summary";
    r.anchor = "scal = g^ij Ric_ij";
    r.verdict = "certified-symbolic";
    for (const auto& c : report.checks) r.verdict = worst(r.verdict, c.verdict);
    r.witnesses.push_back({"scal", to_string(curv.scal)});
    r.witnesses.push_back({"dim", std::to_string(n)});
    report.checks.push_back(r);
  }
  if (opt.weyl || n < 4) {
    CheckRecord r;
    r.id = "weyl-tensor";
    r.anchor = "W = R - Schouten KN g (trace-free part)";
    if (n < 4) {
      r.verdict = "inapplicable";
      r.note = n == 3 ? "Weyl vanishes identically in n=3: conformal flatness is not decidable "
                        "by Weyl"
                      : "Weyl requires n >= 4";
    } else {
      std::vector<std::pair<std::string, Expr>> res;
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            Expr tr = num(0);
            for (int i = 0; i < n; ++i)
              for (int p = 0; p < n; ++p)
                tr = add(tr, mul(m.inv()[i][p], (*curv.weyl)[i][j][p][l]));
            res.push_back({"trace (j,l)", tr});
          }
      report.checks.push_back(rec_check("weyl-trace-free", "g^ik W_ikjl = 0", all(res)));
      return;
    }
    report.checks.push_back(r);
  }
}

void Engine::frame_records() {
  std::string fname = opt.frame_name;
  if (fname.empty() && !doc.doc.frames.empty()) fname = doc.doc.frames.front().first;
  if (fname.empty()) return;
  const auto* members = doc.doc.find_frame(fname);
  if (!members)
    throw std::runtime_error("document '" + doc.doc.name + "' has no frame named '" + fname +
                             "'");
  int n = m.dim();
  std::vector<Vec> frame;
  for (const auto& vn : *members) frame.push_back(*doc.doc.find_vector(vn));

  std::vector<std::pair<std::string, Expr>> res;
  std::string pattern;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Expr ip = inner(m, frame[i], frame[j]);
      if (i != j) {
        res.push_back({"g(E" + std::to_string(i + 1) + ",E" + std::to_string(j + 1) + ")", ip});
      } else {
        // allow +1 or -1 on the diagonal, recording the pattern
        Expr p = simplify(sub(ip, num(1)));
        bool plus = certify_zero(p, m.chart().symbol_order(), cons(), opt.ztc).ok();
        res.push_back({"g(E" + std::to_string(i + 1) + ",E" + std::to_string(i + 1) + ") -+ 1",
                       plus ? p : simplify(add(ip, num(1)))});
        pattern += plus ? '+' : '-';
      }
    }
  CheckRecord r = rec_check("frame-orthonormality", "g(E_i, E_j) = +-delta_ij", all(res));
  r.witnesses.push_back({"diagonal", pattern});
  report.checks.push_back(r);

  CheckRecord rv;
  rv.id = "frame-ricci-values";
  rv.anchor = "Ric(E_i, E_i)";
  rv.verdict = report.checks.back().verdict;
  for (int i = 0; i < n; ++i)
    rv.witnesses.push_back({"Ric(E" + std::to_string(i + 1) + ",E" + std::to_string(i + 1) + ")",
                            to_string(eval_bilinear(curv.ricci, frame[i], frame[i]))});
  rv.note = "values of Ric on the declared frame";
  report.checks.push_back(rv);
}

void Engine::classify_records(const Vec& v, TorseFormingDecomposition& dec) {
  dec = classify_vector_field(m, gamma, v, opt.ztc);
  CheckRecord r;
  r.id = "torse-forming-decomposition";
  r.anchor = "nabla_X V = a X + psi(X) V";
  if (dec.pivot_failed) {
    r.verdict = "failed";
    r.note = dec.note;
  } else if (dec.cls == VFClass::NotTorseForming) {
    r = rec_check(r.id, r.anchor, dec.residual);
    r.verdict = "failed";
    if (!dec.note.empty()) r.note = dec.note;
  } else {
    r = rec_check(r.id, r.anchor, dec.residual);
    if (!dec.note.empty()) r.note = dec.note;
  }
  r.witnesses.push_back({"class", vf_class_name(dec.cls)});
  if (dec.torse_forming() && !dec.zero_field) {
    r.witnesses.push_back({"a", to_string(dec.a)});
    for (int i = 0; i < m.dim(); ++i)
      r.witnesses.push_back({"psi_" + std::to_string(i + 1), to_string(dec.psi[i])});
    r.witnesses.push_back({"psi(V)", to_string(dec.psi_of_v)});
  }
  report.checks.push_back(r);
}

SolitonSolution Engine::solve_records(const Vec& v, const Vec& eta, const std::string& eta_note,
                                      bool yamabe) {
  SolitonSolution sol = yamabe ? solve_eta_yamabe(m, gamma, curv, v, eta, opt.ztc)
                               : solve_eta_ricci(m, gamma, curv, v, eta, opt.ztc);
  CheckRecord r;
  r.id = yamabe ? "eta-yamabe-solve" : "eta-ricci-solve";
  r.anchor = yamabe ? "(1/2) Lie_V g = (scal - lambda) g + mu eta(x)eta"
                    : "(1/2) Lie_V g + Ric = lambda g + mu eta(x)eta";
  if (!sol.consistent) {
    r.verdict = "failed";
    r.note = sol.failure_note;
    if (!sol.failing_component.empty()) {
      ResidualInfo ri;
      ri.max_abs = format_double(sol.residual.cert.max_abs);
      ri.component = sol.failing_component;
      r.residual = ri;
      r.note += "; residual " + to_string(sol.failing_residual);
    }
  } else {
    r = rec_check(r.id, r.anchor, sol.residual);
    r.witnesses.push_back({"kind", soliton_kind_name(sol.kind)});
    r.witnesses.push_back({"lambda", to_string(sol.lambda)});
    r.witnesses.push_back({"mu", opt_expr(sol.mu)});
    r.witnesses.push_back({"lambda_constant", sol.lambda_constant ? "yes" : "no"});
    if (sol.mu) r.witnesses.push_back({"mu_constant", sol.mu_constant ? "yes" : "no"});
    r.witnesses.push_back({"sign", sign_tag_name(sol.sign)});
    r.witnesses.push_back({"scal", to_string(sol.scal)});
    std::string en = eta_note;
    if (sol.eta_is_gdual)
      en += " (certified equal to the g-dual of V)";
    else if (sol.eta_is_neg_gdual)
      en += " (certified equal to minus the g-dual of V)";
    r.witnesses.push_back({"eta", en});
  }
  report.checks.push_back(r);
  return sol;
}

void Engine::gradient_records(const Vec& v) {
  std::string fname = opt.function_name;
  if (fname.empty() && doc.doc.find_function("f")) fname = "f";
  std::optional<Expr> f;
  if (!fname.empty()) {
    const Expr* fe = doc.doc.find_function(fname);
    if (!fe) throw std::runtime_error("document '" + doc.doc.name + "' has no function named '" +
                                      fname + "'");
    f = *fe;
  }
  GradientReport rep = check_gradient_potential(m, v, f, opt.ztc);
  CheckRecord r = rec_check(rep.has_function ? "gradient-potential" : "gradient-closedness",
                            rep.has_function ? "V = grad(f)" : "d(V-flat) = 0",
                            rep.check);
  r.note = r.note.empty() ? rep.note : r.note + "; " + rep.note;
  if (rep.has_function) r.witnesses.push_back({"f", to_string(*f)});
  report.checks.push_back(r);
}

void Engine::einstein_records() {
  EinsteinCandidates cand;
  std::vector<std::string> names = opt.forms;
  if (names.empty()) {
    // default candidates: the declared eta, plus psi for mixed decompositions
    if (doc.doc.find_form("eta")) names.push_back("eta");
    if (doc.doc.find_form("psi")) names.push_back("psi");
  }
  if (names.size() > 2)
    throw std::runtime_error("classify-einstein takes at most two candidate forms");
  if (names.size() >= 1) {
    const Vec* a = doc.doc.find_form(names[0]);
    if (!a) throw std::runtime_error("no form named '" + names[0] + "'");
    cand.A = *a;
  }
  if (names.size() == 2) {
    const Vec* b = doc.doc.find_form(names[1]);
    if (!b) throw std::runtime_error("no form named '" + names[1] + "'");
    cand.B = *b;
  }
  if (!opt.tensor_name.empty()) {
    const Mat* e = doc.doc.find_tensor(opt.tensor_name);
    if (!e) throw std::runtime_error("no tensor named '" + opt.tensor_name + "'");
    cand.E = *e;
  }
  EinsteinClassReport rep = einstein_classify(m, curv.ricci, cand, opt.ztc);
  if (rep.orthogonality) {
    CheckRecord r;
    r.id = "einstein-candidates-orthogonal";
    r.anchor = "g(A-sharp, B-sharp) = 0";
    r.verdict = verdict_of(*rep.orthogonality);
    report.checks.push_back(r);
  }
  if (rep.trace_free) {
    CheckRecord r;
    r.id = "einstein-remainder-trace-free";
    r.anchor = "tr_g E = 0";
    r.verdict = verdict_of(*rep.trace_free);
    report.checks.push_back(r);
  }
  CheckRecord r;
  r.id = "einstein-classification";
  r.anchor = "Ric = alpha g + beta A(x)A + gamma B(x)B + delta (A(x)B + B(x)A)";
  if (!rep.solved || !rep.residual.ok()) {
    r.verdict = "failed";
    r.note = rep.note;
    if (!rep.residual.failing_label.empty()) {
      ResidualInfo ri;
      ri.max_abs = format_double(rep.residual.cert.max_abs);
      ri.component = rep.residual.failing_label;
      r.residual = ri;
    }
  } else {
    r.verdict = verdict_of(rep.residual.cert);
  }
  r.witnesses.push_back({"class", einstein_class_name(rep.cls)});
  if (rep.alpha) r.witnesses.push_back({"alpha", to_string(*rep.alpha)});
  if (rep.beta) r.witnesses.push_back({"beta", to_string(*rep.beta)});
  if (rep.gamma) r.witnesses.push_back({"gamma", to_string(*rep.gamma)});
  if (rep.delta) r.witnesses.push_back({"delta", to_string(*rep.delta)});
  report.checks.push_back(r);
}

void Engine::identity_records() {
  Vec v = need_vector("");
  TorseFormingDecomposition dec;
  classify_records(v, dec);
  auto [eta, eta_note] = pick_eta(v);
  SolitonSolution rsol = solve_records(v, eta, eta_note, false);
  SolitonSolution ysol = solve_records(v, eta, eta_note, true);
  gradient_records(v);

  for (const auto& ir : verify_concircular_identities(m, gamma, curv, v, dec, opt.ztc))
    report.checks.push_back(rec_identity(
        "V = grad(|V|^2)/(2a); div V = a n; R(X,V)V = X(a)V - V(a)X; Ric(V,V) = (1-n)V(a)", ir));
  for (const auto& ir : verify_proposition_p(m, curv, v, eta, dec, rsol, opt.ztc))
    report.checks.push_back(rec_identity(
        "(lambda-a) + mu|V|^2 = 0; grad lambda = 2a mu (n-3)/(n-1) V; grad mu = -4(n-2)/(n-1) a "
        "mu V/|V|^2; grad scal = 2(n-3) a mu V",
        ir));
  for (const auto& ir : verify_torqued_structure(m, curv, v, eta, dec, rsol, opt.ztc))
    report.checks.push_back(rec_identity(
        "Ric = (lambda-a) g + mu eta(x)eta - (psi(x)eta + eta(x)psi)/2; eta(U) = psi(V) = 0",
        ir));
  {
    std::string fname = opt.function_name;
    if (fname.empty() && doc.doc.find_function("f")) fname = "f";
    CheckRecord hr;
    hr.id = "hessian-torse-forming";
    hr.anchor = "Hess(sigma) = a g + delta dsigma(x)dsigma";
    if (fname.empty()) {
      hr.verdict = "inapplicable";
      hr.note = "no potential function declared";
      report.checks.push_back(hr);
    } else {
      HessianReport rep =
          verify_hessian_torse_forming(m, gamma, *doc.doc.find_function(fname), opt.ztc);
      if (!rep.applicable) {
        hr.verdict = "inapplicable";
        hr.note = rep.skip_reason;
      } else if (!rep.solved) {
        hr.verdict = "failed";
        hr.note = rep.note;
      } else {
        hr = rec_check(hr.id, hr.anchor, rep.residual);
        hr.witnesses.push_back({"a", to_string(rep.a)});
        hr.witnesses.push_back({"delta", to_string(rep.delta)});
      }
      report.checks.push_back(hr);
      for (const auto& ir : rep.consistency)
        report.checks.push_back(
            rec_identity("grad(sigma) classifies with (a, psi = delta dsigma)", ir));
    }
  }
  for (const auto& ir : verify_yamabe_identities(m, gamma, curv, v, eta, dec, ysol, opt.ztc)) {
    std::string anchor = "scal - lambda - a - psi(V) + mu|V|^2 = 0";
    if (ir.id == "yamabe-e2") anchor = "(scal - lambda - a - psi(V))|U|^2 + mu psi(V)^2 = 0";
    if (ir.id == "yamabe-mu-or-cauchy-equality") anchor = "mu = 0 or psi(V)^2 = |V|^2 |U|^2";
    if (ir.id == "yamabe-mu-zero-lambda-formula") anchor = "lambda = scal - V(|V|^2)/(2|V|^2)";
    if (ir.id == "yamabe-concircular-branch")
      anchor = "a = 0, or mu = 0, or (lambda, mu) = (scal - a + n|V|^2, n)";
    if (ir.id == "yamabe-e4") anchor = "lambda = (beta + mu/n)|V|^2 + alpha n - a";
    report.checks.push_back(rec_identity(anchor, ir));
  }
}

void Engine::hypersurface_records() {
  if (!doc.target)
    throw std::runtime_error("document '" + doc.doc.name + "' has no immersion block");
  Immersion imm{doc.doc.chart, doc.target->metric, doc.doc.immersion_map};
  InducedGeometry geo = induce_geometry(imm, opt.ztc);
  const Metric& mi = geo.induced;
  auto icons = mi.chart().constraints;
  auto iorder = mi.chart().symbol_order();

  report.checks.push_back(
      rec_check("immersion-rank", "rank(d phi) = dim M at sampled points", geo.rank_cert));
  {
    std::vector<std::pair<std::string, Expr>> res;
    for (int i = 0; i < mi.dim(); ++i)
      for (int j = i; j < mi.dim(); ++j)
        res.push_back({"(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")",
                       sub(m.g()[i][j], mi.g()[i][j])});
    report.checks.push_back(rec_check("induced-metric-consistency",
                                      "declared g = pullback of g~ along phi",
                                      certify_all(res, iorder, icons, opt.ztc)));
  }
  report.checks.push_back(
      rec_check("normal-orthogonality", "g~(N, d phi(d_i)) = 0", geo.orthogonality));
  {
    CheckRecord r;
    r.id = "normal-unit";
    r.anchor = "g~(N, N) = +-1";
    r.verdict = verdict_of(geo.unit_normal);
    r.witnesses.push_back({"g~(N,N)", std::to_string(geo.normal_sign)});
    for (std::size_t a = 0; a < geo.normal.size(); ++a)
      r.witnesses.push_back({"N_" + std::to_string(a + 1), to_string(geo.normal[a])});
    if (!geo.orientation_note.empty()) r.note = geo.orientation_note;
    report.checks.push_back(r);
  }
  {
    CheckRecord r = rec_check("weingarten-compatibility", "nabla~_X N = -B(X); H(X,Y) = g(B X, Y)",
                              geo.weingarten);
    int n = mi.dim();
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        r.witnesses.push_back({"H(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")",
                               to_string(geo.H[i][j])});
    r.witnesses.push_back({"mean_curvature", to_string(geo.mean_curvature)});
    report.checks.push_back(r);
  }

  // ambient field and its classification
  std::string avn = opt.ambient_vector.empty() ? "V" : opt.ambient_vector;
  const Vec* av = doc.target->doc.find_vector(avn);
  if (!av)
    throw std::runtime_error("ambient document '" + doc.target->doc.name +
                             "' has no vector named '" + avn + "'");
  ChristoffelSymbols agamma = christoffel(imm.ambient);
  CurvatureBundle acurv = curvature(imm.ambient, agamma);
  TorseFormingDecomposition adec = classify_vector_field(imm.ambient, agamma, *av, opt.ztc);
  {
    CheckRecord r = rec_check("ambient-field-classification", "nabla~_X V = a X + psi(X) V",
                              adec.residual);
    if (!adec.torse_forming()) r.verdict = "failed";
    r.witnesses.push_back({"class", vf_class_name(adec.cls)});
    if (adec.torse_forming()) r.witnesses.push_back({"a", to_string(adec.a)});
    report.checks.push_back(r);
  }

  AmbientSplit split = split_ambient_field(imm, geo, *av, opt.ztc);
  {
    CheckRecord r = rec_check("split-reconstruction", "d phi(V^T) + rho N = V along phi",
                              split.reconstruction);
    r.witnesses.push_back({"rho", to_string(split.rho)});
    for (int i = 0; i < mi.dim(); ++i)
      r.witnesses.push_back({"VT_" + std::to_string(i + 1), to_string(split.tangential[i])});
    report.checks.push_back(r);
  }

  ConstantCurvature cc = constant_curvature(imm.ambient, acurv, opt.ztc);
  {
    CheckRecord r = rec_check("ambient-constant-curvature",
                              "R~_ijkl = c (g~_ik g~_jl - g~_il g~_jk)", cc.residual);
    if (cc.certified) r.witnesses.push_back({"c", to_string(cc.c)});
    report.checks.push_back(r);
  }
  {
    GaussReport gr = verify_gauss_equation(geo, cc, opt.ztc);
    CheckRecord r1, r2;
    if (!gr.applicable) {
      r1.id = "gauss-ricci";
      r1.anchor = "Ric = tr(H) H - H^2 + (n-1)c g";
      r1.verdict = "inapplicable";
      r1.note = gr.skip_reason;
      r2 = r1;
      r2.id = "gauss-scal";
      r2.anchor = "scal = n(n-1)c + tr(H)^2 - tr(H^2)";
    } else {
      r1 = rec_check("gauss-ricci", "Ric = tr(H) H - H^2 + (n-1)c g", gr.ricci_residual);
      r2 = rec_check("gauss-scal", "scal = n(n-1)c + tr(H)^2 - tr(H^2)", gr.scal_residual);
      r2.witnesses.push_back({"scal", to_string(geo.induced_curv.scal)});
    }
    report.checks.push_back(r1);
    report.checks.push_back(r2);
  }

  AmbientDecomposition dec = pull_back_decomposition(imm, adec, opt.ztc);
  for (bool yamabe : {false, true}) {
    SubmanifoldSolitonReport rep =
        solve_submanifold_soliton(imm, geo, split, dec, cc, yamabe, opt.ztc);
    CheckRecord r;
    r.id = yamabe ? "hypersurface-eta-yamabe-solve" : "hypersurface-eta-ricci-solve";
    r.anchor = yamabe ? "(1/2) Lie_{V^T} g = (scal - lambda) g + mu eta(x)eta"
                      : "(1/2) Lie_{V^T} g + Ric = lambda g + mu eta(x)eta";
    if (!rep.solution.consistent) {
      r.verdict = "failed";
      r.note = rep.solution.failure_note;
    } else {
      r = rec_check(r.id, r.anchor, rep.solution.residual);
      r.witnesses.push_back({"lambda", to_string(rep.solution.lambda)});
      r.witnesses.push_back({"mu", opt_expr(rep.solution.mu)});
      r.witnesses.push_back({"sign", sign_tag_name(rep.solution.sign)});
      r.witnesses.push_back({"VT_class", vf_class_name(rep.tangential_class.cls)});
    }
    report.checks.push_back(r);
    report.checks.push_back(rec_identity(
        yamabe ? "(scal - lambda - a) g - rho H + mu eta(x)eta - (psi(x)eta + eta(x)psi)/2 = 0"
               : "Ric = (lambda - a) g - rho H + mu eta(x)eta - (psi(x)eta + eta(x)psi)/2",
        rep.structure_residual));
    report.checks.push_back(rec_identity(
        yamabe ? "rho H = (n(n-1)c + tr(H)^2 - tr(H^2) - lambda - a) g + mu eta(x)eta - "
                 "(psi(x)eta + eta(x)psi)/2"
               : "H^2 = (rho + tr H) H + ((n-1)c - lambda + a) g - mu eta(x)eta + (psi(x)eta + "
                 "eta(x)psi)/2",
        rep.constant_curvature_form));
    report.checks.push_back(rec_identity(
        yamabe ? "scal = lambda + a - (mu/n)|V^T|^2 (minimal M, concircular V)"
               : "scal = n(lambda - a) + mu|V^T|^2 (minimal M, concircular V)",
        rep.minimal_scal));

    if (!yamabe) {
      // umbilical classification and the quasi-umbilical coefficient check
      UmbilicalReport umb = umbilical_classify(geo, {}, opt.ztc);
      CheckRecord ur;
      ur.id = "umbilical-classification";
      ur.anchor = "H = alpha g + beta varpi(x)varpi + gamma eta(x)eta";
      if (!umb.solved && umb.cls == UmbilicalClass::Unclassified) {
        ur.verdict = "failed";
        ur.note = umb.note;
      } else {
        ur.verdict = verdict_of(umb.residual.cert);
        if (umb.cls == UmbilicalClass::PseudoQuasiUmbilical && umb.trace_free)
          ur.verdict = verdict_of(*umb.trace_free);
      }
      ur.witnesses.push_back({"class", umbilical_class_name(umb.cls)});
      if (umb.alpha) ur.witnesses.push_back({"alpha", to_string(*umb.alpha)});
      if (umb.beta) ur.witnesses.push_back({"beta", to_string(*umb.beta)});
      if (umb.gamma) ur.witnesses.push_back({"gamma", to_string(*umb.gamma)});
      report.checks.push_back(ur);

      Vec eta_m = lower_index(mi, split.tangential);
      EinsteinCandidates ec;
      bool eta_nonzero = false;
      for (const Expr& e : eta_m)
        if (!simplify(e).is_zero()) eta_nonzero = true;
      if (eta_nonzero) ec.A = eta_m;
      EinsteinClassReport einstein = einstein_classify(mi, geo.induced_curv.ricci, ec, opt.ztc);
      report.checks.push_back(rec_identity(
          "H = ((lambda - a - alpha)/rho) g + ((mu - beta)/rho) eta(x)eta",
          umbilical_soliton_crosscheck(geo, split, dec, rep.solution, einstein, opt.ztc)));
    }
  }
}

void Engine::sphere_records() {
  if (!doc.target || !doc.target->target)
    throw std::runtime_error("sphere-hypersurface needs an immersion chain M -> sphere -> flat "
                             "space");
  Immersion inner{doc.doc.chart, doc.target->metric, doc.doc.immersion_map};
  Immersion outer{doc.target->doc.chart, doc.target->target->metric,
                  doc.target->doc.immersion_map};
  std::string avn = opt.ambient_vector.empty() ? "V" : opt.ambient_vector;
  const Vec* av = doc.target->target->doc.find_vector(avn);
  if (!av)
    throw std::runtime_error("outer ambient document '" + doc.target->target->doc.name +
                             "' has no vector named '" + avn + "'");
  SphereChainAnalysis an = sphere_hypersurface_analysis(inner, outer, *av, opt.ztc);
  {
    CheckRecord r = rec_check("chain-unit-sphere", "|phi|^2 = 1", an.unit_sphere_cert);
    if (!an.chain_valid && !an.chain_note.empty())
      r.note = r.note.empty() ? an.chain_note : r.note + "; " + an.chain_note;
    report.checks.push_back(r);
    report.checks.push_back(rec_check("chain-sphere-metric",
                                      "declared sphere metric = pullback of the flat metric",
                                      an.sphere_metric_cert));
  }
  if (!an.chain_valid) return;
  {
    CheckRecord r = rec_check("ambient-field-classification", "D_X V = a X + psi(X) V",
                              an.ambient_class.residual);
    if (!an.ambient_class.torse_forming()) r.verdict = "failed";
    r.witnesses.push_back({"class", vf_class_name(an.ambient_class.cls)});
    report.checks.push_back(r);
  }
  {
    CheckRecord r = rec_check("chain-split", "V = U + delta N + varrho N_S", an.u_tangency);
    r.witnesses.push_back({"delta", to_string(an.delta)});
    r.witnesses.push_back({"varrho", to_string(an.varrho)});
    for (int i = 0; i < an.geo.induced.dim(); ++i)
      r.witnesses.push_back({"U_" + std::to_string(i + 1), to_string(an.u_field[i])});
    report.checks.push_back(r);
  }
  const char* anchors[] = {
      "nabla-bar_X xi + (varrho - a) X = psi(X) xi",
      "X(varrho) - g(X, xi) = psi(X) varrho",
      "nabla_X U = psi(X) U - (varrho - a) X + delta B(X)",
      "psi(X) delta = g(B(X), U) + X(delta)",
      "Lie_U g = psi(x)U-flat + U-flat(x)psi - 2(varrho - a) g + 2 delta H",
  };
  for (std::size_t k = 0; k < an.identities.size(); ++k)
    report.checks.push_back(rec_identity(anchors[k], an.identities[k]));

  auto push_solve = [&](const char* id, const char* anchor, const SolitonSolution& s) {
    CheckRecord r;
    r.id = id;
    r.anchor = anchor;
    if (!s.consistent) {
      r.verdict = "failed";
      r.note = s.failure_note;
      if (!s.failing_component.empty()) r.note += " at " + s.failing_component;
    } else {
      r = rec_check(id, anchor, s.residual);
      r.witnesses.push_back({"lambda", to_string(s.lambda)});
      r.witnesses.push_back({"mu", opt_expr(s.mu)});
    }
    report.checks.push_back(r);
  };
  push_solve("thmb-ricci-solve",
             "H^2 = (tr H + delta) H + (n-1-varrho-lambda+a) g - mu eta(x)eta + (psi(x)U-flat + "
             "U-flat(x)psi)/2",
             an.thmb_ricci);
  push_solve("direct-ricci-solve", "(1/2) Lie_U g + Ric = lambda g + mu eta(x)eta",
             an.direct_ricci);
  report.checks.push_back(
      rec_identity("lambda from the H^2 identity equals lambda from the soliton equation",
                   an.ricci_coherence));
  push_solve("thmb-yamabe-solve",
             "delta H = (n(n-1) + tr(H)^2 - tr(H^2) + varrho - lambda - a) g + mu eta(x)eta - "
             "(psi(x)U-flat + U-flat(x)psi)/2",
             an.thmb_yamabe);
  push_solve("direct-yamabe-solve", "(1/2) Lie_U g = (scal - lambda) g + mu eta(x)eta",
             an.direct_yamabe);
  report.checks.push_back(
      rec_identity("lambda from the delta H identity equals lambda from the soliton equation",
                   an.yamabe_coherence));
  report.checks.push_back(rec_identity(
      "H = alpha g + beta eta(x)eta + E with tr_g E = 0", an.pseudo_quasi_umbilical));
}

}  // namespace

const std::vector<std::string>& known_commands() {
  static const std::vector<std::string> cmds = {
      "curvature",       "classify-vector",  "solve-ricci",        "solve-yamabe",
      "check-gradient",  "classify-einstein", "verify-identities", "hypersurface",
      "sphere-hypersurface", "verify-all"};
  return cmds;
}

VerificationReport run_command(const LoadedDocument& doc, const std::string& command,
                               const CommandOptions& opt) {
  Engine eng(doc, opt);
  if (command == "curvature") {
    eng.curvature_records();
    eng.frame_records();
  } else if (command == "classify-vector") {
    Vec v = eng.need_vector("");
    TorseFormingDecomposition dec;
    eng.classify_records(v, dec);
  } else if (command == "solve-ricci" || command == "solve-yamabe") {
    Vec v = eng.need_vector("");
    auto [eta, note] = eng.pick_eta(v);
    eng.solve_records(v, eta, note, command == "solve-yamabe");
  } else if (command == "check-gradient") {
    eng.gradient_records(eng.need_vector(""));
  } else if (command == "classify-einstein") {
    eng.einstein_records();
  } else if (command == "verify-identities") {
    eng.identity_records();
  } else if (command == "hypersurface") {
    eng.hypersurface_records();
  } else if (command == "sphere-hypersurface") {
    eng.sphere_records();
  } else if (command == "verify-all") {
    eng.curvature_records();
    eng.frame_records();
    if (eng.have_vector()) eng.identity_records();
    eng.einstein_records();
    if (doc.target) {
      eng.hypersurface_records();
      if (doc.target->target) eng.sphere_records();
    }
  } else {
    throw std::runtime_error("unknown command '" + command + "'");
  }
  return eng.report;
}

}  // namespace sforge
