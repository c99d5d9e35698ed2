#include "sforge/geometry.hpp"

#include "sforge/linsolve.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace sforge {

Mat zero_mat(int n) { return Mat(n, Vec(n, num(0))); }
Vec zero_vec(int n) { return Vec(n, num(0)); }

std::vector<std::string> Chart::symbol_order() const {
  std::vector<std::string> out = coords;
  out.insert(out.end(), params.begin(), params.end());
  return out;
}

void Chart::validate() const {
  std::set<std::string> seen;
  for (const std::string& s : symbol_order()) {
    if (!seen.insert(s).second)
      throw std::runtime_error("chart '" + name + "': duplicate symbol '" + s + "'");
  }
  std::set<std::string> declared;
  // constraint bounds may reference constants and symbols declared earlier
  // in coordinate-then-parameter order
  std::vector<std::string> order = symbol_order();
  for (const auto& c : constraints) {
    if (!seen.count(c.symbol))
      throw std::runtime_error("chart '" + name + "': constraint on undeclared symbol '" +
                               c.symbol + "'");
  }
  for (const std::string& s : order) {
    for (const auto& c : constraints) {
      if (c.symbol != s) continue;
      for (const std::string& used : free_symbols(c.bound)) {
        if (!declared.count(used))
          throw std::runtime_error("chart '" + name + "': constraint bound for '" + s +
                                   "' references '" + used + "' which is not declared earlier");
      }
    }
    declared.insert(s);
  }
}

std::string signature_name(Signature s) {
  switch (s) {
    case Signature::Riemannian: return "riemannian";
    case Signature::Lorentzian: return "lorentzian";
    case Signature::General: return "general";
  }
  return "?";
}

namespace {

Mat adjugate(const Mat& m) {
  int n = static_cast<int>(m.size());
  Mat out = zero_mat(n);
  if (n == 1) {
    out[0][0] = num(1);
    return out;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Mat minor;
      for (int r = 0; r < n; ++r) {
        if (r == i) continue;
        Vec row;
        for (int c = 0; c < n; ++c)
          if (c != j) row.push_back(m[r][c]);
        minor.push_back(std::move(row));
      }
      Expr cof = symbolic_det(minor);
      if ((i + j) % 2 == 1) cof = neg(cof);
      out[j][i] = simplify(cof);  // adjugate transposes the cofactor matrix
    }
  }
  return out;
}

}  // namespace

Metric Metric::build(ChartPtr chart, Mat components, const ZeroTestConfig& cfg) {
  chart->validate();
  int n = chart->dim();
  if (static_cast<int>(components.size()) != n)
    throw std::runtime_error("metric of chart '" + chart->name + "': wrong dimension");
  Metric m;
  m.chart_ = chart;
  m.g_ = zero_mat(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      m.g_[i][j] = simplify(components[i][j]);
      if (j < i && m.g_[i][j] != simplify(components[j][i]))
        throw std::runtime_error("metric of chart '" + chart->name + "': component (" +
                                 std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                 ") is not symmetric");
    }
  m.det_ = simplify(symbolic_det(m.g_));
  m.nondegeneracy_ = certify_zero(m.det_, chart->symbol_order(), chart->constraints, cfg);
  if (m.nondegeneracy_.verdict != Verdict::Nonzero)
    throw std::runtime_error("metric of chart '" + chart->name +
                             "': determinant did not certify nonzero on the domain (" +
                             verdict_name(m.nondegeneracy_.verdict) + ")");
  Mat adj = adjugate(m.g_);
  m.inv_ = zero_mat(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m.inv_[i][j] = simplify(div(adj[i][j], m.det_));

  // signature: eigenvalue sign counts at sampled points, constant across all
  Sampler sampler(chart->symbol_order(), chart->constraints, cfg.seed);
  int neg = -1;
  int used = 0;
  for (int k = 0; k < std::min(cfg.samples, 8) || used == 0; ++k) {
    if (k > 64) break;
    Eigen::MatrixXd gm(n, n);
    try {
      auto pt = sampler.next();
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) gm(i, j) = evaluate(m.g_[i][j], pt);
    } catch (const EvalError&) {
      continue;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gm);
    int cneg = 0;
    for (int i = 0; i < n; ++i)
      if (es.eigenvalues()(i) < 0) ++cneg;
    if (neg == -1) neg = cneg;
    if (neg != cneg)
      throw std::runtime_error("metric of chart '" + chart->name +
                               "': signature is not constant across sample points");
    ++used;
  }
  if (neg < 0)
    throw std::runtime_error("metric of chart '" + chart->name +
                             "': could not sample the domain for the signature");
  m.neg_eigen_ = neg;
  m.signature_ = neg == 0 ? Signature::Riemannian
                          : (neg == 1 ? Signature::Lorentzian : Signature::General);
  return m;
}

ChristoffelSymbols christoffel(const Metric& m) {
  int n = m.dim();
  const auto& coords = m.chart().coords;
  ChristoffelSymbols out;
  out.gamma.assign(n, zero_mat(n));
  // precompute metric derivatives
  std::vector<Mat> dg(n, zero_mat(n));
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) dg[l][i][j] = differentiate(m.g()[i][j], coords[l]);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        Expr acc = num(0);
        for (int l = 0; l < n; ++l) {
          Expr t = add(sub(add(dg[i][j][l], dg[j][i][l]), dg[l][i][j]), num(0));
          acc = add(acc, mul(m.inv()[k][l], t));
        }
        Expr v = simplify(mul(num(1, 2), acc));
        out.gamma[k][i][j] = v;
        out.gamma[k][j][i] = v;
      }
  return out;
}

CurvatureBundle curvature(const Metric& m, const ChristoffelSymbols& gamma, bool with_weyl) {
  int n = m.dim();
  const auto& coords = m.chart().coords;
  const auto& G = gamma.gamma;
  CurvatureBundle out;
  out.up.assign(n, std::vector<std::vector<Vec>>(n, std::vector<Vec>(n, zero_vec(n))));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          if (j < i) {
            out.up[i][j][k][l] = neg(out.up[j][i][k][l]);
            continue;
          }
          Expr acc = sub(differentiate(G[l][j][k], coords[i]), differentiate(G[l][i][k], coords[j]));
          for (int p = 0; p < n; ++p) {
            acc = add(acc, sub(mul(G[l][i][p], G[p][j][k]), mul(G[l][j][p], G[p][i][k])));
          }
          out.up[i][j][k][l] = simplify(acc);
        }
    }
  out.low.assign(n, std::vector<Mat>(n, zero_mat(n)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          Expr acc = num(0);
          for (int p = 0; p < n; ++p) acc = add(acc, mul(m.g()[k][p], out.up[i][j][l][p]));
          out.low[i][j][k][l] = simplify(acc);
        }
  out.ricci = zero_mat(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Expr acc = num(0);
      for (int p = 0; p < n; ++p) acc = add(acc, out.up[p][i][j][p]);
      Expr v = simplify(acc);
      out.ricci[i][j] = v;
      out.ricci[j][i] = v;
    }
  out.scal = simplify(trace_with_metric(m, out.ricci));
  if (with_weyl && n >= 4) {
    auto& w = out.weyl.emplace(n, std::vector<Mat>(n, zero_mat(n)));
    Expr s_coef = div(out.scal, num(static_cast<long long>((n - 1)) * (n - 2)));
    Expr r_coef = num(1, n - 2);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            const Mat& g = m.g();
            const Mat& ric = out.ricci;
            Expr kn = add(sub(mul(ric[i][k], g[j][l]), mul(ric[i][l], g[j][k])),
                          sub(mul(ric[j][l], g[i][k]), mul(ric[j][k], g[i][l])));
            Expr gg = sub(mul(g[i][k], g[j][l]), mul(g[i][l], g[j][k]));
            w[i][j][k][l] = simplify(
                add(sub(out.low[i][j][k][l], mul(r_coef, kn)), mul(s_coef, gg)));
          }
  }
  return out;
}

Mat covariant_derivative_vector(const Metric& m, const ChristoffelSymbols& gamma, const Vec& v) {
  int n = m.dim();
  const auto& coords = m.chart().coords;
  Mat out = zero_mat(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Expr acc = differentiate(v[j], coords[i]);
      for (int k = 0; k < n; ++k) acc = add(acc, mul(gamma.gamma[j][i][k], v[k]));
      out[i][j] = simplify(acc);
    }
  return out;
}

Mat covariant_derivative_oneform(const Metric& m, const ChristoffelSymbols& gamma, const Vec& w) {
  int n = m.dim();
  const auto& coords = m.chart().coords;
  Mat out = zero_mat(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Expr acc = differentiate(w[j], coords[i]);
      for (int k = 0; k < n; ++k) acc = sub(acc, mul(gamma.gamma[k][i][j], w[k]));
      out[i][j] = simplify(acc);
    }
  return out;
}

Mat lie_derivative_metric(const Metric& m, const ChristoffelSymbols& gamma, const Vec& v) {
  int n = m.dim();
  Vec vlow = lower_index(m, v);
  Mat dv = covariant_derivative_oneform(m, gamma, vlow);
  Mat out = zero_mat(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out[i][j] = simplify(add(dv[i][j], dv[j][i]));
  return out;
}

Vec grad(const Metric& m, const Expr& f) {
  int n = m.dim();
  const auto& coords = m.chart().coords;
  Vec out = zero_vec(n);
  for (int i = 0; i < n; ++i) {
    Expr acc = num(0);
    for (int j = 0; j < n; ++j) acc = add(acc, mul(m.inv()[i][j], differentiate(f, coords[j])));
    out[i] = simplify(acc);
  }
  return out;
}

Mat hessian(const Metric& m, const ChristoffelSymbols& gamma, const Expr& f) {
  int n = m.dim();
  const auto& coords = m.chart().coords;
  Mat out = zero_mat(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Expr acc = differentiate(differentiate(f, coords[i]), coords[j]);
      for (int k = 0; k < n; ++k)
        acc = sub(acc, mul(gamma.gamma[k][i][j], differentiate(f, coords[k])));
      Expr v = simplify(acc);
      out[i][j] = v;
      out[j][i] = v;
    }
  return out;
}

Expr divergence(const Metric& m, const ChristoffelSymbols& gamma, const Vec& v) {
  Mat dv = covariant_derivative_vector(m, gamma, v);
  Expr acc = num(0);
  for (int i = 0; i < m.dim(); ++i) acc = add(acc, dv[i][i]);
  return simplify(acc);
}

Vec lower_index(const Metric& m, const Vec& v) {
  int n = m.dim();
  Vec out = zero_vec(n);
  for (int i = 0; i < n; ++i) {
    Expr acc = num(0);
    for (int j = 0; j < n; ++j) acc = add(acc, mul(m.g()[i][j], v[j]));
    out[i] = simplify(acc);
  }
  return out;
}

Vec raise_index(const Metric& m, const Vec& w) {
  int n = m.dim();
  Vec out = zero_vec(n);
  for (int i = 0; i < n; ++i) {
    Expr acc = num(0);
    for (int j = 0; j < n; ++j) acc = add(acc, mul(m.inv()[i][j], w[j]));
    out[i] = simplify(acc);
  }
  return out;
}

Expr inner(const Metric& m, const Vec& a, const Vec& b) {
  Expr acc = num(0);
  for (int i = 0; i < m.dim(); ++i)
    for (int j = 0; j < m.dim(); ++j) acc = add(acc, mul(m.g()[i][j], mul(a[i], b[j])));
  return simplify(acc);
}

Expr norm_sq(const Metric& m, const Vec& v) { return inner(m, v, v); }

Vec lie_bracket(const Chart& chart, const Vec& x, const Vec& y) {
  int n = chart.dim();
  Vec out = zero_vec(n);
  for (int j = 0; j < n; ++j) {
    Expr acc = num(0);
    for (int i = 0; i < n; ++i)
      acc = add(acc, sub(mul(x[i], differentiate(y[j], chart.coords[i])),
                         mul(y[i], differentiate(x[j], chart.coords[i]))));
    out[j] = simplify(acc);
  }
  return out;
}

Mat exterior_derivative_oneform(const Chart& chart, const Vec& w) {
  int n = chart.dim();
  Mat out = zero_mat(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out[i][j] = simplify(sub(differentiate(w[j], chart.coords[i]),
                               differentiate(w[i], chart.coords[j])));
  return out;
}

Vec divergence_sym2(const Metric& m, const ChristoffelSymbols& gamma, const Mat& t) {
  int n = m.dim();
  const auto& coords = m.chart().coords;
  // (nabla_i T)_{kj} = d_i T_kj - Gamma^p_{ik} T_pj - Gamma^p_{ij} T_kp
  Vec out = zero_vec(n);
  for (int j = 0; j < n; ++j) {
    Expr acc = num(0);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        Expr nt = differentiate(t[k][j], coords[i]);
        for (int p = 0; p < n; ++p) {
          nt = sub(nt, mul(gamma.gamma[p][i][k], t[p][j]));
          nt = sub(nt, mul(gamma.gamma[p][i][j], t[k][p]));
        }
        acc = add(acc, mul(m.inv()[i][k], nt));
      }
    out[j] = simplify(acc);
  }
  return out;
}

Expr eval_bilinear(const Mat& t, const Vec& x, const Vec& y) {
  Expr acc = num(0);
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = 0; j < t.size(); ++j) acc = add(acc, mul(t[i][j], mul(x[i], y[j])));
  return simplify(acc);
}

Vec curvature_apply(const CurvatureBundle& r, const Vec& x, const Vec& y, const Vec& z) {
  int n = static_cast<int>(r.up.size());
  Vec out = zero_vec(n);
  for (int l = 0; l < n; ++l) {
    Expr acc = num(0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          acc = add(acc, mul(mul(x[i], y[j]), mul(z[k], r.up[i][j][k][l])));
    out[l] = simplify(acc);
  }
  return out;
}

Expr trace_with_metric(const Metric& m, const Mat& t) {
  Expr acc = num(0);
  for (int i = 0; i < m.dim(); ++i)
    for (int j = 0; j < m.dim(); ++j) acc = add(acc, mul(m.inv()[i][j], t[i][j]));
  return simplify(acc);
}

Mat sym_outer(const Vec& a, const Vec& b) {
  int n = static_cast<int>(a.size());
  Mat out = zero_mat(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out[i][j] = simplify(add(mul(a[i], b[j]), mul(a[j], b[i])));
  return out;
}

Mat outer(const Vec& a, const Vec& b) {
  int n = static_cast<int>(a.size());
  Mat out = zero_mat(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out[i][j] = simplify(mul(a[i], b[j]));
  return out;
}

Mat mat_sub(const Mat& a, const Mat& b) {
  Mat out = a;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) out[i][j] = simplify(sub(a[i][j], b[i][j]));
  return out;
}

Mat mat_add(const Mat& a, const Mat& b) {
  Mat out = a;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) out[i][j] = simplify(add(a[i][j], b[i][j]));
  return out;
}

Mat mat_scale(const Expr& s, const Mat& a) {
  Mat out = a;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) out[i][j] = simplify(mul(s, a[i][j]));
  return out;
}

FdOracleResult fd_christoffel_check(const Metric& m, const ChristoffelSymbols& gamma,
                                    int points, double rel_tol, const ZeroTestConfig& cfg) {
  int n = m.dim();
  const auto& coords = m.chart().coords;
  FdOracleResult out;
  out.pass = true;
  Sampler sampler(m.chart().symbol_order(), m.chart().constraints, cfg.seed ^ 0xFD);
  int produced = 0, attempts = 0;
  while (produced < points && attempts < 16 * points + 64) {
    ++attempts;
    std::map<std::string, double> pt;
    try {
      pt = sampler.next();
      // numeric metric and central-difference derivatives
      auto eval_g = [&](const std::map<std::string, double>& q) {
        Eigen::MatrixXd gm(n, n);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) gm(i, j) = evaluate(m.g()[i][j], q);
        return gm;
      };
      Eigen::MatrixXd g0 = eval_g(pt);
      Eigen::MatrixXd ginv = g0.inverse();
      std::vector<Eigen::MatrixXd> dg;
      for (int l = 0; l < n; ++l) {
        double h = 1e-5 * std::max(1.0, std::abs(pt.at(coords[l])));
        auto hi = pt, lo = pt;
        hi[coords[l]] += h;
        lo[coords[l]] -= h;
        dg.push_back((eval_g(hi) - eval_g(lo)) / (2 * h));
      }
      for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
          for (int j = i; j < n; ++j) {
            double fd = 0;
            for (int l = 0; l < n; ++l)
              fd += 0.5 * ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
            double sy = evaluate(gamma.gamma[k][i][j], pt);
            double err = std::abs(fd - sy) / std::max({1.0, std::abs(fd), std::abs(sy)});
            out.max_rel_err = std::max(out.max_rel_err, err);
            if (err > rel_tol) out.pass = false;
          }
      ++produced;
    } catch (const EvalError& e) {
      out.note = std::string("sampling: ") + e.what();
      continue;
    }
  }
  out.points = produced;
  if (produced < points) {
    out.pass = false;
    if (out.note.empty()) out.note = "insufficient sample points";
  }
  return out;
}

ConstantCurvature constant_curvature(const Metric& m, const CurvatureBundle& r,
                                     const ZeroTestConfig& cfg) {
  ConstantCurvature out;
  int n = m.dim();
  out.c = simplify(div(r.scal, num(static_cast<long long>(n) * (n - 1))));
  std::vector<std::pair<std::string, Expr>> residuals;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          Expr model = mul(out.c, sub(mul(m.g()[i][k], m.g()[j][l]), mul(m.g()[i][l], m.g()[j][k])));
          residuals.push_back({"R(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + "," +
                                   std::to_string(k + 1) + "," + std::to_string(l + 1) + ")",
                               sub(r.low[i][j][k][l], model)});
        }
  out.residual = certify_all(residuals, m.chart().symbol_order(), m.chart().constraints, cfg);
  // the model only makes sense for a constant c
  bool c_const = true;
  for (const auto& s : m.chart().coords)
    if (!simplify(differentiate(out.c, s)).is_zero()) {
      ZeroCertificate dc = certify_zero(differentiate(out.c, s), m.chart().symbol_order(),
                                        m.chart().constraints, cfg);
      if (!dc.ok()) c_const = false;
    }
  out.certified = out.residual.ok() && c_const;
  return out;
}

}  // namespace sforge
