#ifndef SFORGE_GEOMETRY_HPP
#define SFORGE_GEOMETRY_HPP

#include "sforge/expr.hpp"
#include "sforge/zerotest.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace sforge {

using Vec = std::vector<Expr>;
using Mat = std::vector<std::vector<Expr>>;

Mat zero_mat(int n);
Vec zero_vec(int n);

/// Coordinate system: ordered coordinate symbols, optional parameter symbols
/// (constants of the chart), and the domain constraints both live under.
struct Chart {
  std::string name;
  std::vector<std::string> coords;
  std::vector<std::string> params;
  std::vector<DomainConstraint> constraints;

  int dim() const { return static_cast<int>(coords.size()); }
  /// coords then params; the sampling order for zero tests
  std::vector<std::string> symbol_order() const;
  /// validates symbol distinctness and that constraint bounds only use
  /// earlier symbols; throws std::runtime_error with a diagnostic
  void validate() const;
};

using ChartPtr = std::shared_ptr<const Chart>;

enum class Signature { Riemannian, Lorentzian, General };
std::string signature_name(Signature s);

/// Validated pseudo-Riemannian metric: structurally symmetric component
/// matrix with a certified-nonzero determinant and a sampled signature.
class Metric {
 public:
  Metric() = default;  // empty placeholder; real instances come from build()
  static Metric build(ChartPtr chart, Mat components, const ZeroTestConfig& cfg);

  const Chart& chart() const { return *chart_; }
  ChartPtr chart_ptr() const { return chart_; }
  int dim() const { return chart_->dim(); }
  const Mat& g() const { return g_; }
  const Mat& inv() const { return inv_; }
  const Expr& det() const { return det_; }
  Signature signature() const { return signature_; }
  int negative_eigenvalues() const { return neg_eigen_; }
  const ZeroCertificate& nondegeneracy() const { return nondegeneracy_; }

 private:
  ChartPtr chart_;
  Mat g_, inv_;
  Expr det_;
  Signature signature_ = Signature::General;
  int neg_eigen_ = 0;
  ZeroCertificate nondegeneracy_;
};

struct ChristoffelSymbols {
  // gamma[k][i][j] = Gamma^k_{ij}, symmetric in (i, j)
  std::vector<Mat> gamma;
};

struct CurvatureBundle {
  // up[i][j][k][l]: component l of R(d_i, d_j) d_k
  std::vector<std::vector<std::vector<Vec>>> up;
  // low(i,j,k,l) = g(R(d_i,d_j) d_l, d_k); constant curvature c gives
  // low = c (g_ik g_jl - g_il g_jk)
  std::vector<std::vector<Mat>> low;
  Mat ricci;
  Expr scal;
  std::optional<std::vector<std::vector<Mat>>> weyl;  // n >= 4, on request
};

ChristoffelSymbols christoffel(const Metric& m);
CurvatureBundle curvature(const Metric& m, const ChristoffelSymbols& gamma,
                          bool with_weyl = false);

/// (nabla_i V)^j
Mat covariant_derivative_vector(const Metric& m, const ChristoffelSymbols& gamma, const Vec& v);
/// (nabla_i w)_j
Mat covariant_derivative_oneform(const Metric& m, const ChristoffelSymbols& gamma, const Vec& w);
/// (Lie_V g)_{ij}
Mat lie_derivative_metric(const Metric& m, const ChristoffelSymbols& gamma, const Vec& v);

Vec grad(const Metric& m, const Expr& f);
Mat hessian(const Metric& m, const ChristoffelSymbols& gamma, const Expr& f);
Expr divergence(const Metric& m, const ChristoffelSymbols& gamma, const Vec& v);
Vec lower_index(const Metric& m, const Vec& v);
Vec raise_index(const Metric& m, const Vec& w);
Expr inner(const Metric& m, const Vec& a, const Vec& b);
Expr norm_sq(const Metric& m, const Vec& v);
Vec lie_bracket(const Chart& chart, const Vec& x, const Vec& y);
/// (dw)_{ij} = d_i w_j - d_j w_i
Mat exterior_derivative_oneform(const Chart& chart, const Vec& w);
/// (div T)_j for symmetric T
Vec divergence_sym2(const Metric& m, const ChristoffelSymbols& gamma, const Mat& t);

Expr eval_bilinear(const Mat& t, const Vec& x, const Vec& y);
/// R(X,Y)Z as a vector field
Vec curvature_apply(const CurvatureBundle& r, const Vec& x, const Vec& y, const Vec& z);

Expr trace_with_metric(const Metric& m, const Mat& t);  // g^{ij} T_ij
Mat sym_outer(const Vec& a, const Vec& b);              // a_i b_j + a_j b_i
Mat outer(const Vec& a, const Vec& b);                  // a_i b_j
Mat mat_sub(const Mat& a, const Mat& b);
Mat mat_add(const Mat& a, const Mat& b);
Mat mat_scale(const Expr& s, const Mat& a);

/// Finite-difference validation of the Christoffel pipeline: compares the
/// symbolic symbols against central differences of the metric components at
/// sampled in-domain points.
struct FdOracleResult {
  bool pass = false;
  double max_rel_err = 0.0;
  int points = 0;
  std::string note;
};
FdOracleResult fd_christoffel_check(const Metric& m, const ChristoffelSymbols& gamma,
                                    int points, double rel_tol, const ZeroTestConfig& cfg);

/// Componentwise certificate that low(i,j,k,l) = c (g_ik g_jl - g_il g_jk);
/// on success returns the recovered constant c.
struct ConstantCurvature {
  bool certified = false;
  Expr c;
  ResidualCheck residual;
};
ConstantCurvature constant_curvature(const Metric& m, const CurvatureBundle& r,
                                     const ZeroTestConfig& cfg);

}  // namespace sforge

#endif
