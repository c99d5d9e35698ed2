#ifndef SFORGE_SOLITON_HPP
#define SFORGE_SOLITON_HPP

#include "sforge/geometry.hpp"
#include "sforge/linsolve.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sforge {

enum class VFClass {
  Parallel,
  Concurrent,
  Concircular,
  Recurrent,
  Torqued,
  TorseForming,
  NotTorseForming,
};
std::string vf_class_name(VFClass c);

/// Result of fitting nabla V = a I + V (x) psi. The class tag is the most
/// specific specialization whose defining certificates hold:
/// concircular: psi = 0; recurrent: a = 0; torqued: psi(V) = 0, psi != 0;
/// concurrent: a = 1, psi = 0; parallel: a = 0, psi = 0.
struct TorseFormingDecomposition {
  bool zero_field = false;
  bool pivot_failed = false;
  bool pivot_partial = false;  // pivot component vanishes on part of the domain
  int pivot = -1;
  std::string note;
  VFClass cls = VFClass::NotTorseForming;
  Expr a;
  Vec psi;
  Expr psi_of_v;
  ResidualCheck residual;
  ZeroCertificate psi_zero, a_zero, a_one, psi_v_zero;
  bool torse_forming() const { return !pivot_failed && cls != VFClass::NotTorseForming; }
};

TorseFormingDecomposition classify_vector_field(const Metric& m, const ChristoffelSymbols& gamma,
                                                const Vec& v, const ZeroTestConfig& cfg);

enum class SolitonKind { EtaRicci, EtaYamabe, Ricci, Yamabe };
enum class SignTag { Shrinking, Steady, Expanding, NonConstant, Indefinite };
std::string soliton_kind_name(SolitonKind k);
std::string sign_tag_name(SignTag s);

/// The recovered (lambda, mu) pair with its residual certificate. mu is
/// nullopt when the eta (x) eta column vanishes identically (the equation
/// degenerates and mu is undetermined, which is distinct from mu = 0).
struct SolitonSolution {
  SolitonKind kind = SolitonKind::EtaRicci;
  bool consistent = false;
  Expr lambda;
  std::optional<Expr> mu;
  ResidualCheck residual;
  bool lambda_constant = false;
  bool mu_constant = false;
  SignTag sign = SignTag::NonConstant;
  bool eta_is_gdual = false;      // eta = g-dual of V exactly
  bool eta_is_neg_gdual = false;  // eta = -(g-dual of V); eta (x) eta is the same
  Expr scal;
  std::string failure_note;
  std::string failing_component;
  Expr failing_residual;

  /// mu with undetermined treated as 0 for identities whose mu-term carries
  /// a vanishing eta factor anyway
  Expr mu_or_zero() const { return mu ? *mu : Expr(); }
};

SolitonSolution solve_eta_ricci(const Metric& m, const ChristoffelSymbols& gamma,
                                const CurvatureBundle& curv, const Vec& v, const Vec& eta,
                                const ZeroTestConfig& cfg);
SolitonSolution solve_eta_yamabe(const Metric& m, const ChristoffelSymbols& gamma,
                                 const CurvatureBundle& curv, const Vec& v, const Vec& eta,
                                 const ZeroTestConfig& cfg);

/// One verification record: an identity that either certified, failed, or
/// did not apply to the instance (hypotheses not met).
struct IdentityRecord {
  std::string id;
  bool applicable = true;
  std::string skip_reason;
  ResidualCheck check;
  std::string note;
  bool ok() const { return !applicable || check.ok(); }
};

struct GradientReport {
  bool has_function = false;
  bool applicable = true;
  ResidualCheck check;  // V - grad f, or d(V-flat) when no f is supplied
  std::string note;
};

GradientReport check_gradient_potential(const Metric& m, const Vec& v,
                                        const std::optional<Expr>& f, const ZeroTestConfig& cfg);

/// Concircular identities: V = grad|V|^2/(2a), div V = a n,
/// R(X,V)V = X(a)V - V(a)X, Ric(V,V) = (1-n) V(a).
std::vector<IdentityRecord> verify_concircular_identities(
    const Metric& m, const ChristoffelSymbols& gamma, const CurvatureBundle& curv, const Vec& v,
    const TorseFormingDecomposition& dec, const ZeroTestConfig& cfg);

/// Gradient-collinearity identities for a concircular soliton with constant
/// nonzero a: (lambda - a) + mu |V|^2 = 0 and the three gradient relations.
std::vector<IdentityRecord> verify_proposition_p(const Metric& m, const CurvatureBundle& curv,
                                                 const Vec& v, const Vec& eta,
                                                 const TorseFormingDecomposition& dec,
                                                 const SolitonSolution& sol,
                                                 const ZeroTestConfig& cfg);

/// Mixed generalized quasi-Einstein residual of a torqued soliton:
/// Ric = (lambda-a) g + mu eta(x)eta - (psi(x)eta + eta(x)psi)/2, plus
/// eta(U) = psi(V) = 0 for U the g-dual of psi.
std::vector<IdentityRecord> verify_torqued_structure(const Metric& m, const CurvatureBundle& curv,
                                                     const Vec& v, const Vec& eta,
                                                     const TorseFormingDecomposition& dec,
                                                     const SolitonSolution& sol,
                                                     const ZeroTestConfig& cfg);

/// Recovers (a, delta) with Hess sigma = a g + delta dsigma (x) dsigma and
/// cross-checks the classification of grad sigma against (a, psi = delta dsigma).
struct HessianReport {
  bool applicable = true;
  std::string skip_reason;
  bool solved = false;
  Expr a, delta;
  ResidualCheck residual;
  std::vector<IdentityRecord> consistency;
  std::string note;
};
HessianReport verify_hessian_torse_forming(const Metric& m, const ChristoffelSymbols& gamma,
                                           const Expr& sigma, const ZeroTestConfig& cfg);

std::vector<IdentityRecord> verify_yamabe_identities(const Metric& m,
                                                     const ChristoffelSymbols& gamma,
                                                     const CurvatureBundle& curv, const Vec& v,
                                                     const Vec& eta,
                                                     const TorseFormingDecomposition& dec,
                                                     const SolitonSolution& ysol,
                                                     const ZeroTestConfig& cfg);

enum class EinsteinClass {
  Einstein,
  Quasi,
  AlmostQuasi,
  Generalized,
  MixedGeneralized,
  PseudoQuasi,
  Unclassified,
};
std::string einstein_class_name(EinsteinClass c);

struct EinsteinCandidates {
  std::optional<Vec> A;  // 1-form components
  std::optional<Vec> B;
  std::optional<Mat> E;  // symmetric trace-free remainder
};

/// Fits Ric = alpha g + beta A(x)A + gamma B(x)B + delta (A(x)B + B(x)A)
/// (or the pseudo variant with a trace-free E) and reports the most specific
/// certified class.
struct EinsteinClassReport {
  EinsteinClass cls = EinsteinClass::Unclassified;
  std::optional<Expr> alpha, beta, gamma, delta;
  bool solved = false;
  ResidualCheck residual;
  std::optional<ZeroCertificate> orthogonality;
  std::optional<ZeroCertificate> trace_free;
  std::string note;
};
EinsteinClassReport einstein_classify(const Metric& m, const Mat& ricci,
                                      const EinsteinCandidates& candidates,
                                      const ZeroTestConfig& cfg);

/// Shared helper: stacks T_ij = x0 * P_ij + x1 * Q_ij over i <= j and solves.
LinearSolveResult fit_two_term(const Metric& m, const Mat& target, const Mat& p, const Mat& q,
                               const ZeroTestConfig& cfg);

}  // namespace sforge

#endif
