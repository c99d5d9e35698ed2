#ifndef SFORGE_HYPERSURFACE_HPP
#define SFORGE_HYPERSURFACE_HPP

#include "sforge/soliton.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sforge {

/// Codimension-one immersion: a component map from a source chart into the
/// chart of a validated ambient metric.
struct Immersion {
  ChartPtr source;
  Metric ambient;
  Vec map;  // ambient-chart expressions in the source coordinates

  int source_dim() const { return source->dim(); }
  int ambient_dim() const { return ambient.dim(); }
  /// substitute the map into an ambient-chart expression
  Expr pull_back(const Expr& e) const;
};

/// Induced metric, unit normal, second fundamental form and shape operator
/// of a hypersurface immersion, with the construction certificates.
struct InducedGeometry {
  Metric induced;
  ChristoffelSymbols induced_gamma;
  CurvatureBundle induced_curv;
  Mat jacobian;  // jacobian[A][i] = d phi^A / d u^i
  Vec normal;    // ambient components along the immersion
  int normal_sign = 1;      // sign of g~(N, N)
  bool orientation_fixed = false;  // det(dphi_1,...,dphi_n, N) > 0 sampled
  std::string orientation_note;
  Mat H;   // H_ij = g~(nabla~_i dphi_j, N)
  Mat B;   // B[i][j] = (B(d_i))^j = g^{jk} H_ik
  Expr trH;
  Expr mean_curvature;
  ResidualCheck rank_cert;
  ResidualCheck orthogonality;  // g~(N, dphi_i) = 0
  ZeroCertificate unit_normal;  // g~(N,N) -+ 1
  ResidualCheck weingarten;     // nabla~_X N = -B(X)
};

InducedGeometry induce_geometry(const Immersion& imm, const ZeroTestConfig& cfg,
                                bool flip_normal = false);

/// Tangential/normal split of an ambient vector field along the immersion.
struct AmbientSplit {
  Vec tangential;     // source-chart components of V^T
  Vec ambient_value;  // V composed with the map
  Expr rho;           // g(N, V-perp)
  ResidualCheck reconstruction;
};

AmbientSplit split_ambient_field(const Immersion& imm, const InducedGeometry& geo,
                                 const Vec& ambient_field, const ZeroTestConfig& cfg);

/// Gauss-equation residuals against a certified constant-curvature ambient:
/// Ric = tr(H) H - H^2 + (n-1)c g and scal = n(n-1)c + tr(H)^2 - tr(H^2).
struct GaussReport {
  bool applicable = true;
  std::string skip_reason;
  Expr c;
  ResidualCheck ricci_residual;
  ResidualCheck scal_residual;
};
GaussReport verify_gauss_equation(const InducedGeometry& geo, const ConstantCurvature& ambient_cc,
                                  const ZeroTestConfig& cfg);

/// Ambient torse-forming data pulled back along the immersion.
struct AmbientDecomposition {
  Expr a;   // source-chart expression
  Vec psi;  // pulled-back 1-form on the source
  bool psi_vanishes = false;
};
AmbientDecomposition pull_back_decomposition(const Immersion& imm,
                                             const TorseFormingDecomposition& dec,
                                             const ZeroTestConfig& cfg);

/// Soliton solve on the hypersurface with the tangential potential field,
/// plus the structure residuals that characterize it through H.
struct SubmanifoldSolitonReport {
  SolitonSolution solution;
  TorseFormingDecomposition tangential_class;
  IdentityRecord structure_residual;       // Ric or scal form through rho H
  IdentityRecord constant_curvature_form;  // H^2 form (ricci) / rho H form (yamabe)
  IdentityRecord minimal_scal;             // minimal-submanifold corollary
};
SubmanifoldSolitonReport solve_submanifold_soliton(const Immersion& imm,
                                                   const InducedGeometry& geo,
                                                   const AmbientSplit& split,
                                                   const AmbientDecomposition& dec,
                                                   const ConstantCurvature& ambient_cc,
                                                   bool yamabe, const ZeroTestConfig& cfg);

enum class UmbilicalClass {
  TotallyUmbilical,
  QuasiUmbilical,
  TwoQuasiUmbilical,
  PseudoQuasiUmbilical,
  Unclassified,
};
std::string umbilical_class_name(UmbilicalClass c);

struct UmbilicalCandidates {
  std::optional<Vec> varpi;
  std::optional<Vec> eta;
};

struct UmbilicalReport {
  UmbilicalClass cls = UmbilicalClass::Unclassified;
  std::optional<Expr> alpha, beta, gamma;
  bool solved = false;
  ResidualCheck residual;
  std::optional<ZeroCertificate> orthogonality;
  std::optional<ZeroCertificate> trace_free;  // pseudo remainder
  std::string note;
};
UmbilicalReport umbilical_classify(const InducedGeometry& geo,
                                   const UmbilicalCandidates& candidates,
                                   const ZeroTestConfig& cfg);

/// Cross-check of the quasi-umbilical coefficients (lambda-a-alpha)/rho and
/// (mu-beta)/rho predicted by a quasi-Einstein eta-Ricci soliton.
IdentityRecord umbilical_soliton_crosscheck(const InducedGeometry& geo, const AmbientSplit& split,
                                            const AmbientDecomposition& dec,
                                            const SolitonSolution& sol,
                                            const EinsteinClassReport& einstein,
                                            const ZeroTestConfig& cfg);

/// Full machinery for a hypersurface of the unit sphere sitting in flat
/// space: M -> S^{n+1}(1) -> E^{n+2} with a torse-forming field on E^{n+2}.
struct SphereChainAnalysis {
  bool chain_valid = false;
  std::string chain_note;
  ResidualCheck unit_sphere_cert;     // |Phi|^2 = 1 along M
  ResidualCheck sphere_metric_cert;   // declared sphere metric = pullback
  TorseFormingDecomposition ambient_class;  // of V on E^{n+2}
  InducedGeometry geo;                // M in the sphere chart
  Vec xi;                             // tangential part of V to the sphere (E comps)
  Vec normal_e;                       // unit normal of M pushed to E comps
  Vec u_field;                        // source components of U
  Expr delta;                         // <V, N>
  Expr varrho;                        // <V, N_S>
  ResidualCheck u_tangency;
  std::vector<IdentityRecord> identities;  // recur1, d-varrho, nablaU, d-delta, LieU
  SolitonSolution thmb_ricci;     // from the displayed H^2 identity
  SolitonSolution direct_ricci;   // from the soliton equation on (M, U)
  IdentityRecord ricci_coherence;
  SolitonSolution thmb_yamabe;
  SolitonSolution direct_yamabe;
  IdentityRecord yamabe_coherence;
  IdentityRecord pseudo_quasi_umbilical;
};

SphereChainAnalysis sphere_hypersurface_analysis(const Immersion& inner,
                                                 const Immersion& outer_imm,
                                                 const Vec& ambient_field,
                                                 const ZeroTestConfig& cfg);

}  // namespace sforge

#endif
