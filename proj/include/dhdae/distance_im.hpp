#ifndef DHDAE_DISTANCE_IM_HPP
#define DHDAE_DISTANCE_IM_HPP

#include "dhdae/model.hpp"
#include "dhdae/optimizers.hpp"
#include "dhdae/report.hpp"

#include <optional>

namespace dhdae {

/// Raised by build_omega_matrices when i*omega is an eigenvalue of the
/// pair (E, J); such omega belong to the Lambda branch.
class OmegaInLambdaError : public Error {
public:
  using Error::Error;
};

/// The omega-dependent matrices of the imaginary-axis distance bounds.
/// M = (i omega E - J)^{-1} is skew-Hermitian. H1t and H2t are the
/// Hermitian forms whose zero sets encode feasibility of the Hermitian
/// and skew mapping problems; G1 (positive definite) and G2 collect the
/// squared perturbation norms, and G, H1, H2 are their congruence
/// rescalings by G1^{-1/2}.
struct OmegaMatrices {
  ComplexMatrix M;
  ComplexMatrix H1t, H2t;
  ComplexMatrix G1, G2;
  ComplexMatrix G, H1, H2;
  ComplexMatrix G1_inv_sqrt;
};

OmegaMatrices build_omega_matrices(const DhdaeSystem& sys, double omega,
                                   double rank_tol = kDefaultRankTol);

enum class ImBranch { Lambda, Generic };

/// Distance to the nearest dH pencil with a purely imaginary eigenvalue.
/// The full-perturbation formulas are lower bounds; `tight` marks reports
/// whose reconstructed witness is admissible and attains the bound, which
/// upgrades bound_kind to Exact (modulo the heuristic omega search, see
/// `heuristic_search`).
struct ImDistanceReport {
  double value = 0.0;
  BoundKind bound_kind = BoundKind::Lower;
  SetTag set_tag = SetTag::Si;
  Scope scope = Scope::Full;
  double omega_star = 0.0;
  ImBranch branch = ImBranch::Generic;
  std::optional<PerturbationTriple> witness;
  bool witness_verified = false;
  bool tight = false;
  bool heuristic_search = true;
};

ImDistanceReport dist_im_full(const DhdaeSystem& sys, SetTag set_tag,
                              double rank_tol = kDefaultRankTol,
                              const OptConfig& cfg = {});

/// Partial distance with E fixed. Sd is exact; Si is exact for R > 0 and
/// otherwise a lower bound (upgraded when the witness certifies
/// attainment).
ImDistanceReport dist_im_jr(const DhdaeSystem& sys, SetTag set_tag,
                            double rank_tol = kDefaultRankTol,
                            const OptConfig& cfg = {});

}  // namespace dhdae

#endif
