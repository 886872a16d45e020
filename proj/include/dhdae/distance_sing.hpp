#ifndef DHDAE_DISTANCE_SING_HPP
#define DHDAE_DISTANCE_SING_HPP

#include "dhdae/model.hpp"
#include "dhdae/optimizers.hpp"
#include "dhdae/report.hpp"

#include <optional>

namespace dhdae {

/// Distance to the nearest singular dH pencil. A witness consists of a
/// prospective common-kernel vector together with the structured
/// perturbation that annihilates all three coefficients there.
struct SingDistanceReport {
  double value = 0.0;
  BoundKind bound_kind = BoundKind::Exact;
  std::optional<SetTag> set_tag;  // empty for the unstructured distance
  Scope scope = Scope::Full;
  std::optional<ComplexVector> kernel_vector;
  std::optional<PerturbationTriple> witness;
  bool witness_verified = false;
};

/// Unstructured distance sqrt(lambda_min(E^2 - J^2 + R^2)), which equals
/// sigma_min([E; J; R]); the identity is asserted internally. The witness
/// uses the Hermitian/skew minimal mappings, which attain the same norm.
SingDistanceReport dist_sing_unstructured(const DhdaeSystem& sys,
                                          double rank_tol = kDefaultRankTol);

/// Structured distance under perturbations to all three coefficients.
/// Si: equals the unstructured value, exact when E > 0 and R > 0, a lower
/// bound otherwise. Sd: minimum over the kernel-of-E branch, the
/// kernel-of-R branch, and a three-term Rayleigh minimization away from
/// both kernels.
SingDistanceReport dist_sing_full(const DhdaeSystem& sys, SetTag set_tag,
                                  double rank_tol = kDefaultRankTol,
                                  const OptConfig& cfg = {});

/// Structured distance with E held fixed; +infinity when E > 0.
SingDistanceReport dist_sing_jr(const DhdaeSystem& sys, SetTag set_tag,
                                double rank_tol = kDefaultRankTol,
                                const OptConfig& cfg = {});

}  // namespace dhdae

#endif
