#ifndef DHDAE_DISTANCE_HI_HPP
#define DHDAE_DISTANCE_HI_HPP

#include "dhdae/model.hpp"
#include "dhdae/optimizers.hpp"
#include "dhdae/report.hpp"

#include <optional>
#include <string>

namespace dhdae {

/// Distance to the nearest dH pencil of index two. For the full scope the
/// two-stage construction (truncate k small eigenvalues of E, then solve
/// the compressed mapping problem) yields an upper bound; k_star records
/// the winning truncation depth.
struct HiDistanceReport {
  double value = 0.0;
  BoundKind bound_kind = BoundKind::Exact;
  SetTag set_tag = SetTag::Si;
  Scope scope = Scope::JR;
  int k_star = 0;
  std::optional<PerturbationTriple> witness;
  bool witness_verified = false;
  std::string note;
};

/// Exact distance with E fixed; requires a robustly stable system.
/// +infinity when E > 0 (the perturbed pencil then keeps index zero).
HiDistanceReport dist_hi_jr(const DhdaeSystem& sys, SetTag set_tag,
                            double rank_tol = kDefaultRankTol,
                            const OptConfig& cfg = {});

/// Two-stage upper bound with all three coefficients perturbed; the
/// tightness of the bound is an open matter and the report says so.
HiDistanceReport dist_hi_full(const DhdaeSystem& sys, SetTag set_tag,
                              double rank_tol = kDefaultRankTol,
                              const OptConfig& cfg = {});

}  // namespace dhdae

#endif
